#ifndef MCR_MCR_H
#define MCR_MCR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MCR_BUILDING_LIBRARY)
#    define MCR_API __declspec(dllexport)
#  else
#    define MCR_API __declspec(dllimport)
#  endif
#else
#  define MCR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. MCR_ERR_CONFIG and MCR_ERR_IO match the CLI exit codes. */
typedef enum mcr_status {
    MCR_OK = 0,
    MCR_ERR_INVALID_ARGUMENT = 1,
    MCR_ERR_CONFIG = 2,
    MCR_ERR_IO = 3,
    MCR_ERR_STATE = 4,
    MCR_ERR_PARTIAL = 5,
    MCR_ERR_INTERNAL = 6
} mcr_status;

typedef enum mcr_log_level { MCR_LOG_QUIET = 0, MCR_LOG_WARN = 1, MCR_LOG_INFO = 2 } mcr_log_level;

typedef struct mcr_config mcr_config;
typedef struct mcr_sim mcr_sim;
typedef struct mcr_replication mcr_replication;
typedef struct mcr_sweep mcr_sweep;

typedef struct mcr_indicators {
    int step;
    double total_accessibility;
    double total_travel_time;
    size_t link_count;
} mcr_indicators;

typedef struct mcr_replication_stats {
    size_t n;
    double mean_accessibility;
    double mean_travel_time;
    double cov_acc_acc;
    double cov_acc_tt;
    double cov_tt_tt;
    double ellipse_major;
    double ellipse_minor;
    double ellipse_angle;
} mcr_replication_stats;

/* Message of the last failed call on this thread ("" when none). */
MCR_API const char* mcr_last_error(void);
/* Offending config field of the last MCR_ERR_CONFIG on this thread, or "". */
MCR_API const char* mcr_last_error_field(void);
MCR_API const char* mcr_version(void);
MCR_API void mcr_set_log_level(mcr_log_level level);
MCR_API void mcr_string_free(char* s);

/* Configuration. */
MCR_API mcr_status mcr_config_default(mcr_config** out);
MCR_API mcr_status mcr_config_load(const char* path, mcr_config** out);
MCR_API mcr_status mcr_config_parse(const char* json, mcr_config** out);
MCR_API void mcr_config_free(mcr_config* config);
MCR_API mcr_status mcr_config_validate(const mcr_config* config);
MCR_API mcr_status mcr_config_to_json(const mcr_config* config, char** out);
MCR_API mcr_status mcr_config_set_steps(mcr_config* config, int steps);
MCR_API mcr_status mcr_config_set_xi(mcr_config* config, double xi);
MCR_API mcr_status mcr_config_set_landuse(mcr_config* config, int enabled);
MCR_API mcr_status mcr_config_set_congested_eval(mcr_config* config, int enabled);
/* Replaces the job-count mayor weights; n = 0 restores them. */
MCR_API mcr_status mcr_config_set_mayor_weights(mcr_config* config, const double* weights, size_t n);
MCR_API int mcr_config_steps(const mcr_config* config);

/* Single simulation. */
MCR_API mcr_status mcr_sim_create(const mcr_config* config, uint64_t seed, mcr_sim** out);
MCR_API void mcr_sim_free(mcr_sim* sim);
MCR_API mcr_status mcr_sim_step(mcr_sim* sim);
/* Steps until the configured step count is reached. */
MCR_API mcr_status mcr_sim_run(mcr_sim* sim);
MCR_API mcr_status mcr_sim_indicators(const mcr_sim* sim, mcr_indicators* out);
MCR_API mcr_status mcr_sim_history_csv(const mcr_sim* sim, char** out);
MCR_API mcr_status mcr_sim_write_outputs(const mcr_sim* sim, const char* dir);

/* Replication batch over seeds base_seed .. base_seed + n - 1.
   threads = 0 uses the hardware concurrency. */
MCR_API mcr_status mcr_replicate(const mcr_config* config, int n, uint64_t base_seed, unsigned threads,
                                 mcr_replication** out);
MCR_API void mcr_replication_free(mcr_replication* rep);
MCR_API mcr_status mcr_replication_stats_get(const mcr_replication* rep, mcr_replication_stats* out);
MCR_API mcr_status mcr_replication_write_outputs(const mcr_replication* rep, const char* dir);

/* Sensitivity sweep. Created with the default ξ grid and the four default
   two-center configurations. */
MCR_API mcr_status mcr_sweep_create(const mcr_config* base, mcr_sweep** out);
MCR_API void mcr_sweep_free(mcr_sweep* sweep);
MCR_API mcr_status mcr_sweep_set_xi_values(mcr_sweep* sweep, const double* values, size_t n);
MCR_API mcr_status mcr_sweep_set_replications(mcr_sweep* sweep, int n);
MCR_API mcr_status mcr_sweep_set_base_seed(mcr_sweep* sweep, uint64_t seed);
MCR_API mcr_status mcr_sweep_clear_configurations(mcr_sweep* sweep);
MCR_API mcr_status mcr_sweep_add_configuration(mcr_sweep* sweep, const char* name, double weight_ratio,
                                               double center_distance);
/* MCR_ERR_PARTIAL when some cells failed; the rows are still recorded. */
MCR_API mcr_status mcr_sweep_run(mcr_sweep* sweep, unsigned threads, size_t* failures);
MCR_API mcr_status mcr_sweep_trend(const mcr_sweep* sweep, const char* configuration, double* spearman);
MCR_API mcr_status mcr_sweep_write_outputs(const mcr_sweep* sweep, const char* dir);

#ifdef __cplusplus
}
#endif

#endif
