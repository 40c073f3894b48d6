#include <mcr/mcr.h>

#include "engine.hpp"
#include "experiments.hpp"
#include "log.hpp"
#include "outputs.hpp"
#include "world.hpp"

#include <cstring>
#include <ios>
#include <optional>
#include <string>

struct mcr_config {
    mcr::world::ScenarioConfig config;
};

struct mcr_sim {
    mcr::engine::RunResult run;
};

struct mcr_replication {
    mcr::engine::ReplicationResult result;
};

struct mcr_sweep {
    mcr::experiments::SweepSpec spec;
    std::optional<mcr::experiments::SweepResult> result;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_field;

mcr_status fail(mcr_status code, std::string message, std::string field = {}) {
    last_error = std::move(message);
    last_field = std::move(field);
    return code;
}

// Maps exceptions from the core onto status codes.
template <typename Fn>
mcr_status guarded(Fn&& fn) {
    try {
        last_error.clear();
        last_field.clear();
        return fn();
    } catch (const mcr::world::ConfigError& e) {
        return fail(MCR_ERR_CONFIG, e.what(), e.field());
    } catch (const mcr::outputs::IoError& e) {
        return fail(MCR_ERR_IO, e.what());
    } catch (const std::ios_base::failure& e) {
        return fail(MCR_ERR_IO, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(MCR_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(MCR_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(MCR_ERR_INTERNAL, "unknown error");
    }
}

char* duplicate(const std::string& s) {
    auto* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

#define MCR_REQUIRE(cond, msg)                                                                                         \
    do {                                                                                                               \
        if (!(cond)) return fail(MCR_ERR_INVALID_ARGUMENT, msg);                                                       \
    } while (0)

} // namespace

extern "C" {

const char* mcr_last_error(void) { return last_error.c_str(); }
const char* mcr_last_error_field(void) { return last_field.c_str(); }
const char* mcr_version(void) { return "0.1.0"; }

void mcr_set_log_level(mcr_log_level level) {
    switch (level) {
    case MCR_LOG_QUIET: mcr::log::set_level(mcr::log::Level::quiet); break;
    case MCR_LOG_INFO: mcr::log::set_level(mcr::log::Level::info); break;
    default: mcr::log::set_level(mcr::log::Level::warn); break;
    }
}

void mcr_string_free(char* s) { delete[] s; }

mcr_status mcr_config_default(mcr_config** out) {
    MCR_REQUIRE(out, "null output pointer");
    return guarded([&] {
        *out = new mcr_config{mcr::world::default_config()};
        return MCR_OK;
    });
}

mcr_status mcr_config_load(const char* path, mcr_config** out) {
    MCR_REQUIRE(path && out, "null argument");
    return guarded([&] {
        auto cfg = mcr::world::load_config(path);
        *out = new mcr_config{std::move(cfg)};
        return MCR_OK;
    });
}

mcr_status mcr_config_parse(const char* json, mcr_config** out) {
    MCR_REQUIRE(json && out, "null argument");
    return guarded([&] {
        auto cfg = mcr::world::config_from_json_text(json);
        *out = new mcr_config{std::move(cfg)};
        return MCR_OK;
    });
}

void mcr_config_free(mcr_config* config) { delete config; }

mcr_status mcr_config_validate(const mcr_config* config) {
    MCR_REQUIRE(config, "null config");
    return guarded([&] {
        mcr::world::validate(config->config);
        return MCR_OK;
    });
}

mcr_status mcr_config_to_json(const mcr_config* config, char** out) {
    MCR_REQUIRE(config && out, "null argument");
    return guarded([&] {
        *out = duplicate(mcr::world::config_to_json_text(config->config));
        return MCR_OK;
    });
}

mcr_status mcr_config_set_steps(mcr_config* config, int steps) {
    MCR_REQUIRE(config, "null config");
    if (steps < 0) return fail(MCR_ERR_CONFIG, "steps: must be >= 0", "steps");
    config->config.steps = steps;
    return MCR_OK;
}

mcr_status mcr_config_set_xi(mcr_config* config, double xi) {
    MCR_REQUIRE(config, "null config");
    if (!(xi >= 0.0 && xi <= 1.0)) return fail(MCR_ERR_CONFIG, "xi: must lie in [0, 1]", "xi");
    config->config.xi = xi;
    return MCR_OK;
}

mcr_status mcr_config_set_landuse(mcr_config* config, int enabled) {
    MCR_REQUIRE(config, "null config");
    config->config.landuse_enabled = enabled != 0;
    return MCR_OK;
}

mcr_status mcr_config_set_congested_eval(mcr_config* config, int enabled) {
    MCR_REQUIRE(config, "null config");
    config->config.congestion_in_evaluation = enabled != 0;
    return MCR_OK;
}

mcr_status mcr_config_set_mayor_weights(mcr_config* config, const double* weights, size_t n) {
    MCR_REQUIRE(config && (weights || n == 0), "null argument");
    config->config.mayor_weight_override.assign(weights, weights + n);
    return MCR_OK;
}

int mcr_config_steps(const mcr_config* config) { return config ? config->config.steps : -1; }

mcr_status mcr_sim_create(const mcr_config* config, uint64_t seed, mcr_sim** out) {
    MCR_REQUIRE(config && out, "null argument");
    return guarded([&] {
        *out = new mcr_sim{{config->config, seed, mcr::engine::initial_state(config->config, seed)}};
        return MCR_OK;
    });
}

void mcr_sim_free(mcr_sim* sim) { delete sim; }

mcr_status mcr_sim_step(mcr_sim* sim) {
    MCR_REQUIRE(sim, "null simulation");
    return guarded([&] {
        mcr::engine::step(sim->run.state, sim->run.config);
        return MCR_OK;
    });
}

mcr_status mcr_sim_run(mcr_sim* sim) {
    MCR_REQUIRE(sim, "null simulation");
    return guarded([&] {
        while (sim->run.state.step < sim->run.config.steps) mcr::engine::step(sim->run.state, sim->run.config);
        return MCR_OK;
    });
}

mcr_status mcr_sim_indicators(const mcr_sim* sim, mcr_indicators* out) {
    MCR_REQUIRE(sim && out, "null argument");
    if (sim->run.state.history.empty()) return fail(MCR_ERR_STATE, "no indicators recorded");
    const auto& h = sim->run.state.history.back();
    *out = {h.step, h.total_accessibility, h.total_travel_time, h.link_count};
    return MCR_OK;
}

mcr_status mcr_sim_history_csv(const mcr_sim* sim, char** out) {
    MCR_REQUIRE(sim && out, "null argument");
    return guarded([&] {
        *out = duplicate(mcr::outputs::history_csv(sim->run.state));
        return MCR_OK;
    });
}

mcr_status mcr_sim_write_outputs(const mcr_sim* sim, const char* dir) {
    MCR_REQUIRE(sim && dir, "null argument");
    return guarded([&] {
        mcr::outputs::write_run_outputs(sim->run, dir);
        return MCR_OK;
    });
}

mcr_status mcr_replicate(const mcr_config* config, int n, uint64_t base_seed, unsigned threads,
                         mcr_replication** out) {
    MCR_REQUIRE(config && out, "null argument");
    if (n < 1) return fail(MCR_ERR_CONFIG, "replications: must be >= 1", "replications");
    return guarded([&] {
        *out = new mcr_replication{mcr::engine::replicate(config->config, n, base_seed, threads)};
        return MCR_OK;
    });
}

void mcr_replication_free(mcr_replication* rep) { delete rep; }

mcr_status mcr_replication_stats_get(const mcr_replication* rep, mcr_replication_stats* out) {
    MCR_REQUIRE(rep && out, "null argument");
    const auto& s = rep->result.stats;
    *out = {s.n,
            s.mean[0],
            s.mean[1],
            s.covariance[0][0],
            s.covariance[0][1],
            s.covariance[1][1],
            s.ellipse.major,
            s.ellipse.minor,
            s.ellipse.angle};
    return MCR_OK;
}

mcr_status mcr_replication_write_outputs(const mcr_replication* rep, const char* dir) {
    MCR_REQUIRE(rep && dir, "null argument");
    return guarded([&] {
        mcr::experiments::write_replicate_outputs(rep->result, dir);
        return MCR_OK;
    });
}

mcr_status mcr_sweep_create(const mcr_config* base, mcr_sweep** out) {
    MCR_REQUIRE(base && out, "null argument");
    return guarded([&] {
        auto* sweep = new mcr_sweep{};
        sweep->spec.base = base->config;
        *out = sweep;
        return MCR_OK;
    });
}

void mcr_sweep_free(mcr_sweep* sweep) { delete sweep; }

mcr_status mcr_sweep_set_xi_values(mcr_sweep* sweep, const double* values, size_t n) {
    MCR_REQUIRE(sweep && (values || n == 0), "null argument");
    sweep->spec.xi_values.assign(values, values + n);
    sweep->result.reset();
    return MCR_OK;
}

mcr_status mcr_sweep_set_replications(mcr_sweep* sweep, int n) {
    MCR_REQUIRE(sweep, "null sweep");
    sweep->spec.replications = n;
    sweep->result.reset();
    return MCR_OK;
}

mcr_status mcr_sweep_set_base_seed(mcr_sweep* sweep, uint64_t seed) {
    MCR_REQUIRE(sweep, "null sweep");
    sweep->spec.base_seed = seed;
    sweep->result.reset();
    return MCR_OK;
}

mcr_status mcr_sweep_clear_configurations(mcr_sweep* sweep) {
    MCR_REQUIRE(sweep, "null sweep");
    sweep->spec.configurations.clear();
    sweep->result.reset();
    return MCR_OK;
}

mcr_status mcr_sweep_add_configuration(mcr_sweep* sweep, const char* name, double weight_ratio,
                                       double center_distance) {
    MCR_REQUIRE(sweep && name, "null argument");
    sweep->spec.configurations.push_back({name, weight_ratio, center_distance});
    sweep->result.reset();
    return MCR_OK;
}

mcr_status mcr_sweep_run(mcr_sweep* sweep, unsigned threads, size_t* failures) {
    MCR_REQUIRE(sweep, "null sweep");
    return guarded([&] {
        sweep->result = mcr::experiments::run_sweep(sweep->spec, threads);
        if (failures) *failures = sweep->result->failures;
        if (sweep->result->failures > 0) {
            return fail(MCR_ERR_PARTIAL, std::to_string(sweep->result->failures) + " sweep cells failed");
        }
        return MCR_OK;
    });
}

mcr_status mcr_sweep_trend(const mcr_sweep* sweep, const char* configuration, double* spearman) {
    MCR_REQUIRE(sweep && configuration && spearman, "null argument");
    if (!sweep->result) return fail(MCR_ERR_STATE, "sweep has not been run");
    for (const auto& t : sweep->result->trends) {
        if (t.configuration == configuration) {
            *spearman = t.spearman;
            return MCR_OK;
        }
    }
    return fail(MCR_ERR_INVALID_ARGUMENT, std::string("no configuration named ") + configuration);
}

mcr_status mcr_sweep_write_outputs(const mcr_sweep* sweep, const char* dir) {
    MCR_REQUIRE(sweep && dir, "null argument");
    if (!sweep->result) return fail(MCR_ERR_STATE, "sweep has not been run");
    return guarded([&] {
        mcr::experiments::write_sweep_outputs(*sweep->result, dir);
        return MCR_OK;
    });
}

} // extern "C"
