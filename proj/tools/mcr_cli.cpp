// Batch front end: run, replicate, sweep.
#include <mcr/mcr.h>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_internal = 1;
constexpr int exit_config = 2;
constexpr int exit_io = 3;
constexpr int exit_partial = 4;

struct Options {
    std::string config_path;
    std::uint64_t seed = 1;
    int replications = 30;
    std::optional<int> steps;
    std::vector<double> xi;
    std::string out = "out";
    bool disable_landuse = false;
    bool congested_eval = false;
    unsigned threads = 0;
    bool quiet = false;
    bool verbose = false;
};

struct ConfigDeleter {
    void operator()(mcr_config* c) const { mcr_config_free(c); }
};
using ConfigPtr = std::unique_ptr<mcr_config, ConfigDeleter>;

int report(mcr_status status, const char* what) {
    const char* field = mcr_last_error_field();
    if (*field) {
        std::fprintf(stderr, "mcrsim: %s: %s (field '%s')\n", what, mcr_last_error(), field);
    } else {
        std::fprintf(stderr, "mcrsim: %s: %s\n", what, mcr_last_error());
    }
    switch (status) {
    case MCR_OK: return exit_ok;
    case MCR_ERR_CONFIG: return exit_config;
    case MCR_ERR_IO: return exit_io;
    case MCR_ERR_PARTIAL: return exit_partial;
    default: return exit_internal;
    }
}

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config_path, "scenario JSON (default: built-in two-city scenario)");
    cmd->add_option("--seed", o.seed, "seed, or base seed for batches");
    cmd->add_option("--replications", o.replications, "runs per batch or sweep cell");
    cmd->add_option("--steps", o.steps, "override the configured step count");
    cmd->add_option("--xi", o.xi, "share of local decisions; a comma-separated grid for sweep")->delimiter(',');
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_flag("--disable-landuse", o.disable_landuse, "freeze workers and jobs");
    cmd->add_flag("--congested-eval", o.congested_eval, "judge candidate links on congested times");
    cmd->add_option("--threads", o.threads, "worker threads for batches (0 = all cores)");
    cmd->add_flag("-q,--quiet", o.quiet, "suppress warnings");
    cmd->add_flag("-v,--verbose", o.verbose, "progress messages");
}

// Loads the config and applies command-line overrides.
int prepare(const Options& o, bool single_xi, ConfigPtr& out) {
    mcr_set_log_level(o.quiet ? MCR_LOG_QUIET : o.verbose ? MCR_LOG_INFO : MCR_LOG_WARN);
    mcr_config* raw = nullptr;
    mcr_status st = o.config_path.empty() ? mcr_config_default(&raw) : mcr_config_load(o.config_path.c_str(), &raw);
    if (st != MCR_OK) return report(st, "loading config");
    out.reset(raw);
    if (o.steps && (st = mcr_config_set_steps(raw, *o.steps)) != MCR_OK) return report(st, "--steps");
    if (single_xi && !o.xi.empty()) {
        if (o.xi.size() != 1) {
            std::fprintf(stderr, "mcrsim: --xi takes a single value here (field 'xi')\n");
            return exit_config;
        }
        if ((st = mcr_config_set_xi(raw, o.xi.front())) != MCR_OK) return report(st, "--xi");
    }
    if (o.disable_landuse) mcr_config_set_landuse(raw, 0);
    if (o.congested_eval) mcr_config_set_congested_eval(raw, 1);
    if (o.replications < 1) {
        std::fprintf(stderr, "mcrsim: --replications must be >= 1 (field 'replications')\n");
        return exit_config;
    }
    if ((st = mcr_config_validate(raw)) != MCR_OK) return report(st, "invalid config");
    return exit_ok;
}

int cmd_run(const Options& o) {
    ConfigPtr cfg;
    if (int rc = prepare(o, true, cfg); rc != exit_ok) return rc;
    mcr_sim* sim = nullptr;
    mcr_status st = mcr_sim_create(cfg.get(), o.seed, &sim);
    if (st != MCR_OK) return report(st, "initialising");
    std::unique_ptr<mcr_sim, decltype(&mcr_sim_free)> guard(sim, mcr_sim_free);
    if ((st = mcr_sim_run(sim)) != MCR_OK) return report(st, "running");
    if ((st = mcr_sim_write_outputs(sim, o.out.c_str())) != MCR_OK) return report(st, "writing outputs");
    mcr_indicators ind{};
    mcr_sim_indicators(sim, &ind);
    std::printf("step %d: total accessibility %.6g, total travel time %.6g h, %zu links\n", ind.step,
                ind.total_accessibility, ind.total_travel_time, ind.link_count);
    return exit_ok;
}

int cmd_replicate(const Options& o) {
    ConfigPtr cfg;
    if (int rc = prepare(o, true, cfg); rc != exit_ok) return rc;
    mcr_replication* rep = nullptr;
    mcr_status st = mcr_replicate(cfg.get(), o.replications, o.seed, o.threads, &rep);
    if (st != MCR_OK) return report(st, "replicating");
    std::unique_ptr<mcr_replication, decltype(&mcr_replication_free)> guard(rep, mcr_replication_free);
    if ((st = mcr_replication_write_outputs(rep, o.out.c_str())) != MCR_OK) return report(st, "writing outputs");
    mcr_replication_stats s{};
    mcr_replication_stats_get(rep, &s);
    std::printf("%zu runs: mean accessibility %.6g (sd %.3g), mean travel time %.6g h (sd %.3g)\n", s.n,
                s.mean_accessibility, s.cov_acc_acc > 0 ? std::sqrt(s.cov_acc_acc) : 0.0, s.mean_travel_time,
                s.cov_tt_tt > 0 ? std::sqrt(s.cov_tt_tt) : 0.0);
    return exit_ok;
}

int cmd_sweep(const Options& o) {
    ConfigPtr cfg;
    if (int rc = prepare(o, false, cfg); rc != exit_ok) return rc;
    mcr_sweep* sweep = nullptr;
    mcr_status st = mcr_sweep_create(cfg.get(), &sweep);
    if (st != MCR_OK) return report(st, "preparing sweep");
    std::unique_ptr<mcr_sweep, decltype(&mcr_sweep_free)> guard(sweep, mcr_sweep_free);
    if (!o.xi.empty()) mcr_sweep_set_xi_values(sweep, o.xi.data(), o.xi.size());
    mcr_sweep_set_replications(sweep, o.replications);
    mcr_sweep_set_base_seed(sweep, o.seed);
    std::size_t failures = 0;
    st = mcr_sweep_run(sweep, o.threads, &failures);
    if (st != MCR_OK && st != MCR_ERR_PARTIAL) return report(st, "sweep");
    const mcr_status partial = st;
    if ((st = mcr_sweep_write_outputs(sweep, o.out.c_str())) != MCR_OK) return report(st, "writing outputs");
    if (partial == MCR_ERR_PARTIAL) {
        std::fprintf(stderr, "mcrsim: %zu sweep cells failed; see the status column of sweep.csv\n", failures);
        return exit_partial;
    }
    std::printf("sweep written to %s\n", o.out.c_str());
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Metropolitan land use, transport and governance simulator"};
    app.require_subcommand(1);
    Options opts;
    auto* run = app.add_subcommand("run", "one simulation: history, decisions, final state, maps");
    auto* replicate = app.add_subcommand("replicate", "seed batch: summary statistics and 1-sigma ellipse");
    auto* sweep = app.add_subcommand("sweep", "xi grid x scenario variants: sweep.csv, trend.csv, sweep.svg");
    for (auto* cmd : {run, replicate, sweep}) add_common(cmd, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    if (run->parsed()) return cmd_run(opts);
    if (replicate->parsed()) return cmd_replicate(opts);
    return cmd_sweep(opts);
}
