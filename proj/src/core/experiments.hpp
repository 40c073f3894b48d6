#pragma once

#include "engine.hpp"
#include "world.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mcr::experiments {

/// Named two-center layout: centers on the middle row, `center_distance`
/// cells apart, center 1 carrying `weight_ratio` times center 0's amplitude.
struct ScenarioVariant {
    std::string name;
    double weight_ratio = 1.0;
    double center_distance = 5.0;
};

std::vector<ScenarioVariant> default_variants();
std::vector<double> default_xi_grid();

/// Throws world::ConfigError when the base has other than two centers or the
/// layout leaves the grid.
world::ScenarioConfig apply_variant(const world::ScenarioConfig& base, const ScenarioVariant& variant);

struct SweepSpec {
    world::ScenarioConfig base = world::default_config();
    std::vector<double> xi_values = default_xi_grid();
    std::vector<ScenarioVariant> configurations = default_variants();
    int replications = 30;
    std::uint64_t base_seed = 1;
};

void validate(const SweepSpec& spec);

struct SweepRow {
    std::string configuration;
    double xi = 0.0;
    std::uint64_t seed = 0;
    double total_accessibility = 0.0;
    double total_travel_time = 0.0;
    std::string status = "ok"; // "ok" or "error: ..."

    bool ok() const { return status == "ok"; }
};

struct TrendRow {
    std::string configuration;
    double spearman = 0.0;
    std::size_t points = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows; // configuration name, ξ, seed ascending
    std::vector<TrendRow> trends;
    std::size_t failures = 0;
};

SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 0);

/// Rank correlation with average ranks for ties. NaN when either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

/// Mean final accessibility per (configuration, ξ) over successful rows,
/// in first-appearance order.
struct CurvePoint {
    double xi = 0.0;
    double mean_accessibility = 0.0;
    std::size_t runs = 0;
};
struct ConfigurationCurve {
    std::string configuration;
    std::vector<CurvePoint> points;
};
std::vector<ConfigurationCurve> sweep_curves(const std::vector<SweepRow>& rows);
std::vector<TrendRow> sweep_trends(const std::vector<SweepRow>& rows);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string trend_csv(const std::vector<TrendRow>& trends);
std::vector<SweepRow> parse_sweep_csv(const std::string& text);
std::string sweep_svg(const std::vector<SweepRow>& rows);

/// sweep.csv, trend.csv, sweep.svg.
void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir);

// Replication artifacts.
std::string replicate_summary_csv(const engine::ReplicationStats& stats);
std::string replicate_runs_csv(const std::vector<engine::FinalIndicators>& finals);
engine::ReplicationStats parse_replicate_summary_csv(const std::string& text);
std::vector<engine::FinalIndicators> parse_replicate_runs_csv(const std::string& text);
std::string ellipse_svg(const engine::ReplicationStats& stats, const std::vector<engine::FinalIndicators>& finals);

/// replicate_summary.csv, replicate_runs.csv, ellipse.svg and
/// runs/history_seed_{k}.csv.
void write_replicate_outputs(const engine::ReplicationResult& result, const std::filesystem::path& dir);

} // namespace mcr::experiments
