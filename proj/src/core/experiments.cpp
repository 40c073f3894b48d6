#include "experiments.hpp"
#include "outputs.hpp"
#include "parallel.hpp"
#include "svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace mcr::experiments {

std::vector<ScenarioVariant> default_variants() {
    return {
        {"equal_near", 1.0, 4.0},
        {"unequal_near", 3.0, 4.0},
        {"equal_far", 1.0, 6.0},
        {"unequal_far", 3.0, 6.0},
    };
}

std::vector<double> default_xi_grid() { return {0.0, 0.25, 0.5, 0.75, 1.0}; }

world::ScenarioConfig apply_variant(const world::ScenarioConfig& base, const ScenarioVariant& v) {
    if (base.centers.size() != 2) {
        throw world::ConfigError("centers", "scenario variants need exactly two centers");
    }
    if (!(v.weight_ratio > 0.0) || !std::isfinite(v.weight_ratio)) {
        throw world::ConfigError("weight_ratio", fmt::format("variant '{}': ratio must be positive", v.name));
    }
    if (!(v.center_distance >= 0.0) || !std::isfinite(v.center_distance)) {
        throw world::ConfigError("center_distance", fmt::format("variant '{}': distance must be >= 0", v.name));
    }
    world::ScenarioConfig cfg = base;
    const double mid_row = 0.5 * (cfg.grid_rows - 1);
    const double mid_col = 0.5 * (cfg.grid_cols - 1);
    const double half = 0.5 * v.center_distance;
    if (mid_col - half < 0.0 || mid_col + half > cfg.grid_cols - 1) {
        throw world::ConfigError("center_distance", fmt::format("variant '{}': centers leave the grid", v.name));
    }
    cfg.centers[0].position = {mid_row, mid_col + half};
    cfg.centers[1].position = {mid_row, mid_col - half};
    cfg.centers[1].amplitude = cfg.centers[0].amplitude * v.weight_ratio;
    world::validate(cfg);
    return cfg;
}

void validate(const SweepSpec& spec) {
    if (spec.xi_values.empty()) throw world::ConfigError("xi_values", "list is empty");
    for (double xi : spec.xi_values) {
        if (!(xi >= 0.0 && xi <= 1.0)) throw world::ConfigError("xi_values", fmt::format("{} outside [0, 1]", xi));
    }
    if (spec.configurations.empty()) throw world::ConfigError("configurations", "list is empty");
    if (spec.replications < 1) throw world::ConfigError("replications", "must be >= 1");
    std::set<std::string> names;
    for (const auto& v : spec.configurations) {
        if (v.name.empty() || v.name.find_first_of(",\n\r") != std::string::npos) {
            throw world::ConfigError("configurations", fmt::format("bad configuration name '{}'", v.name));
        }
        if (!names.insert(v.name).second) {
            throw world::ConfigError("configurations", fmt::format("duplicate configuration name '{}'", v.name));
        }
        apply_variant(spec.base, v);
    }
}

SweepResult run_sweep(const SweepSpec& spec, unsigned threads) {
    validate(spec);
    const std::size_t per_cell = static_cast<std::size_t>(spec.replications);
    const std::size_t per_config = spec.xi_values.size() * per_cell;
    SweepResult result;
    result.rows.resize(spec.configurations.size() * per_config);

    auto variants = spec.configurations;
    std::stable_sort(variants.begin(), variants.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    std::vector<std::size_t> xi_order(spec.xi_values.size());
    std::iota(xi_order.begin(), xi_order.end(), std::size_t{0});
    std::stable_sort(xi_order.begin(), xi_order.end(),
                     [&](std::size_t a, std::size_t b) { return spec.xi_values[a] < spec.xi_values[b]; });

    parallel_for(result.rows.size(), threads, [&](std::size_t i) {
        const auto& variant = variants[i / per_config];
        const double xi = spec.xi_values[xi_order[(i % per_config) / per_cell]];
        const std::uint64_t seed = spec.base_seed + i % per_cell;
        SweepRow row{variant.name, xi, seed};
        try {
            auto cfg = apply_variant(spec.base, variant);
            cfg.xi = xi;
            const auto fin = engine::final_indicators(engine::run(cfg, seed));
            row.total_accessibility = fin.total_accessibility;
            row.total_travel_time = fin.total_travel_time;
        } catch (const std::exception& e) {
            row.status = fmt::format("error: {}", e.what());
            std::replace(row.status.begin(), row.status.end(), ',', ';');
            std::replace(row.status.begin(), row.status.end(), '\n', ' ');
            row.total_accessibility = std::numeric_limits<double>::quiet_NaN();
            row.total_travel_time = std::numeric_limits<double>::quiet_NaN();
        }
        result.rows[i] = std::move(row);
    });
    for (const auto& r : result.rows) result.failures += r.ok() ? 0 : 1;
    result.trends = sweep_trends(result.rows);
    return result;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
        i = j + 1;
    }
    return rank;
}

} // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("spearman: size mismatch");
    const std::size_t n = x.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double mean = 0.5 * static_cast<double>(n + 1);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mean) * (ry[i] - mean);
        sxx += (rx[i] - mean) * (rx[i] - mean);
        syy += (ry[i] - mean) * (ry[i] - mean);
    }
    if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

std::vector<ConfigurationCurve> sweep_curves(const std::vector<SweepRow>& rows) {
    std::vector<ConfigurationCurve> curves;
    for (const auto& r : rows) {
        if (!r.ok()) continue;
        auto cit = std::find_if(curves.begin(), curves.end(),
                                [&](const auto& c) { return c.configuration == r.configuration; });
        if (cit == curves.end()) {
            curves.push_back({r.configuration, {}});
            cit = std::prev(curves.end());
        }
        auto pit = std::find_if(cit->points.begin(), cit->points.end(), [&](const auto& p) { return p.xi == r.xi; });
        if (pit == cit->points.end()) {
            cit->points.push_back({r.xi, 0.0, 0});
            pit = std::prev(cit->points.end());
        }
        pit->mean_accessibility += r.total_accessibility;
        ++pit->runs;
    }
    for (auto& c : curves) {
        for (auto& p : c.points) p.mean_accessibility /= static_cast<double>(p.runs);
        std::stable_sort(c.points.begin(), c.points.end(), [](const auto& a, const auto& b) { return a.xi < b.xi; });
    }
    return curves;
}

std::vector<TrendRow> sweep_trends(const std::vector<SweepRow>& rows) {
    std::vector<TrendRow> out;
    for (const auto& c : sweep_curves(rows)) {
        std::vector<double> xs;
        std::vector<double> ys;
        for (const auto& p : c.points) {
            xs.push_back(p.xi);
            ys.push_back(p.mean_accessibility);
        }
        out.push_back({c.configuration, spearman(xs, ys), c.points.size()});
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "configuration,xi,seed,total_accessibility,total_travel_time,status\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{}\n", r.configuration, r.xi, r.seed, r.total_accessibility,
                           r.total_travel_time, r.status);
    }
    return out;
}

std::string trend_csv(const std::vector<TrendRow>& trends) {
    std::string out = "configuration,spearman,points\n";
    for (const auto& t : trends) out += fmt::format("{},{},{}\n", t.configuration, t.spearman, t.points);
    return out;
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
    std::vector<SweepRow> rows;
    for (const auto& f : outputs::split_csv(text)) {
        if (f.size() < 6) throw std::runtime_error("sweep.csv: expected 6 fields");
        rows.push_back({f[0], std::stod(f[1]), std::stoull(f[2]), std::stod(f[3]), std::stod(f[4]), f[5]});
    }
    return rows;
}

std::string sweep_svg(const std::vector<SweepRow>& rows) {
    std::vector<svg::Curve> curves;
    for (const auto& c : sweep_curves(rows)) {
        svg::Curve curve{c.configuration, {}};
        for (const auto& p : c.points) curve.points.push_back({p.xi, p.mean_accessibility});
        curves.push_back(std::move(curve));
    }
    return svg::render_curves(curves, "share of local decisions (xi)", "mean final total accessibility",
                              "final accessibility vs xi");
}

void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir) {
    outputs::ensure_directory(dir);
    const std::string csv = sweep_csv(result.rows);
    outputs::write_text(dir / "sweep.csv", csv);
    outputs::write_text(dir / "trend.csv", trend_csv(result.trends));
    outputs::write_text(dir / "sweep.svg", sweep_svg(parse_sweep_csv(csv)));
}

std::string replicate_summary_csv(const engine::ReplicationStats& s) {
    std::string out = "n,mean_accessibility,mean_travel_time,cov_acc_acc,cov_acc_tt,cov_tt_tt,"
                      "ellipse_major,ellipse_minor,ellipse_angle\n";
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", s.n, s.mean[0], s.mean[1], s.covariance[0][0],
                       s.covariance[0][1], s.covariance[1][1], s.ellipse.major, s.ellipse.minor, s.ellipse.angle);
    return out;
}

std::string replicate_runs_csv(const std::vector<engine::FinalIndicators>& finals) {
    std::string out = "seed,total_accessibility,total_travel_time\n";
    for (const auto& f : finals) out += fmt::format("{},{},{}\n", f.seed, f.total_accessibility, f.total_travel_time);
    return out;
}

engine::ReplicationStats parse_replicate_summary_csv(const std::string& text) {
    const auto rows = outputs::split_csv(text);
    if (rows.size() != 1 || rows[0].size() < 9) throw std::runtime_error("replicate_summary.csv: malformed");
    const auto& f = rows[0];
    engine::ReplicationStats s;
    s.n = std::stoul(f[0]);
    s.mean = {std::stod(f[1]), std::stod(f[2])};
    s.covariance[0][0] = std::stod(f[3]);
    s.covariance[0][1] = s.covariance[1][0] = std::stod(f[4]);
    s.covariance[1][1] = std::stod(f[5]);
    s.ellipse = {std::stod(f[6]), std::stod(f[7]), std::stod(f[8])};
    return s;
}

std::vector<engine::FinalIndicators> parse_replicate_runs_csv(const std::string& text) {
    std::vector<engine::FinalIndicators> out;
    for (const auto& f : outputs::split_csv(text)) {
        if (f.size() < 3) throw std::runtime_error("replicate_runs.csv: expected 3 fields");
        out.push_back({std::stoull(f[0]), std::stod(f[1]), std::stod(f[2])});
    }
    return out;
}

std::string ellipse_svg(const engine::ReplicationStats& s, const std::vector<engine::FinalIndicators>& finals) {
    svg::EllipseGroup g;
    g.label = fmt::format("n = {}", s.n);
    g.ellipse = {{s.mean[0], s.mean[1]}, s.covariance[0][0], s.covariance[0][1], s.covariance[1][1]};
    for (const auto& f : finals) g.runs.push_back({f.total_accessibility, f.total_travel_time});
    return svg::render_ellipses({g}, "final indicators, 1-sigma ellipse");
}

void write_replicate_outputs(const engine::ReplicationResult& result, const std::filesystem::path& dir) {
    outputs::ensure_directory(dir);
    outputs::ensure_directory(dir / "runs");
    std::vector<engine::FinalIndicators> finals;
    for (const auto& r : result.runs) {
        finals.push_back(engine::final_indicators(r));
        outputs::write_text(dir / "runs" / fmt::format("history_seed_{}.csv", r.seed),
                            outputs::history_csv(r.state));
    }
    const std::string summary = replicate_summary_csv(result.stats);
    const std::string runs = replicate_runs_csv(finals);
    outputs::write_text(dir / "replicate_summary.csv", summary);
    outputs::write_text(dir / "replicate_runs.csv", runs);
    outputs::write_text(dir / "ellipse.svg",
                        ellipse_svg(parse_replicate_summary_csv(summary), parse_replicate_runs_csv(runs)));
}

} // namespace mcr::experiments
