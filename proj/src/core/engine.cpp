#include "engine.hpp"
#include "log.hpp"
#include "parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace mcr::engine {

TransportPass transport_pass(const world::Metropolis& metropolis, const transport::Network& network,
                             const transport::TravelTimeMatrix& previous_times, const world::ScenarioConfig& config) {
    auto od = transport::distribute(transport::generate_demand(metropolis), previous_times, config.lambda,
                                    config.furness);
    auto assigned = transport::assign_traffic(od.total(), network, config.assignment_iterations);
    return TransportPass{std::move(od), std::move(assigned.network), std::move(assigned.times)};
}

IndicatorRow measure(const world::Metropolis& metropolis, const TransportPass& pass, double nu, int step) {
    IndicatorRow row;
    row.step = step;
    const auto acc = landuse::accessibility(metropolis, pass.times, nu);
    for (double x : acc.aggregate) row.total_accessibility += x;
    row.total_travel_time = transport::total_travel_time(pass.od, pass.times);
    row.link_count = pass.network.link_count();
    row.mayor_objectives.assign(static_cast<std::size_t>(metropolis.mayor_count()), 0.0);
    for (std::size_t c = 0; c < metropolis.size(); ++c) {
        row.mayor_objectives[static_cast<std::size_t>(metropolis.territory(static_cast<int>(c)))] += acc.aggregate[c];
    }
    row.furness_residual = pass.od.max_residual();
    return row;
}

namespace {

void adopt(SimState& state, TransportPass pass, IndicatorRow row) {
    state.network = std::move(pass.network);
    state.times = std::move(pass.times);
    state.history.push_back(std::move(row));
    state.worker_snapshots.push_back(state.metropolis.workers());
}

} // namespace

SimState initial_state(const world::ScenarioConfig& config, std::uint64_t seed) {
    world::validate(config);
    SimState state;
    state.metropolis = world::init_metropolis(config, config.total_workers, config.total_jobs);
    state.network = transport::network_from_config(config);
    state.link_built_step.assign(state.network.link_count(), 0);
    state.rng = Rng(seed);
    state.step = 0;

    const auto start = transport::shortest_times(state.network, transport::LinkTimes::free_flow);
    auto pass = transport_pass(state.metropolis, state.network, start, config);
    auto row = measure(state.metropolis, pass, config.nu, 0);
    adopt(state, std::move(pass), std::move(row));
    return state;
}

void step(SimState& state, const world::ScenarioConfig& config) {
    const int k = state.step + 1;

    // Transport: distribution on last step's times, then assignment.
    auto od = transport::distribute(transport::generate_demand(state.metropolis), state.times, config.lambda,
                                    config.furness);
    const Matrix od_total = od.total();
    auto assigned = transport::assign_traffic(od_total, state.network, config.assignment_iterations);

    // Land use, synchronous on the start-of-step metropolis.
    if (config.landuse_enabled) {
        const auto scores = landuse::score_cells(state.metropolis, assigned.times, config);
        state.metropolis = landuse::relocate(state.metropolis, scores, config.mu, config.relocation_fraction, state.rng);
    }

    // Governance.
    const auto weights = config.mayor_weight_override.empty() ? world::mayor_weights(state.metropolis)
                                                              : config.mayor_weight_override;
    const auto draw = governance::select_stakeholder(config.xi, weights, state.rng);
    auto settings = governance::evaluation_settings(config);
    settings.od = &od_total;
    auto built = governance::decide_and_build(state.metropolis, std::move(assigned.network), draw.who, settings, k);
    built.record.draws = draw.draws;
    if (built.record.chosen) state.link_built_step.push_back(k);
    state.decisions.push_back(std::move(built.record));

    // Indicators on the post-build network.
    auto pass = transport_pass(state.metropolis, built.network, assigned.times, config);
    auto row = measure(state.metropolis, pass, config.nu, k);
    if (!pass.od.converged()) log::info(fmt::format("step {}: gravity residual {:.3e}", k, pass.od.max_residual()));
    state.step = k;
    adopt(state, std::move(pass), std::move(row));
}

RunResult run(const world::ScenarioConfig& config, std::uint64_t seed) {
    RunResult result{config, seed, initial_state(config, seed)};
    for (int s = 0; s < config.steps; ++s) step(result.state, config);
    return result;
}

FinalIndicators final_indicators(const RunResult& run) {
    const auto& last = run.state.history.back();
    return {run.seed, last.total_accessibility, last.total_travel_time};
}

Ellipse covariance_ellipse(const std::array<std::array<double, 2>, 2>& cov) {
    const double a = cov[0][0];
    const double b = cov[0][1];
    const double c = cov[1][1];
    const double mid = 0.5 * (a + c);
    const double rad = std::hypot(0.5 * (a - c), b);
    Ellipse e;
    e.major = std::sqrt(std::max(mid + rad, 0.0));
    e.minor = std::sqrt(std::max(mid - rad, 0.0));
    e.angle = (b == 0.0 && a >= c) ? 0.0 : 0.5 * std::atan2(2.0 * b, a - c);
    return e;
}

ReplicationStats summarize(std::vector<FinalIndicators> finals) {
    std::sort(finals.begin(), finals.end(), [](const auto& x, const auto& y) { return x.seed < y.seed; });
    ReplicationStats st;
    st.n = finals.size();
    if (finals.empty()) return st;
    for (const auto& f : finals) {
        st.mean[0] += f.total_accessibility;
        st.mean[1] += f.total_travel_time;
    }
    const double n = static_cast<double>(finals.size());
    st.mean[0] /= n;
    st.mean[1] /= n;
    if (finals.size() > 1) {
        for (const auto& f : finals) {
            const double dx = f.total_accessibility - st.mean[0];
            const double dy = f.total_travel_time - st.mean[1];
            st.covariance[0][0] += dx * dx;
            st.covariance[0][1] += dx * dy;
            st.covariance[1][1] += dy * dy;
        }
        for (auto& row : st.covariance) {
            for (double& v : row) v /= (n - 1.0);
        }
        st.covariance[1][0] = st.covariance[0][1];
    }
    st.ellipse = covariance_ellipse(st.covariance);
    return st;
}

ReplicationResult replicate(const world::ScenarioConfig& config, int n, std::uint64_t base_seed, unsigned threads) {
    if (n < 1) throw std::invalid_argument("replication count must be >= 1");
    world::validate(config);
    ReplicationResult result;
    result.runs.resize(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
        result.runs[i] = run(config, base_seed + i);
    });
    std::vector<FinalIndicators> finals;
    finals.reserve(result.runs.size());
    for (const auto& r : result.runs) finals.push_back(final_indicators(r));
    result.stats = summarize(std::move(finals));
    return result;
}

} // namespace mcr::engine
