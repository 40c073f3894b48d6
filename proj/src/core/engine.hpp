#pragma once

#include "governance.hpp"
#include "landuse.hpp"
#include "matrix.hpp"
#include "rng.hpp"
#include "transport.hpp"
#include "world.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace mcr::engine {

struct IndicatorRow {
    int step = 0;
    double total_accessibility = 0.0;
    double total_travel_time = 0.0; // hours
    std::size_t link_count = 0;
    std::vector<double> mayor_objectives;
    double furness_residual = 0.0;
};

struct SimState {
    world::Metropolis metropolis;
    transport::Network network;        // flows from the latest assignment
    transport::TravelTimeMatrix times; // congested times from the latest assignment
    int step = 0;
    Rng rng{0};
    std::vector<IndicatorRow> history;
    std::vector<governance::DecisionRecord> decisions;
    std::vector<Matrix> worker_snapshots; // one per history row
    std::vector<int> link_built_step;     // parallel to network.links(); 0 for pre-seeded links
};

/// Transport results at the end of a step: distribution on the previous
/// times followed by assignment on the current network.
struct TransportPass {
    transport::ODMatrix od;
    transport::Network network;
    transport::TravelTimeMatrix times;
};

TransportPass transport_pass(const world::Metropolis& metropolis, const transport::Network& network,
                             const transport::TravelTimeMatrix& previous_times, const world::ScenarioConfig& config);

IndicatorRow measure(const world::Metropolis& metropolis, const TransportPass& pass, double nu, int step);

/// Validated config → initial metropolis, seeded network, initial snapshot.
SimState initial_state(const world::ScenarioConfig& config, std::uint64_t seed);

/// One time step: distribution, assignment, relocation (if enabled),
/// one governance build, indicators.
void step(SimState& state, const world::ScenarioConfig& config);

struct RunResult {
    world::ScenarioConfig config;
    std::uint64_t seed = 0;
    SimState state;
};

RunResult run(const world::ScenarioConfig& config, std::uint64_t seed);

struct FinalIndicators {
    std::uint64_t seed = 0;
    double total_accessibility = 0.0;
    double total_travel_time = 0.0;
};

struct Ellipse {
    double major = 0.0; // 1-σ semi-axes
    double minor = 0.0;
    double angle = 0.0; // radians, major axis from the accessibility axis
};

/// Mean and sample covariance of (total accessibility, total travel time).
struct ReplicationStats {
    std::size_t n = 0;
    std::array<double, 2> mean{};
    std::array<std::array<double, 2>, 2> covariance{};
    Ellipse ellipse;
};

ReplicationStats summarize(std::vector<FinalIndicators> finals);
Ellipse covariance_ellipse(const std::array<std::array<double, 2>, 2>& covariance);
FinalIndicators final_indicators(const RunResult& run);

struct ReplicationResult {
    ReplicationStats stats;
    std::vector<RunResult> runs; // ascending seed
};

/// Runs seeds base_seed .. base_seed+n-1 on up to `threads` workers
/// (0 = hardware concurrency).
ReplicationResult replicate(const world::ScenarioConfig& config, int n, std::uint64_t base_seed, unsigned threads = 0);

} // namespace mcr::engine
