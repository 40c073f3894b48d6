#pragma once

#include "matrix.hpp"
#include "world.hpp"

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcr::transport {

using world::Grid;

/// Undirected regional road between two cell centroids.
struct Link {
    int from = 0;
    int to = 0;
    double length_km = 0.0;
    double v_link = 0.0;   // km/h
    double capacity = 0.0; // veh/step
    double flow = 0.0;     // veh/step, both directions
    double congested_time = 0.0;

    double free_flow_time() const { return length_km / v_link; }
};

struct VolumeDelay {
    double alpha = 0.15;
    double beta = 4.0;
};

/// t0 · (1 + α (flow/capacity)^β)
double bpr_time(double t0, double flow, double capacity, double alpha, double beta);

/// Regional road graph over cell centroids, layered over the implicit local
/// road grid (straight-line travel at v_local, never congested).
class Network {
public:
    Network() = default;
    Network(Grid grid, double v_local, VolumeDelay volume_delay = {});

    const Grid& grid() const { return grid_; }
    double v_local() const { return v_local_; }
    const VolumeDelay& volume_delay() const { return volume_delay_; }
    std::size_t node_count() const { return grid_.size(); }

    const std::vector<Link>& links() const { return links_; }
    std::size_t link_count() const { return links_.size(); }
    std::optional<std::size_t> find_link(int a, int b) const;
    bool has_link(int a, int b) const { return find_link(a, b).has_value(); }
    /// Number of regional links incident to `node`.
    int degree(int node) const { return static_cast<int>(adjacency_[static_cast<std::size_t>(node)].size()); }

    /// Adds an undirected link at free-flow time; throws std::invalid_argument
    /// on self loops, duplicates or endpoints outside the grid.
    std::size_t add_link(int a, int b, double v_link, double capacity);

    /// Sets a link's flow and refreshes its congested time.
    void set_flow(std::size_t link, double flow);
    void reset_flows();

    struct Arc {
        int to;
        std::size_t link;
    };
    std::span<const Arc> arcs(int node) const { return adjacency_[static_cast<std::size_t>(node)]; }

    double afc_time(int a, int b) const { return (*afc_km_)(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) / v_local_; }
    double intra_cell_time() const { return 0.5 * grid_.cell_size_km / v_local_; }

    std::vector<world::LinkSpec> link_specs() const;

private:
    Grid grid_;
    double v_local_ = 1.0;
    VolumeDelay volume_delay_;
    std::shared_ptr<const Matrix> afc_km_; // centroid distances, shared between copies
    std::vector<Link> links_;
    std::vector<std::vector<Arc>> adjacency_;
};

Network network_from_config(const world::ScenarioConfig& config);
Network network_from_json_text(const std::string& text, const world::ScenarioConfig& config);
std::string network_to_json_text(const Network& network);

/// Door-to-door travel times in hours. The diagonal holds the intra-cell
/// floor, never zero.
struct TravelTimeMatrix {
    Matrix hours;
    bool symmetric = true;

    std::size_t size() const { return hours.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return hours(i, j); }
};

enum class LinkTimes { congested, free_flow };

/// Least-time distances with a zero diagonal over the complete local-road
/// graph plus regional links. Row i is a dense Dijkstra from cell i.
Matrix network_distances(const Network& network, LinkTimes times = LinkTimes::congested);

/// Replaces the diagonal of raw distances with the intra-cell floor.
TravelTimeMatrix with_intra_cell_floor(Matrix raw, double floor);

TravelTimeMatrix shortest_times(const Network& network, LinkTimes times = LinkTimes::congested);

/// Straight-line local-road times only (empty regional network).
TravelTimeMatrix afc_times(const Network& network);

// --- demand ----------------------------------------------------------------

struct Demand {
    Matrix origins;      // N×S workers
    Matrix destinations; // N×S jobs
    std::vector<bool> active;
};

/// Commuting trip ends per zone and category. A category with workers but
/// no jobs (or the reverse) is inactive and logged.
Demand generate_demand(const world::Metropolis& metropolis);

struct GravityResult {
    Matrix flows;
    std::vector<double> p;
    std::vector<double> q;
    double residual = 0.0; // max relative marginal error
    int iterations = 0;
    bool converged = true;
};

/// Doubly constrained gravity model Φ_ij = p_i q_j A_i E_j exp(-λ d_ij)
/// balanced by alternating p/q updates. Throws std::invalid_argument when
/// the marginal totals differ by more than 1e-6 relative.
GravityResult furness_distribution(std::span<const double> origins, std::span<const double> destinations,
                                   const TravelTimeMatrix& times, double lambda, double tolerance, int max_iter);

struct ODMatrix {
    std::vector<GravityResult> categories;
    Matrix origins;
    Matrix destinations; // after rescaling to the origin totals

    Matrix total() const;
    double max_residual() const;
    bool converged() const;
};

/// Runs the gravity model for every active category, rescaling destinations
/// to the origin total first. Non-convergence is logged, not thrown.
ODMatrix distribute(const Demand& demand, const TravelTimeMatrix& times, double lambda,
                    const world::FurnessParams& furness);

// --- assignment -------------------------------------------------------------

/// Loads one OD matrix all-or-nothing on current least-time paths (equal
/// split at exact ties). Returns per-link loads; straight-line legs carry
/// nothing.
std::vector<double> all_or_nothing(const Matrix& od, const Network& network);

struct AssignmentResult {
    Network network;
    TravelTimeMatrix times;
};

/// Capacity-restrained assignment by successive averages: `iterations`
/// rounds of all-or-nothing loading, each blended with weight 1/k and
/// followed by a BPR update. Flows start from zero.
AssignmentResult assign_traffic(const Matrix& od, Network network, int iterations);

double total_travel_time(const Matrix& od, const TravelTimeMatrix& times);
double total_travel_time(const ODMatrix& od, const TravelTimeMatrix& times);

/// `row,col,value` lines with a header.
void write_matrix_csv(std::ostream& out, const Matrix& m);

} // namespace mcr::transport
