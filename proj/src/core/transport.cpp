#include "transport.hpp"
#include "log.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace mcr::transport {

double bpr_time(double t0, double flow, double capacity, double alpha, double beta) {
    if (flow <= 0.0) return t0;
    return t0 * (1.0 + alpha * std::pow(flow / capacity, beta));
}

Network::Network(Grid grid, double v_local, VolumeDelay volume_delay)
    : grid_(grid), v_local_(v_local), volume_delay_(volume_delay), adjacency_(grid.size()) {
    const std::size_t n = grid.size();
    auto afc = std::make_shared<Matrix>(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = grid.distance_km(static_cast<int>(i), static_cast<int>(j));
            (*afc)(i, j) = d;
            (*afc)(j, i) = d;
        }
    }
    afc_km_ = std::move(afc);
}

std::optional<std::size_t> Network::find_link(int a, int b) const {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= node_count()) return std::nullopt;
    for (const Arc& arc : adjacency_[static_cast<std::size_t>(a)]) {
        if (arc.to == b) return arc.link;
    }
    return std::nullopt;
}

std::size_t Network::add_link(int a, int b, double v_link, double capacity) {
    const auto n = static_cast<int>(node_count());
    if (a < 0 || b < 0 || a >= n || b >= n) throw std::invalid_argument("link endpoint outside the grid");
    if (a == b) throw std::invalid_argument("self loop");
    if (has_link(a, b)) throw std::invalid_argument(fmt::format("duplicate link {}-{}", a, b));
    if (!(v_link > 0.0) || !(capacity > 0.0)) throw std::invalid_argument("link speed and capacity must be positive");
    Link link;
    link.from = std::min(a, b);
    link.to = std::max(a, b);
    link.length_km = grid_.distance_km(a, b);
    link.v_link = v_link;
    link.capacity = capacity;
    link.congested_time = link.free_flow_time();
    links_.push_back(link);
    const std::size_t id = links_.size() - 1;
    adjacency_[static_cast<std::size_t>(a)].push_back({b, id});
    adjacency_[static_cast<std::size_t>(b)].push_back({a, id});
    return id;
}

void Network::set_flow(std::size_t link, double flow) {
    Link& l = links_.at(link);
    l.flow = flow;
    l.congested_time = bpr_time(l.free_flow_time(), flow, l.capacity, volume_delay_.alpha, volume_delay_.beta);
}

void Network::reset_flows() {
    for (auto& l : links_) {
        l.flow = 0.0;
        l.congested_time = l.free_flow_time();
    }
}

std::vector<world::LinkSpec> Network::link_specs() const {
    std::vector<world::LinkSpec> specs;
    specs.reserve(links_.size());
    for (const auto& l : links_) specs.push_back({l.from, l.to, l.capacity, l.v_link});
    return specs;
}

Network network_from_config(const world::ScenarioConfig& config) {
    Network net(world::grid_of(config), config.v_local, {config.bpr_alpha, config.bpr_beta});
    for (const auto& l : config.initial_links) net.add_link(l.from, l.to, l.v_link, l.capacity);
    return net;
}

Network network_from_json_text(const std::string& text, const world::ScenarioConfig& config) {
    Network net(world::grid_of(config), config.v_local, {config.bpr_alpha, config.bpr_beta});
    for (const auto& l : world::link_list_from_json_text(text)) net.add_link(l.from, l.to, l.v_link, l.capacity);
    return net;
}

std::string network_to_json_text(const Network& network) {
    return world::link_list_to_json_text(network.link_specs());
}

// --- shortest paths ------------------------------------------------------------

namespace {

double link_time(const Link& l, LinkTimes times) {
    return times == LinkTimes::free_flow ? l.free_flow_time() : l.congested_time;
}

// Shortest paths over the complete straight-line graph plus regional arcs.
// Straight-line legs obey the triangle inequality, so a least-time path only
// turns at link endpoints: Dijkstra runs over the source and the link
// endpoints ("key" nodes) and every other cell is reached by one final
// straight-line leg from one of them.
class KeyPaths {
public:
    KeyPaths(const Network& net, LinkTimes times) : net_(net), times_(times), slot_(net.node_count(), -1) {
        for (int v = 0; v < static_cast<int>(net.node_count()); ++v) {
            if (net.degree(v) > 0) {
                slot_[static_cast<std::size_t>(v)] = static_cast<int>(keys_.size());
                keys_.push_back(v);
            }
        }
    }

    /// Fills nodes()/key_dist() for `source` and the full distance row.
    void solve(int source, std::span<double> dist) {
        nodes_ = keys_;
        source_slot_ = slot_[static_cast<std::size_t>(source)];
        if (source_slot_ < 0) {
            source_slot_ = static_cast<int>(nodes_.size());
            nodes_.push_back(source);
        }
        const std::size_t m = nodes_.size();
        key_dist_.assign(m, std::numeric_limits<double>::infinity());
        settled_.assign(m, 0);
        key_dist_[static_cast<std::size_t>(source_slot_)] = 0.0;
        for (std::size_t round = 0; round < m; ++round) {
            std::size_t u = m;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < m; ++k) {
                if (!settled_[k] && key_dist_[k] < best) {
                    best = key_dist_[k];
                    u = k;
                }
            }
            if (u == m) break;
            settled_[u] = 1;
            const int un = nodes_[u];
            for (std::size_t k = 0; k < m; ++k) {
                if (settled_[k]) continue;
                const double cand = best + net_.afc_time(un, nodes_[k]);
                if (cand < key_dist_[k]) key_dist_[k] = cand;
            }
            for (const auto& arc : net_.arcs(un)) {
                const auto k = static_cast<std::size_t>(slot_[static_cast<std::size_t>(arc.to)]);
                if (settled_[k]) continue;
                const double cand = best + link_time(net_.links()[arc.link], times_);
                if (cand < key_dist_[k]) key_dist_[k] = cand;
            }
        }
        for (std::size_t v = 0; v < dist.size(); ++v) {
            double d = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < m; ++k) {
                d = std::min(d, key_dist_[k] + net_.afc_time(nodes_[k], static_cast<int>(v)));
            }
            dist[v] = d;
        }
        dist[static_cast<std::size_t>(source)] = 0.0;
    }

    std::span<const int> nodes() const { return nodes_; }
    std::span<const double> key_dist() const { return key_dist_; }
    int source_slot() const { return source_slot_; }
    int slot(int node) const { return slot_[static_cast<std::size_t>(node)]; }

private:
    const Network& net_;
    LinkTimes times_;
    std::vector<int> slot_; // node → index in keys_, or -1
    std::vector<int> keys_;
    std::vector<int> nodes_;
    int source_slot_ = -1;
    std::vector<double> key_dist_;
    std::vector<char> settled_;
};

} // namespace

Matrix network_distances(const Network& network, LinkTimes times) {
    const std::size_t n = network.node_count();
    Matrix dist(n, n);
    KeyPaths paths(network, times);
    for (std::size_t s = 0; s < n; ++s) paths.solve(static_cast<int>(s), dist.row(s));
    return dist;
}

TravelTimeMatrix with_intra_cell_floor(Matrix raw, double floor) {
    for (std::size_t i = 0; i < raw.rows(); ++i) raw(i, i) = floor;
    return TravelTimeMatrix{std::move(raw), true};
}

TravelTimeMatrix shortest_times(const Network& network, LinkTimes times) {
    return with_intra_cell_floor(network_distances(network, times), network.intra_cell_time());
}

TravelTimeMatrix afc_times(const Network& network) {
    const std::size_t n = network.node_count();
    Matrix raw(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) raw(i, j) = network.afc_time(static_cast<int>(i), static_cast<int>(j));
        }
    }
    return with_intra_cell_floor(std::move(raw), network.intra_cell_time());
}

// --- demand & distribution --------------------------------------------------------

Demand generate_demand(const world::Metropolis& metropolis) {
    Demand d{metropolis.workers(), metropolis.jobs(), std::vector<bool>(static_cast<std::size_t>(metropolis.categories()))};
    for (int s = 0; s < metropolis.categories(); ++s) {
        const double a = metropolis.total_workers(s);
        const double e = metropolis.total_jobs(s);
        const bool has_a = a > 0.0;
        const bool has_e = e > 0.0;
        d.active[static_cast<std::size_t>(s)] = has_a && has_e;
        if (has_a != has_e) {
            log::warn(fmt::format("category {} has {} but no {}; no trips generated", s,
                                  has_a ? "workers" : "jobs", has_a ? "jobs" : "workers"));
        }
    }
    return d;
}

GravityResult furness_distribution(std::span<const double> origins, std::span<const double> destinations,
                                   const TravelTimeMatrix& times, double lambda, double tolerance, int max_iter) {
    const std::size_t n = origins.size();
    if (destinations.size() != n || times.size() != n) throw std::invalid_argument("gravity model dimension mismatch");
    if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");

    const double total_a = std::accumulate(origins.begin(), origins.end(), 0.0);
    const double total_e = std::accumulate(destinations.begin(), destinations.end(), 0.0);
    if (std::abs(total_a - total_e) > 1e-6 * std::max(total_a, total_e)) {
        throw std::invalid_argument(fmt::format("unbalanced marginals: {} origins vs {} destinations", total_a, total_e));
    }

    GravityResult r;
    r.flows = Matrix(n, n);
    r.p.assign(n, 1.0);
    r.q.assign(n, 1.0);
    if (total_a <= 0.0) return r;

    Matrix impedance(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) impedance(i, j) = std::exp(-lambda * times(i, j));
    }

    const double floor_a = 1e-12 * total_a;
    auto relative_error = [&](double sum, double target) { return std::abs(sum - target) / std::max(target, floor_a); };

    r.converged = false;
    for (int it = 1; it <= max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double denom = 0.0;
            for (std::size_t l = 0; l < n; ++l) denom += r.q[l] * destinations[l] * impedance(i, l);
            r.p[i] = denom > 0.0 ? 1.0 / denom : 0.0;
        }
        for (std::size_t j = 0; j < n; ++j) {
            double denom = 0.0;
            for (std::size_t k = 0; k < n; ++k) denom += r.p[k] * origins[k] * impedance(k, j);
            r.q[j] = denom > 0.0 ? 1.0 / denom : 0.0;
        }

        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                r.flows(i, j) = r.p[i] * r.q[j] * origins[i] * destinations[j] * impedance(i, j);
            }
        }
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) err = std::max(err, relative_error(r.flows.row_sum(i), origins[i]));
        for (std::size_t j = 0; j < n; ++j) err = std::max(err, relative_error(r.flows.column_sum(j), destinations[j]));
        r.residual = err;
        r.iterations = it;
        if (err < tolerance) {
            r.converged = true;
            break;
        }
    }
    return r;
}

Matrix ODMatrix::total() const {
    const std::size_t n = origins.rows();
    Matrix t(n, n);
    for (const auto& cat : categories) {
        auto dst = t.values();
        auto src = cat.flows.values();
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    }
    return t;
}

double ODMatrix::max_residual() const {
    double r = 0.0;
    for (const auto& c : categories) r = std::max(r, c.residual);
    return r;
}

bool ODMatrix::converged() const {
    return std::all_of(categories.begin(), categories.end(), [](const GravityResult& c) { return c.converged; });
}

ODMatrix distribute(const Demand& demand, const TravelTimeMatrix& times, double lambda,
                    const world::FurnessParams& furness) {
    const std::size_t n = demand.origins.rows();
    const std::size_t S = demand.origins.cols();
    ODMatrix od;
    od.origins = demand.origins;
    od.destinations = demand.destinations;
    od.categories.resize(S);
    std::vector<double> a(n), e(n);
    for (std::size_t s = 0; s < S; ++s) {
        if (!demand.active[s]) {
            od.categories[s].flows = Matrix(n, n);
            od.categories[s].p.assign(n, 0.0);
            od.categories[s].q.assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                od.origins(i, s) = 0.0;
                od.destinations(i, s) = 0.0;
            }
            continue;
        }
        const double total_a = demand.origins.column_sum(s);
        const double total_e = demand.destinations.column_sum(s);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = demand.origins(i, s);
            e[i] = demand.destinations(i, s) * (total_a / total_e);
            od.destinations(i, s) = e[i];
        }
        od.categories[s] = furness_distribution(a, e, times, lambda, furness.tolerance, furness.max_iter);
        if (!od.categories[s].converged) {
            log::warn(fmt::format("gravity model for category {} stopped after {} iterations, residual {:.3e}", s,
                                  od.categories[s].iterations, od.categories[s].residual));
        }
    }
    return od;
}

// --- assignment --------------------------------------------------------------------

std::vector<double> all_or_nothing(const Matrix& od, const Network& network) {
    const std::size_t n = network.node_count();
    std::vector<double> loads(network.link_count(), 0.0);
    if (network.link_count() == 0) return loads;

    KeyPaths paths(network, LinkTimes::congested);
    std::vector<double> dist(n);
    std::vector<double> key_inflow;
    std::vector<std::size_t> order;
    std::vector<std::size_t> tight;

    // Flow to a destination is split equally over its tight predecessors,
    // walking back through key nodes in decreasing distance. Straight-line
    // hops through intermediate plain cells are collapsed (they carry no link
    // load either way).
    for (std::size_t origin = 0; origin < n; ++origin) {
        bool any = false;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != origin && od(origin, j) > 0.0) {
                any = true;
                break;
            }
        }
        if (!any) continue;

        paths.solve(static_cast<int>(origin), dist);
        const auto nodes = paths.nodes();
        const auto kd = paths.key_dist();
        const std::size_t m = nodes.size();
        const auto src = static_cast<std::size_t>(paths.source_slot());
        key_inflow.assign(m, 0.0);

        auto spread = [&](int v, double dv, double amount, std::size_t v_slot) {
            const double tol = 1e-12 * std::max(1.0, dv);
            tight.clear();
            for (std::size_t k = 0; k < m; ++k) {
                if (k == v_slot || !(kd[k] < dv)) continue;
                if (kd[k] + network.afc_time(nodes[k], v) <= dv + tol) tight.push_back(k);
            }
            const std::size_t via_afc = tight.size();
            if (v_slot < m) {
                for (const auto& arc : network.arcs(v)) {
                    const auto k = static_cast<std::size_t>(paths.slot(arc.to));
                    const double t = network.links()[arc.link].congested_time;
                    if (t < network.afc_time(arc.to, v) && kd[k] < dv && kd[k] + t <= dv + tol) {
                        tight.push_back(m + arc.link); // encoded link predecessor
                    }
                }
            }
            if (tight.empty()) return;
            const double share = amount / static_cast<double>(tight.size());
            for (std::size_t i = 0; i < tight.size(); ++i) {
                std::size_t k = tight[i];
                if (i >= via_afc) {
                    const std::size_t link = k - m;
                    loads[link] += share;
                    const Link& l = network.links()[link];
                    k = static_cast<std::size_t>(paths.slot(l.from == v ? l.to : l.from));
                }
                if (k != src) key_inflow[k] += share;
            }
        };

        for (std::size_t v = 0; v < n; ++v) {
            if (v == origin || od(origin, v) <= 0.0) continue;
            const int slot = paths.slot(static_cast<int>(v));
            if (slot >= 0) {
                key_inflow[static_cast<std::size_t>(slot)] += od(origin, v);
            } else {
                spread(static_cast<int>(v), dist[v], od(origin, v), m);
            }
        }
        order.resize(m);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            return kd[x] != kd[y] ? kd[x] > kd[y] : x > y;
        });
        for (std::size_t k : order) {
            if (k == src || key_inflow[k] <= 0.0) continue;
            spread(nodes[k], kd[k], key_inflow[k], k);
        }
    }
    return loads;
}

AssignmentResult assign_traffic(const Matrix& od, Network network, int iterations) {
    if (iterations < 1) throw std::invalid_argument("assignment needs at least one iteration");
    network.reset_flows();
    if (network.link_count() > 0) {
        for (int k = 1; k <= iterations; ++k) {
            const auto loads = all_or_nothing(od, network);
            for (std::size_t l = 0; l < loads.size(); ++l) {
                const double prev = network.links()[l].flow;
                network.set_flow(l, prev + (loads[l] - prev) / static_cast<double>(k));
            }
        }
    }
    auto times = shortest_times(network, LinkTimes::congested);
    return AssignmentResult{std::move(network), std::move(times)};
}

double total_travel_time(const Matrix& od, const TravelTimeMatrix& times) {
    double total = 0.0;
    for (std::size_t i = 0; i < od.rows(); ++i) {
        for (std::size_t j = 0; j < od.cols(); ++j) total += od(i, j) * times(i, j);
    }
    return total;
}

double total_travel_time(const ODMatrix& od, const TravelTimeMatrix& times) {
    double total = 0.0;
    for (const auto& c : od.categories) total += total_travel_time(c.flows, times);
    return total;
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
    out << "row,col,value\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out << fmt::format("{},{},{}\n", i, j, m(i, j));
    }
}

} // namespace mcr::transport
