#include "governance.hpp"
#include "landuse.hpp"
#include "log.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mcr::governance {

std::vector<int> territory(const world::Metropolis& metropolis, const Stakeholder& who) {
    if (who.is_mayor()) {
        if (who.mayor < 0 || who.mayor >= metropolis.mayor_count()) throw std::out_of_range("mayor index");
        return metropolis.territory_cells(who.mayor);
    }
    std::vector<int> all(metropolis.size());
    std::iota(all.begin(), all.end(), 0);
    return all;
}

StakeholderDraw select_stakeholder(double xi, std::span<const double> weights, Rng& rng) {
    if (xi < 0.0 || xi > 1.0) throw std::invalid_argument("xi must lie in [0, 1]");
    StakeholderDraw out;
    const double level = rng.uniform();
    out.draws.push_back(level);
    if (!(level < xi)) return out;

    if (weights.empty()) throw std::invalid_argument("local decision needs at least one mayor");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("mayor weights must be nonnegative");
        total += w;
    }
    const double pick = rng.uniform();
    out.draws.push_back(pick);
    if (total <= 0.0) {
        out.degenerate_weights = true;
        log::warn("all mayor weights are zero; drawing a mayor uniformly");
        const auto i = std::min(static_cast<std::size_t>(pick * static_cast<double>(weights.size())), weights.size() - 1);
        out.who = Stakeholder::mayor_of(static_cast<int>(i));
        return out;
    }
    const double target = pick * total;
    double cumulative = 0.0;
    int chosen = -1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        cumulative += weights[i];
        chosen = static_cast<int>(i);
        if (target < cumulative) break;
    }
    out.who = Stakeholder::mayor_of(chosen);
    return out;
}

std::vector<CandidateLink> enumerate_candidates(const transport::Network& network, int extension_radius) {
    const auto& grid = network.grid();
    const int n = static_cast<int>(network.node_count());
    const int reach = std::max(1, extension_radius);
    std::vector<CandidateLink> out;
    for (int a = 0; a < n; ++a) {
        const int ra = grid.row_of(a);
        const int ca = grid.col_of(a);
        const bool a_on = network.degree(a) > 0;
        for (int r = ra; r <= std::min(grid.rows - 1, ra + reach); ++r) {
            for (int c = std::max(0, ca - reach); c <= std::min(grid.cols - 1, ca + reach); ++c) {
                const int b = grid.cell_at(r, c);
                if (b <= a) continue;
                const int cheb = grid.chebyshev(a, b);
                const bool adjacent = cheb == 1;
                const bool extension = cheb <= extension_radius && (a_on || network.degree(b) > 0);
                if ((adjacent || extension) && !network.has_link(a, b)) out.push_back({a, b});
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

double objective(const world::Metropolis& metropolis, const transport::TravelTimeMatrix& times, double nu,
                 const Stakeholder& who) {
    const auto acc = landuse::accessibility(metropolis, times, nu);
    double total = 0.0;
    for (int c : territory(metropolis, who)) total += acc.aggregate[static_cast<std::size_t>(c)];
    return total;
}

EvaluationSettings evaluation_settings(const world::ScenarioConfig& config) {
    EvaluationSettings s;
    s.nu = config.nu;
    s.v_link = config.v_link;
    s.capacity = config.capacity;
    s.extension_radius = config.network_extension_radius;
    s.congested = config.congestion_in_evaluation;
    s.assignment_iterations = config.assignment_iterations;
    return s;
}

namespace {

transport::TravelTimeMatrix judged_times(const transport::Network& network, const EvaluationSettings& settings) {
    if (settings.congested) {
        if (settings.od == nullptr) throw std::invalid_argument("congested evaluation needs an OD matrix");
        return transport::assign_traffic(*settings.od, network, settings.assignment_iterations).times;
    }
    return transport::shortest_times(network, transport::LinkTimes::free_flow);
}

} // namespace

double current_objective(const world::Metropolis& metropolis, const transport::Network& network,
                         const Stakeholder& who, const EvaluationSettings& settings) {
    return objective(metropolis, judged_times(network, settings), settings.nu, who);
}

double evaluate_candidate(const world::Metropolis& metropolis, const transport::Network& network,
                          const CandidateLink& link, const Stakeholder& who, const EvaluationSettings& settings) {
    transport::Network trial = network;
    trial.add_link(link.a, link.b, settings.v_link, settings.capacity);
    return objective(metropolis, judged_times(trial, settings), settings.nu, who);
}

FreeFlowEvaluator::FreeFlowEvaluator(const world::Metropolis& metropolis, const transport::Network& network,
                                     const Stakeholder& who, const EvaluationSettings& settings)
    : network_(&network),
      nu_(settings.nu),
      v_link_(settings.v_link),
      cells_(territory(metropolis, who)),
      raw_(transport::network_distances(network, transport::LinkTimes::free_flow)) {
    const std::size_t n = metropolis.size();
    const std::size_t S = static_cast<std::size_t>(metropolis.categories());
    const Matrix& A = metropolis.workers();
    const Matrix& E = metropolis.jobs();
    const double floor = network.intra_cell_time();
    weight_ = Matrix(cells_.size(), n);
    decay_ = Matrix(cells_.size(), n);
    for (std::size_t k = 0; k < cells_.size(); ++k) {
        const auto c = static_cast<std::size_t>(cells_[k]);
        for (std::size_t j = 0; j < n; ++j) {
            double w = 0.0;
            for (std::size_t s = 0; s < S; ++s) w += A(c, s) * E(j, s);
            weight_(k, j) = w;
            decay_(k, j) = std::exp(-nu_ * (c == j ? floor : raw_(c, j)));
            baseline_ += w * decay_(k, j);
        }
    }
}

double FreeFlowEvaluator::gain(const CandidateLink& link) const {
    const std::size_t n = raw_.rows();
    const auto a = static_cast<std::size_t>(link.a);
    const auto b = static_cast<std::size_t>(link.b);
    const double t = network_->grid().distance_km(link.a, link.b) / v_link_;
    auto row_a = raw_.row(a);
    auto row_b = raw_.row(b);
    double gain = 0.0;
    for (std::size_t k = 0; k < cells_.size(); ++k) {
        const auto c = static_cast<std::size_t>(cells_[k]);
        auto row_c = raw_.row(c);
        const double via_a = row_c[a] + t; // c → a → (new link) → b → j
        const double via_b = row_c[b] + t;
        auto w = weight_.row(k);
        auto dec = decay_.row(k);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == c || w[j] == 0.0) continue;
            const double alt = std::min(via_a + row_b[j], via_b + row_a[j]);
            if (alt < row_c[j]) gain += w[j] * (std::exp(-nu_ * alt) - dec[j]);
        }
    }
    return gain;
}

BuildResult decide_and_build(const world::Metropolis& metropolis, transport::Network network, const Stakeholder& who,
                             const EvaluationSettings& settings, int step) {
    DecisionRecord rec;
    rec.step = step;
    rec.who = who;
    const auto candidates = enumerate_candidates(network, settings.extension_radius);
    rec.candidate_count = candidates.size();
    rec.evaluated.reserve(candidates.size());

    std::optional<std::size_t> best;
    if (settings.congested) {
        rec.objective_before = current_objective(metropolis, network, who, settings);
        for (const auto& z : candidates) {
            rec.evaluated.push_back({z, evaluate_candidate(metropolis, network, z, who, settings)});
        }
    } else {
        const FreeFlowEvaluator eval(metropolis, network, who, settings);
        rec.objective_before = eval.baseline();
        for (const auto& z : candidates) rec.evaluated.push_back({z, eval.objective_with(z)});
    }
    for (std::size_t k = 0; k < rec.evaluated.size(); ++k) {
        if (!best || rec.evaluated[k].objective > rec.evaluated[*best].objective) best = k;
    }

    if (best) {
        const auto z = rec.evaluated[*best].link;
        network.add_link(z.a, z.b, settings.v_link, settings.capacity);
        rec.chosen = z;
        rec.objective_after = rec.evaluated[*best].objective;
    } else {
        log::warn("no candidate link left; network saturated");
        rec.objective_after = rec.objective_before;
    }
    return BuildResult{std::move(network), std::move(rec)};
}

} // namespace mcr::governance
