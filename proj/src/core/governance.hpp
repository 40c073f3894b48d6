#pragma once

#include "matrix.hpp"
#include "rng.hpp"
#include "transport.hpp"
#include "world.hpp"

#include <compare>
#include <optional>
#include <span>
#include <vector>

namespace mcr::governance {

struct Stakeholder {
    enum class Kind { mayor, governor };
    Kind kind = Kind::governor;
    int mayor = -1;

    static Stakeholder governor() { return {}; }
    static Stakeholder mayor_of(int index) { return {Kind::mayor, index}; }
    bool is_mayor() const { return kind == Kind::mayor; }

    friend bool operator==(const Stakeholder&, const Stakeholder&) = default;
};

/// Cells whose workers count toward the stakeholder's objective.
std::vector<int> territory(const world::Metropolis& metropolis, const Stakeholder& who);

struct StakeholderDraw {
    Stakeholder who;
    std::vector<double> draws;     // level draw, then mayor draw when local
    bool degenerate_weights = false;
};

/// Local with probability ξ, then mayor i with probability Y_i / ΣY.
/// A local decision with ΣY = 0 picks a mayor uniformly.
StakeholderDraw select_stakeholder(double xi, std::span<const double> weights, Rng& rng);

struct CandidateLink {
    int a = 0;
    int b = 0;
    friend auto operator<=>(const CandidateLink&, const CandidateLink&) = default;
};

/// Unbuilt pairs a < b that are 8-neighbours, or within `extension_radius`
/// cells (Chebyshev) of each other with at least one end already on the
/// network. Ascending (a, b).
std::vector<CandidateLink> enumerate_candidates(const transport::Network& network, int extension_radius);

/// X(T) = Σ_{c∈T} X_c.
double objective(const world::Metropolis& metropolis, const transport::TravelTimeMatrix& times, double nu,
                 const Stakeholder& who);

struct EvaluationSettings {
    double nu = 1.0;
    double v_link = 60.0;
    double capacity = 1500.0;
    int extension_radius = 3;
    /// When set, candidates are judged after a full assignment of `od`
    /// rather than on free-flow times.
    bool congested = false;
    const Matrix* od = nullptr;
    int assignment_iterations = 4;
};

EvaluationSettings evaluation_settings(const world::ScenarioConfig& config);

/// Objective of the network as it stands (free-flow or congested per settings).
double current_objective(const world::Metropolis& metropolis, const transport::Network& network,
                         const Stakeholder& who, const EvaluationSettings& settings);

/// Objective after building `link` on a copy of the network; neither input is
/// modified.
double evaluate_candidate(const world::Metropolis& metropolis, const transport::Network& network,
                          const CandidateLink& link, const Stakeholder& who, const EvaluationSettings& settings);

/// Scores every candidate against one free-flow distance table by the exact
/// single-edge update d'_cj = min(d_cj, d_ca + t + d_bj, d_cb + t + d_aj).
class FreeFlowEvaluator {
public:
    FreeFlowEvaluator(const world::Metropolis& metropolis, const transport::Network& network,
                      const Stakeholder& who, const EvaluationSettings& settings);

    double baseline() const { return baseline_; }
    double gain(const CandidateLink& link) const;
    double objective_with(const CandidateLink& link) const { return baseline_ + gain(link); }

private:
    const transport::Network* network_;
    double nu_;
    double v_link_;
    std::vector<int> cells_;
    Matrix raw_;    // network distances, zero diagonal
    Matrix weight_; // |T|×N: Σ_s A_c^s E_j^s
    Matrix decay_;  // |T|×N: exp(-ν d_cj) at current times
    double baseline_ = 0.0;
};

struct CandidateScore {
    CandidateLink link;
    double objective = 0.0;
};

struct DecisionRecord {
    int step = 0;
    Stakeholder who;
    std::size_t candidate_count = 0;
    std::optional<CandidateLink> chosen;
    double objective_before = 0.0;
    double objective_after = 0.0;
    std::vector<double> draws;
    std::vector<CandidateScore> evaluated;
};

struct BuildResult {
    transport::Network network;
    DecisionRecord record;
};

/// Evaluates every candidate, builds the argmax (first in enumeration order
/// on ties) and records the decision. No candidates means no build.
BuildResult decide_and_build(const world::Metropolis& metropolis, transport::Network network, const Stakeholder& who,
                             const EvaluationSettings& settings, int step = 0);

} // namespace mcr::governance
