#pragma once

#include "matrix.hpp"
#include "rng.hpp"
#include "transport.hpp"
#include "world.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace mcr::landuse {

/// Location scores per cell c and category s, for both relocating sides.
struct CellScores {
    Matrix worker_access; // X_c^s = Σ_j E_j^s exp(-ν d_cj)
    Matrix job_access;    // Σ_j A_j^s exp(-ν d_cj)
    std::vector<double> aggregate_access; // X_c = Σ_s A_c^s X_c^s

    Matrix worker_form; // F_c^s
    Matrix job_form;

    Matrix worker_utility; // U_c^s
    Matrix job_utility;
};

struct Accessibility {
    Matrix worker;                  // N×S
    Matrix job;                     // N×S
    std::vector<double> aggregate;  // N
};

Accessibility accessibility(const world::Metropolis& metropolis, const transport::TravelTimeMatrix& times, double nu);

struct UrbanForm {
    Matrix worker; // N×S
    Matrix job;    // N×S
};

/// F_c^s = Π_{s'} (1 + A_c^{s'})^{m[s][s']} (1 + E_c^{s'})^{m'[s][s']}.
/// The job side swaps the roles of workers and jobs.
UrbanForm urban_form(const world::Metropolis& metropolis, const Matrix& m, const Matrix& m_prime);

/// Cobb-Douglas X^γ F^(1-γ).
double utility(double access, double form, double gamma);

CellScores score_cells(const world::Metropolis& metropolis, const transport::TravelTimeMatrix& times,
                       const world::ScenarioConfig& config);

/// Multinomial logit shares exp(μU_c) / Σ exp(μU_c'), computed with the
/// maximum subtracted first.
std::vector<double> logit_probabilities(std::span<const double> utilities, double mu);

/// Moves `fraction` of every category's workers and jobs: each cell gives up
/// the same share, and the pool is reallocated by expected value over the
/// logit shares. `rng` is not consumed by this allocation rule.
world::Metropolis relocate(const world::Metropolis& metropolis, const CellScores& scores, double mu, double fraction,
                           Rng& rng);

/// `cell_id,side,s,X,F,U,P` rows.
void write_scores_csv(std::ostream& out, const CellScores& scores, double mu);

} // namespace mcr::landuse
