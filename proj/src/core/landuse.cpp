#include "landuse.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mcr::landuse {

Accessibility accessibility(const world::Metropolis& metropolis, const transport::TravelTimeMatrix& times, double nu) {
    const std::size_t n = metropolis.size();
    const auto S = static_cast<std::size_t>(metropolis.categories());
    if (times.size() != n) throw std::invalid_argument("travel time matrix does not match the metropolis");
    const Matrix& A = metropolis.workers();
    const Matrix& E = metropolis.jobs();

    Accessibility acc{Matrix(n, S), Matrix(n, S), std::vector<double>(n, 0.0)};
    std::vector<double> decay(n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t j = 0; j < n; ++j) decay[j] = std::exp(-nu * times(c, j));
        for (std::size_t s = 0; s < S; ++s) {
            double xw = 0.0;
            double xj = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                xw += E(j, s) * decay[j];
                xj += A(j, s) * decay[j];
            }
            acc.worker(c, s) = xw;
            acc.job(c, s) = xj;
            acc.aggregate[c] += A(c, s) * xw;
        }
    }
    return acc;
}

UrbanForm urban_form(const world::Metropolis& metropolis, const Matrix& m, const Matrix& m_prime) {
    const std::size_t n = metropolis.size();
    const auto S = static_cast<std::size_t>(metropolis.categories());
    if (m.rows() != S || m.cols() != S || m_prime.rows() != S || m_prime.cols() != S) {
        throw std::invalid_argument("proximity matrices must be S x S");
    }
    const Matrix& A = metropolis.workers();
    const Matrix& E = metropolis.jobs();
    UrbanForm form{Matrix(n, S, 1.0), Matrix(n, S, 1.0)};
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t s = 0; s < S; ++s) {
            double fw = 1.0;
            double fj = 1.0;
            for (std::size_t t = 0; t < S; ++t) {
                fw *= std::pow(1.0 + A(c, t), m(s, t)) * std::pow(1.0 + E(c, t), m_prime(s, t));
                fj *= std::pow(1.0 + E(c, t), m(s, t)) * std::pow(1.0 + A(c, t), m_prime(s, t));
            }
            form.worker(c, s) = fw;
            form.job(c, s) = fj;
        }
    }
    return form;
}

double utility(double access, double form, double gamma) {
    if (gamma >= 1.0) return access;
    if (gamma <= 0.0) return form;
    return std::pow(access, gamma) * std::pow(form, 1.0 - gamma);
}

CellScores score_cells(const world::Metropolis& metropolis, const transport::TravelTimeMatrix& times,
                       const world::ScenarioConfig& config) {
    auto acc = accessibility(metropolis, times, config.nu);
    auto form = urban_form(metropolis, config.m, config.m_prime);
    CellScores scores;
    scores.worker_utility = Matrix(acc.worker.rows(), acc.worker.cols());
    scores.job_utility = Matrix(acc.worker.rows(), acc.worker.cols());
    for (std::size_t c = 0; c < acc.worker.rows(); ++c) {
        for (std::size_t s = 0; s < acc.worker.cols(); ++s) {
            scores.worker_utility(c, s) = utility(acc.worker(c, s), form.worker(c, s), config.gamma);
            scores.job_utility(c, s) = utility(acc.job(c, s), form.job(c, s), config.gamma);
        }
    }
    scores.worker_access = std::move(acc.worker);
    scores.job_access = std::move(acc.job);
    scores.aggregate_access = std::move(acc.aggregate);
    scores.worker_form = std::move(form.worker);
    scores.job_form = std::move(form.job);
    return scores;
}

std::vector<double> logit_probabilities(std::span<const double> utilities, double mu) {
    std::vector<double> p(utilities.size(), 0.0);
    if (utilities.empty()) return p;
    if (mu == 0.0) {
        std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
        return p;
    }
    const double top = *std::max_element(utilities.begin(), utilities.end());
    double total = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
        p[c] = std::exp(mu * (utilities[c] - top));
        total += p[c];
    }
    for (double& v : p) v /= total;
    return p;
}

namespace {

void reallocate(Matrix& counts, const Matrix& utilities, double mu, double fraction) {
    const std::size_t n = counts.rows();
    std::vector<double> u(n);
    for (std::size_t s = 0; s < counts.cols(); ++s) {
        const double total = counts.column_sum(s);
        if (total <= 0.0) continue;
        for (std::size_t c = 0; c < n; ++c) u[c] = utilities(c, s);
        const auto p = logit_probabilities(u, mu);
        double pool = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            const double moved = counts(c, s) * fraction;
            counts(c, s) -= moved;
            pool += moved;
        }
        for (std::size_t c = 0; c < n; ++c) counts(c, s) += pool * p[c];
    }
}

} // namespace

world::Metropolis relocate(const world::Metropolis& metropolis, const CellScores& scores, double mu, double fraction,
                           Rng& /*rng*/) {
    if (mu < 0.0) throw std::invalid_argument("mu must be nonnegative");
    if (fraction < 0.0 || fraction > 1.0) throw std::invalid_argument("relocation fraction must lie in [0, 1]");
    world::Metropolis next = metropolis;
    if (fraction == 0.0) return next;
    reallocate(next.workers(), scores.worker_utility, mu, fraction);
    reallocate(next.jobs(), scores.job_utility, mu, fraction);
    return next;
}

void write_scores_csv(std::ostream& out, const CellScores& scores, double mu) {
    out << "cell_id,side,s,X,F,U,P\n";
    const std::size_t n = scores.worker_access.rows();
    const std::size_t S = scores.worker_access.cols();
    std::vector<double> u(n);
    auto emit = [&](const char* side, const Matrix& x, const Matrix& f, const Matrix& util) {
        for (std::size_t s = 0; s < S; ++s) {
            for (std::size_t c = 0; c < n; ++c) u[c] = util(c, s);
            const auto p = logit_probabilities(u, mu);
            for (std::size_t c = 0; c < n; ++c) {
                out << fmt::format("{},{},{},{},{},{},{}\n", c, side, s, x(c, s), f(c, s), util(c, s), p[c]);
            }
        }
    };
    emit("worker", scores.worker_access, scores.worker_form, scores.worker_utility);
    emit("job", scores.job_access, scores.job_form, scores.job_utility);
}

} // namespace mcr::landuse
