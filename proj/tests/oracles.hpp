#pragma once
// Independent reference implementations used only by tests. None of these
// call into the code under test beyond plain data types.

#include "matrix.hpp"
#include "transport.hpp"
#include "world.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using mcr::Matrix;

inline double euclid_km(const mcr::world::Grid& g, int a, int b) {
    const double dr = (a / g.cols) - (b / g.cols);
    const double dc = (a % g.cols) - (b % g.cols);
    return std::sqrt(dr * dr + dc * dc) * g.cell_size_km;
}

/// Floyd-Warshall over the complete straight-line graph plus regional links.
/// Zero diagonal.
inline Matrix all_pairs(const mcr::world::Grid& g, double v_local, const std::vector<mcr::transport::Link>& links,
                        bool congested) {
    const std::size_t n = g.size();
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            d(i, j) = i == j ? 0.0 : euclid_km(g, static_cast<int>(i), static_cast<int>(j)) / v_local;
        }
    }
    for (const auto& l : links) {
        const double t = congested ? l.congested_time : l.length_km / l.v_link;
        const auto a = static_cast<std::size_t>(l.from);
        const auto b = static_cast<std::size_t>(l.to);
        d(a, b) = std::min(d(a, b), t);
        d(b, a) = std::min(d(b, a), t);
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (d(i, k) + d(k, j) < d(i, j)) d(i, j) = d(i, k) + d(k, j);
            }
        }
    }
    return d;
}

/// Classic Furness: scale the seed matrix alternately to row and column
/// targets until both match to `tol`.
inline Matrix furness(const std::vector<double>& o, const std::vector<double>& e, const Matrix& t, double lambda,
                      double tol = 1e-13, int max_iter = 100000) {
    const std::size_t n = o.size();
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m(i, j) = std::exp(-lambda * t(i, j));
    }
    for (int it = 0; it < max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            const double s = m.row_sum(i);
            for (std::size_t j = 0; j < n; ++j) m(i, j) = s > 0 ? m(i, j) * o[i] / s : 0.0;
        }
        double err = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double s = m.column_sum(j);
            err = std::max(err, std::abs(s - e[j]) / std::max(e[j], 1e-300));
            for (std::size_t i = 0; i < n; ++i) m(i, j) = s > 0 ? m(i, j) * e[j] / s : 0.0;
        }
        if (err < tol) break;
    }
    return m;
}

/// Σ_c Σ_s A_c^s Σ_j E_j^s exp(-ν d_cj).
inline double total_accessibility(const Matrix& workers, const Matrix& jobs, const Matrix& hours, double nu) {
    double total = 0.0;
    for (std::size_t c = 0; c < workers.rows(); ++c) {
        for (std::size_t s = 0; s < workers.cols(); ++s) {
            double x = 0.0;
            for (std::size_t j = 0; j < jobs.rows(); ++j) x += jobs(j, s) * std::exp(-nu * hours(c, j));
            total += workers(c, s) * x;
        }
    }
    return total;
}

/// Edge of the dense path-enumeration graph: link >= 0 for a regional link,
/// -1 for a straight local leg.
struct Edge {
    double time;
    int link;
};

/// Every simple path from `from` to `to` (cells as nodes, the cheaper of the
/// local leg and any regional link per pair). Calls visit(time, links used).
inline void enumerate_paths(const mcr::world::Grid& g, double v_local, const std::vector<mcr::transport::Link>& links,
                            int from, int to, const std::function<void(double, const std::vector<int>&)>& visit) {
    const int n = static_cast<int>(g.size());
    std::vector<std::vector<Edge>> e(static_cast<std::size_t>(n), std::vector<Edge>(static_cast<std::size_t>(n)));
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) e[a][b] = {euclid_km(g, a, b) / v_local, -1};
    }
    for (std::size_t k = 0; k < links.size(); ++k) {
        const auto& l = links[k];
        const double t = l.congested_time;
        if (t < e[l.from][l.to].time) e[l.from][l.to] = e[l.to][l.from] = {t, static_cast<int>(k)};
    }
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<int> used;
    std::function<void(int, double)> dfs = [&](int at, double time) {
        if (at == to) {
            visit(time, used);
            return;
        }
        seen[at] = true;
        for (int nxt = 0; nxt < n; ++nxt) {
            if (seen[nxt] || nxt == at) continue;
            const Edge& ed = e[at][nxt];
            if (ed.link >= 0) used.push_back(ed.link);
            dfs(nxt, time + ed.time);
            if (ed.link >= 0) used.pop_back();
        }
        seen[at] = false;
    };
    dfs(from, 0.0);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

} // namespace oracle
