#pragma once

#include "rgmphd/errors.hpp"
#include "rgmphd/gaussian_mixture.hpp"
#include "rgmphd/phd_standard.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace rgmphd {

struct OspaConfig {
    double cutoff = 100.0;
    double order = 1.0;
};

/// Minimum-cost assignment of every row to a distinct column of a
/// rows x cols cost matrix (rows <= cols), solved with the Hungarian method
/// using potentials. Returns the column chosen for each row.
inline std::vector<std::size_t> solve_assignment(const Matrix& cost) {
    const auto n = static_cast<std::size_t>(cost.rows());
    const auto m = static_cast<std::size_t>(cost.cols());
    if (n > m) throw std::invalid_argument("solve_assignment: more rows than columns");
    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based arrays; index 0 is the virtual source.
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_to_col(n, 0);
    for (std::size_t j = 1; j <= m; ++j)
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

/// OSPA distance between two point sets using the first two coordinates
/// (position) of each vector. Both sets empty gives 0.
inline double ospa(std::span<const Vector> x, std::span<const Vector> y, const OspaConfig& cfg = {}) {
    if (!(cfg.cutoff > 0.0) || !(cfg.order >= 1.0)) throw ValidationError("ospa", "cutoff > 0 and order >= 1");
    if (x.size() > y.size()) std::swap(x, y);
    const std::size_t m = x.size();
    const std::size_t n = y.size();
    if (n == 0) return 0.0;
    const double cp = std::pow(cfg.cutoff, cfg.order);

    double total = cp * static_cast<double>(n - m);
    if (m > 0) {
        Matrix cost(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double d = (x[i].head<2>() - y[j].head<2>()).norm();
                cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    std::pow(std::min(d, cfg.cutoff), cfg.order);
            }
        }
        const auto assign = solve_assignment(cost);
        for (std::size_t i = 0; i < m; ++i)
            total += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(assign[i]));
    }
    return std::pow(total / static_cast<double>(n), 1.0 / cfg.order);
}

/// Per-step record of one filter over one Monte Carlo run.
struct RunRecord {
    std::size_t run = 0;
    std::string filter;
    std::vector<double> ospa;
    std::vector<std::size_t> n_true;
    std::vector<std::size_t> n_est;
    std::vector<double> max_condition;
    std::vector<PhaseTimes> runtime;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> w_global;
    std::vector<std::size_t> components;
    std::vector<double> total_mass;
    bool failed = false;
    std::string failure;

    [[nodiscard]] std::size_t steps() const { return ospa.size(); }
};

struct CardinalityStats {
    double mean_abs_error = 0.0;  // mu_N
    double rms_error = 0.0;       // sigma_N
};

/// Mean absolute and root-mean-square cardinality error over every step of
/// every record.
inline CardinalityStats cardinality_stats(std::span<const RunRecord> records) {
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : records) {
        for (std::size_t k = 0; k < r.n_true.size() && k < r.n_est.size(); ++k) {
            const double e = static_cast<double>(r.n_est[k]) - static_cast<double>(r.n_true[k]);
            abs_sum += std::abs(e);
            sq_sum += e * e;
            ++count;
        }
    }
    if (count == 0) throw EmptyInput("cardinality_stats: no steps");
    const auto k = static_cast<double>(count);
    return {abs_sum / k, std::sqrt(sq_sum / k)};
}

}  // namespace rgmphd
