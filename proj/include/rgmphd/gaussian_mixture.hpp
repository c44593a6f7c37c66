#pragma once

#include "rgmphd/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace rgmphd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One weighted Gaussian term of a PHD intensity.
struct GaussianComponent {
    double weight = 0.0;
    Vector mean;
    Matrix covariance;
};

/// Gaussian-mixture intensity v_k(x). Integrates to the expected target count.
struct GaussianMixture {
    std::vector<GaussianComponent> components;
    std::size_t step = 0;

    [[nodiscard]] std::size_t size() const noexcept { return components.size(); }
    [[nodiscard]] bool empty() const noexcept { return components.empty(); }
};

struct ComponentManagementConfig {
    double prune_threshold = 1e-5;   // T
    double merge_threshold = 4.0;    // U, squared Mahalanobis distance
    std::size_t max_components = 100;
    double weight_floor = 1e-15;     // keeps floored weights below T so they still prune
    double eig_floor = 1e-3;         // p_min
    double eig_ceiling = 1e6;        // p_max, only used by the condition-number bound
    double regularization = 1e-4;    // delta
};

namespace detail {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;

/// log(exp(a) + exp(b)) without overflow; exact when one side is -inf.
inline double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

inline double log_sum_exp(std::span<const double> values) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : values) hi = std::max(hi, v);
    if (hi == -std::numeric_limits<double>::infinity()) return hi;
    double acc = 0.0;
    for (double v : values) acc += std::exp(v - hi);
    return hi + std::log(acc);
}

inline double min_eigenvalue(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

/// Cholesky factor of an SPD matrix; throws SingularCovariance otherwise.
inline Eigen::LLT<Matrix> factorize_spd(const Matrix& cov) {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) throw SingularCovariance(min_eigenvalue(cov));
    const auto diag = llt.matrixL().toDenseMatrix().diagonal();
    if ((diag.array() <= 0.0).any() || !diag.allFinite()) throw SingularCovariance(min_eigenvalue(cov));
    return llt;
}

inline double log_det_from_llt(const Eigen::LLT<Matrix>& llt) {
    const Matrix& lower = llt.matrixLLT();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < lower.rows(); ++i) acc += std::log(lower(i, i));
    return 2.0 * acc;
}

/// Squared Mahalanobis distance r' C^{-1} r using a Cholesky factor of C.
inline double mahalanobis_sq(const Eigen::LLT<Matrix>& llt, const Vector& residual) {
    const Vector y = llt.matrixL().solve(residual);
    return y.squaredNorm();
}

inline double log_gaussian_from_parts(double maha_sq, double log_det, Eigen::Index dim) {
    return -0.5 * (static_cast<double>(dim) * kLog2Pi + log_det + maha_sq);
}

inline double log_student_t_from_parts(double maha_sq, double log_det, Eigen::Index dim, double dof) {
    const double d = static_cast<double>(dim);
    return std::lgamma(0.5 * (dof + d)) - std::lgamma(0.5 * dof) -
           0.5 * d * std::log(dof * std::numbers::pi) - 0.5 * log_det -
           0.5 * (dof + d) * std::log1p(maha_sq / dof);
}

}  // namespace detail

inline double log_gaussian_density(const Vector& x, const Vector& mean, const Matrix& cov) {
    const auto llt = detail::factorize_spd(cov);
    return detail::log_gaussian_from_parts(detail::mahalanobis_sq(llt, x - mean),
                                           detail::log_det_from_llt(llt), x.size());
}

/// N(x; mean, cov), evaluated through a Cholesky factorization.
inline double gaussian_density(const Vector& x, const Vector& mean, const Matrix& cov) {
    return std::exp(log_gaussian_density(x, mean, cov));
}

inline double log_student_t_density(const Vector& z, const Vector& loc, const Matrix& scale, double dof) {
    if (!(dof > 2.0)) throw InvalidDof(dof);
    const auto llt = detail::factorize_spd(scale);
    return detail::log_student_t_from_parts(detail::mahalanobis_sq(llt, z - loc),
                                            detail::log_det_from_llt(llt), z.size(), dof);
}

/// Multivariate Student-t density with location `loc`, scale matrix `scale`
/// and `dof` degrees of freedom. Its covariance is dof/(dof-2) * scale.
inline double student_t_density(const Vector& z, const Vector& loc, const Matrix& scale, double dof) {
    return std::exp(log_student_t_density(z, loc, scale, dof));
}

/// Scale matrix whose Student-t covariance equals `cov`: (dof-2)/dof * cov.
inline Matrix moment_matched_t_scale(const Matrix& cov, double dof) {
    if (!(dof > 2.0)) throw InvalidDof(dof);
    return ((dof - 2.0) / dof) * cov;
}

/// Draws from t_dof(loc, scale) as a Gaussian scale mixture.
template <typename Rng>
Vector sample_student_t(const Vector& loc, const Matrix& scale, double dof, Rng& rng) {
    if (!(dof > 2.0)) throw InvalidDof(dof);
    const auto llt = detail::factorize_spd(scale);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::chi_squared_distribution<double> chi2(dof);
    Vector u(loc.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = normal(rng);
    const double mix = std::sqrt(dof / chi2(rng));
    const Vector shaped = llt.matrixL() * u;
    return loc + mix * shaped;
}

inline double total_mass(const GaussianMixture& mix) {
    double mass = 0.0;
    for (const auto& c : mix.components) mass += c.weight;
    return mass;
}

/// Pruning and greedy Mahalanobis merging followed by the J_max cap.
///
/// Components with weight <= T are dropped. The heaviest survivor j then
/// absorbs every survivor i with (m_i - m_j)' P_i^{-1} (m_i - m_j) <= U, where
/// P_i is the candidate's own covariance. The merged term carries the exact
/// weight sum and the first two moments of the absorbed sub-mixture.
inline GaussianMixture prune_and_merge(const GaussianMixture& mix, const ComponentManagementConfig& cfg) {
    GaussianMixture out;
    out.step = mix.step;

    std::vector<std::size_t> alive;
    alive.reserve(mix.size());
    for (std::size_t i = 0; i < mix.size(); ++i)
        if (mix.components[i].weight > cfg.prune_threshold) alive.push_back(i);
    if (alive.empty()) return out;

    std::vector<Eigen::LLT<Matrix>> factors(mix.size());
    for (std::size_t i : alive) factors[i] = detail::factorize_spd(mix.components[i].covariance);

    while (!alive.empty()) {
        // Heaviest remaining; first index wins ties.
        std::size_t best = alive.front();
        for (std::size_t i : alive)
            if (mix.components[i].weight > mix.components[best].weight) best = i;
        const Vector& anchor = mix.components[best].mean;

        std::vector<std::size_t> group;
        std::vector<std::size_t> rest;
        for (std::size_t i : alive) {
            const double d2 = detail::mahalanobis_sq(factors[i], mix.components[i].mean - anchor);
            (d2 <= cfg.merge_threshold ? group : rest).push_back(i);
        }

        GaussianComponent merged;
        merged.weight = 0.0;
        for (std::size_t i : group) merged.weight += mix.components[i].weight;
        merged.mean = Vector::Zero(anchor.size());
        for (std::size_t i : group) merged.mean += mix.components[i].weight * mix.components[i].mean;
        merged.mean /= merged.weight;
        merged.covariance = Matrix::Zero(anchor.size(), anchor.size());
        for (std::size_t i : group) {
            const auto& c = mix.components[i];
            const Vector diff = merged.mean - c.mean;
            merged.covariance += c.weight * (c.covariance + diff * diff.transpose());
        }
        merged.covariance /= merged.weight;
        out.components.push_back(std::move(merged));
        alive = std::move(rest);
    }

    if (out.size() > cfg.max_components) {
        std::stable_sort(out.components.begin(), out.components.end(),
                         [](const auto& a, const auto& b) { return a.weight > b.weight; });
        out.components.resize(cfg.max_components);
    }
    return out;
}

/// Every component heavier than 0.5 contributes round(weight) copies of its mean.
inline std::vector<Vector> extract_states(const GaussianMixture& mix) {
    std::vector<Vector> states;
    for (const auto& c : mix.components) {
        if (!(c.weight > 0.5)) continue;
        const auto copies = static_cast<std::size_t>(std::round(c.weight));
        for (std::size_t k = 0; k < copies; ++k) states.push_back(c.mean);
    }
    return states;
}

/// Weight flooring, symmetrization and eigenvalue-floor regularization.
/// A component whose smallest eigenvalue sits below p_min gets delta*I added
/// until it does not; more than 64 increments is treated as an error.
inline GaussianMixture regularize(const GaussianMixture& mix, const ComponentManagementConfig& cfg) {
    constexpr int kMaxIncrements = 64;
    GaussianMixture out = mix;
    for (auto& c : out.components) {
        c.weight = std::max(c.weight, cfg.weight_floor);
        c.covariance = 0.5 * (c.covariance + c.covariance.transpose());
        double lmin = detail::min_eigenvalue(c.covariance);
        if (lmin >= cfg.eig_floor) continue;
        const auto n = c.covariance.rows();
        // Eigenvalues shift by exactly delta per increment, so jump straight to
        // the required count and then confirm.
        const double needed = std::ceil((cfg.eig_floor - lmin) / cfg.regularization);
        if (!(needed <= kMaxIncrements))
            throw RegularizationFailed("covariance needs more than 64 regularization steps (min eigenvalue " +
                                       std::to_string(lmin) + ")");
        int increments = static_cast<int>(needed);
        c.covariance += (increments * cfg.regularization) * Matrix::Identity(n, n);
        lmin = detail::min_eigenvalue(c.covariance);
        while (lmin < cfg.eig_floor) {
            if (++increments > kMaxIncrements)
                throw RegularizationFailed("covariance needs more than 64 regularization steps");
            c.covariance += cfg.regularization * Matrix::Identity(n, n);
            lmin = detail::min_eigenvalue(c.covariance);
        }
    }
    return out;
}

}  // namespace rgmphd
