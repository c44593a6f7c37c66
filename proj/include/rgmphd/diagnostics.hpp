#pragma once

#include "rgmphd/errors.hpp"
#include "rgmphd/gaussian_mixture.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>

namespace rgmphd {

/// lambda_max / lambda_min from a symmetric eigensolve.
inline double condition_number(const Matrix& p) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(p, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0.0)) throw NotPositiveDefinite(lmin);
    return lmax / lmin;
}

inline double max_condition_number(const GaussianMixture& mix) {
    double worst = 1.0;
    for (const auto& c : mix.components) worst = std::max(worst, condition_number(c.covariance));
    return worst;
}

/// SPD check over a mixture. Debug builds check every component; release
/// builds check one component in 16.
inline void check_covariances(const GaussianMixture& mix) {
#ifdef NDEBUG
    constexpr std::size_t stride = 16;
#else
    constexpr std::size_t stride = 1;
#endif
    for (std::size_t i = 0; i < mix.size(); i += stride) {
        const double lmin = detail::min_eigenvalue(mix.components[i].covariance);
        if (!(lmin > 0.0)) throw NotPositiveDefinite(lmin);
    }
}

struct MassCheck {
    bool pass = true;
    std::optional<std::size_t> first_violation;
};

/// sup_k mass_k <= ceiling over a per-step mass trace.
inline MassCheck mass_monitor(std::span<const double> trace, double ceiling) {
    for (std::size_t k = 0; k < trace.size(); ++k)
        if (trace[k] > ceiling) return {false, k};
    return {};
}

/// Constants of the L1 boundedness recursion ||v_k|| <= A ||v_{k-1}|| + B.
struct MassBoundInputs {
    double initial_mass = 0.0;
    double survival_max = 0.99;
    double alpha_max = 0.0;
    double detection_max = 0.98;
    double max_measurements = 0.0;
    double clutter_min = 1.0;
    double beta_max = 1.0;
    double birth_max = 0.0;   // gamma_max
    double birth_count = 0.0; // N_birth
};

/// A = p_S + alpha_max + p_D M_max / kappa_min.
inline double mass_contraction(const MassBoundInputs& in) {
    return in.survival_max + in.alpha_max + in.detection_max * in.max_measurements / in.clutter_min;
}

/// mass_0 + B/(1-A); +inf when A >= 1 (no bound).
inline double mass_ceiling(const MassBoundInputs& in) {
    const double a = mass_contraction(in);
    if (!(a < 1.0)) return std::numeric_limits<double>::infinity();
    const double b = (1.0 + in.beta_max) * in.birth_max + in.birth_count;
    return in.initial_mass + b / (1.0 - a);
}

}  // namespace rgmphd
