#pragma once

#include "rgmphd/diagnostics.hpp"
#include "rgmphd/gaussian_mixture.hpp"
#include "rgmphd/kalman.hpp"
#include "rgmphd/models.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace rgmphd {

/// Everything a filter needs to know about targets, sensor and clutter.
struct SystemModels {
    MotionModel motion;
    SpawnModel spawn;
    BirthModel birth;
    MeasurementModel measurement;
    ClutterModel clutter;
};

struct PhaseTimes {
    double predict_ms = 0.0;
    double adapt_ms = 0.0;
    double update_ms = 0.0;
    double manage_ms = 0.0;
    double extract_ms = 0.0;

    [[nodiscard]] double total_ms() const { return predict_ms + adapt_ms + update_ms + manage_ms + extract_ms; }
};

/// Value snapshot of one filter step.
struct StepDiagnostics {
    double alpha = 0.0;
    double beta = 0.0;
    double w_global = 1.0;
    double eps_f = 0.0;
    double eps_g = 0.0;
    double dof = 0.0;
    double kurtosis = 3.0;
    std::size_t predicted_components = 0;
    std::size_t updated_components = 0;
    std::size_t component_count = 0;
    double max_condition = 1.0;
    double total_mass = 0.0;
    PhaseTimes times;
    std::vector<Vector> estimates;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

inline double safe_log(double x) {
    return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Normalizes per-component detection numerators against clutter:
/// exp(l_j) / (clutter + sum_l exp(l_l)), with l_j given in log space.
/// All-zero numerators with zero clutter yield zero weights.
inline std::vector<double> normalized_detection_weights(std::span<const double> log_numerators, double clutter) {
    std::vector<double> terms(log_numerators.begin(), log_numerators.end());
    terms.push_back(detail::safe_log(clutter));
    const double log_den = detail::log_sum_exp(terms);
    std::vector<double> out(log_numerators.size(), 0.0);
    if (log_den == -std::numeric_limits<double>::infinity()) return out;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::exp(log_numerators[j] - log_den);
    return out;
}

/// GM-PHD prediction: survivors, then spawns (prior-major), then births.
/// Produces exactly J_{k-1} (1 + J_beta) + J_gamma components.
inline GaussianMixture predict(const GaussianMixture& prior, const MotionModel& motion, const SpawnModel& spawn,
                               const BirthModel& birth) {
    GaussianMixture out;
    out.step = prior.step + 1;
    out.components.reserve(prior.size() * (1 + spawn.terms.size()) + birth.intensity.size());
    const Matrix& f = motion.transition;
    for (const auto& c : prior.components) {
        out.components.push_back({motion.survival * c.weight, f * c.mean,
                                  motion.process_noise + f * c.covariance * f.transpose()});
    }
    for (const auto& c : prior.components) {
        for (const auto& s : spawn.terms) {
            out.components.push_back({c.weight * s.weight, s.transition * c.mean + s.offset,
                                      s.noise + s.transition * c.covariance * s.transition.transpose()});
        }
    }
    for (const auto& b : birth.intensity.components) out.components.push_back(b);
    return out;
}

/// GM-PHD update: (1 - p_D) missed-detection copies followed by one
/// Kalman-updated copy of every predicted component per measurement.
/// Produces exactly J_{k|k-1} (1 + |Z|) components.
inline GaussianMixture update(const GaussianMixture& pred, std::span<const Vector> meas, const MeasurementModel& mm,
                              const ClutterModel& clutter) {
    const std::size_t n = pred.size();
    GaussianMixture out;
    out.step = pred.step;
    out.components.reserve(n * (1 + meas.size()));
    for (const auto& c : pred.components) out.components.push_back({(1.0 - mm.detection) * c.weight, c.mean, c.covariance});
    if (meas.empty() || n == 0) return out;

    std::vector<InnovationTerms> terms;
    terms.reserve(n);
    for (std::size_t j = 0; j < n; ++j) terms.push_back(prepare_innovation(pred.components[j], mm, j));

    const double log_pd = detail::safe_log(mm.detection);
    std::vector<double> log_num(n);
    std::vector<Vector> residuals(n);
    for (const auto& z : meas) {
        for (std::size_t j = 0; j < n; ++j) {
            residuals[j] = innovation(mm, z, terms[j].predicted);
            const double log_q = detail::log_gaussian_from_parts(detail::mahalanobis_sq(terms[j].factor, residuals[j]),
                                                                 terms[j].log_det, z.size());
            log_num[j] = (log_pd + detail::safe_log(pred.components[j].weight)) + log_q;
        }
        const auto weights = normalized_detection_weights(log_num, clutter_intensity(clutter, z));
        for (std::size_t j = 0; j < n; ++j) {
            out.components.push_back({weights[j], pred.components[j].mean + terms[j].gain * residuals[j],
                                      terms[j].updated_cov});
        }
    }
    return out;
}

/// Regularization followed by pruning/merging.
inline GaussianMixture manage_components(const GaussianMixture& mix, const ComponentManagementConfig& cfg) {
    return prune_and_merge(regularize(mix, cfg), cfg);
}

struct StandardStepResult {
    GaussianMixture posterior;
    StepDiagnostics diagnostics;
};

/// One predict -> update -> manage -> extract cycle of the standard filter.
inline StandardStepResult standard_step(const GaussianMixture& prior, std::span<const Vector> meas,
                                        const SystemModels& models, const ComponentManagementConfig& cfg) {
    StandardStepResult r;
    auto& d = r.diagnostics;

    auto t0 = detail::Clock::now();
    const auto pred = predict(prior, models.motion, models.spawn, models.birth);
    d.times.predict_ms = detail::elapsed_ms(t0);
    d.predicted_components = pred.size();

    t0 = detail::Clock::now();
    const auto upd = update(pred, meas, models.measurement, models.clutter);
    d.times.update_ms = detail::elapsed_ms(t0);
    d.updated_components = upd.size();

    t0 = detail::Clock::now();
    r.posterior = manage_components(upd, cfg);
    check_covariances(r.posterior);
    d.times.manage_ms = detail::elapsed_ms(t0);

    t0 = detail::Clock::now();
    d.estimates = extract_states(r.posterior);
    d.times.extract_ms = detail::elapsed_ms(t0);

    d.component_count = r.posterior.size();
    d.total_mass = total_mass(r.posterior);
    d.max_condition = max_condition_number(r.posterior);
    return r;
}

}  // namespace rgmphd
