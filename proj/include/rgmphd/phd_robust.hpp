#pragma once

#include "rgmphd/diagnostics.hpp"
#include "rgmphd/gaussian_mixture.hpp"
#include "rgmphd/kalman.hpp"
#include "rgmphd/models.hpp"
#include "rgmphd/phd_standard.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <span>
#include <vector>

namespace rgmphd {

/// Fixed robustness parameters used instead of the adaptation laws. With the
/// defaults the robust recursion reduces to the standard GM-PHD filter.
struct PinnedParameters {
    double alpha = 0.0;        // memory blend in prediction
    double birth_scale = 1.0;  // multiplies the birth intensity
    double tail_mix = 0.0;     // Student-t share of the measurement likelihood
    double w_global = 1.0;
    double measurement_weight = 1.0;  // every w(z)
    double dof = 100.0;
};

struct AdaptationConfig {
    double lambda_f = 0.1;
    double lambda_g = 0.05;
    double gamma = 0.2;        // credibility decay in w(z)
    double gamma_w = 1.0;      // logistic slope of w_global
    std::size_t kurtosis_window = 50;
    std::size_t kurtosis_min_samples = 10;
    double innovation_gate = 16.0;  // squared Mahalanobis gate for kurtosis samples
    double nu_max = 100.0;
    double nu_eps = 1e-6;
    double initial_alpha = 0.0;
    double initial_beta = 1.0;
    bool adaptive = true;
    PinnedParameters pinned;
};

/// Robustness parameters alpha_k, beta_k, w_k, w_k(z) and the error estimates
/// that produced them.
struct RobustnessState {
    double alpha = 0.0;
    double beta = 0.0;
    double w_global = 1.0;
    std::vector<double> measurement_weights;  // indexed like the measurement set
    double eps_f = 0.0;
    double eps_g = 0.0;
    double dof = 100.0;
    double kurtosis = 3.0;
    std::deque<double> innovation_window;  // normalized innovations for the kurtosis estimate
};

inline RobustnessState initial_robustness(const AdaptationConfig& cfg) {
    RobustnessState rs;
    rs.alpha = cfg.adaptive ? cfg.initial_alpha : cfg.pinned.alpha;
    rs.beta = cfg.adaptive ? cfg.initial_beta : cfg.pinned.tail_mix;
    rs.w_global = cfg.adaptive ? 1.0 : cfg.pinned.w_global;
    rs.dof = cfg.adaptive ? cfg.nu_max : cfg.pinned.dof;
    return rs;
}

/// Degrees of freedom for a measured kurtosis: max(3, floor(6/(k-3) + eps)),
/// capped at nu_max; nu_max in the Gaussian regime k <= 3.
inline double select_dof(double kurtosis, const AdaptationConfig& cfg) {
    if (kurtosis <= 3.0 + 1e-9) return cfg.nu_max;
    const double nu = std::floor(6.0 / (kurtosis - 3.0) + cfg.nu_eps);
    return std::min(cfg.nu_max, std::max(3.0, nu));
}

inline double alpha_law(double eps_f, double lambda_f) { return 1.0 - std::exp(-lambda_f * eps_f); }
inline double beta_law(double eps_g, double lambda_g) { return 1.0 - std::exp(-lambda_g * eps_g); }

/// Logistic detection-reliability weight 1 / (1 + exp(gamma_w (p_D sum(w) - |Z|))).
inline double global_weight_law(double detection, double predicted_mass, std::size_t num_meas, double gamma_w) {
    return 1.0 / (1.0 + std::exp(gamma_w * (detection * predicted_mass - static_cast<double>(num_meas))));
}

/// Softmax credibility exp(-gamma d(z)) / sum exp(-gamma d(z')).
inline std::vector<double> measurement_weight_law(std::span<const double> distances, double gamma) {
    std::vector<double> w(distances.size(), 0.0);
    if (distances.empty()) return w;
    const double dmin = *std::min_element(distances.begin(), distances.end());
    if (!std::isfinite(dmin)) {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
        return w;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp(-gamma * (distances[i] - dmin));
        sum += w[i];
    }
    for (auto& v : w) v /= sum;
    return w;
}

namespace detail {

/// log((1-beta) N(r; 0, S) + beta t_nu(r; 0, (nu-2)/nu S)) from a factor of S.
inline double log_robust_likelihood(const InnovationTerms& t, const Vector& residual, double dof, double beta) {
    const double maha = mahalanobis_sq(t.factor, residual);
    const auto dim = residual.size();
    const double log_q = log_gaussian_from_parts(maha, t.log_det, dim);
    if (beta <= 0.0) return log_q;
    if (!(dof > 2.0)) throw InvalidDof(dof);
    // Scale (nu-2)/nu * S: Mahalanobis grows by nu/(nu-2), log-det shrinks by dim*log((nu-2)/nu).
    const double shrink = (dof - 2.0) / dof;
    const double log_t = log_student_t_from_parts(maha / shrink, t.log_det + static_cast<double>(dim) * std::log(shrink),
                                                  dim, dof);
    if (beta >= 1.0) return log_t;
    return log_add_exp(std::log1p(-beta) + log_q, std::log(beta) + log_t);
}

inline std::vector<InnovationTerms> prepare_all(const GaussianMixture& mix, const MeasurementModel& mm) {
    std::vector<InnovationTerms> terms;
    terms.reserve(mix.size());
    for (std::size_t j = 0; j < mix.size(); ++j) terms.push_back(prepare_innovation(mix.components[j], mm, j));
    return terms;
}

}  // namespace detail

/// Heavy-tailed likelihood (1-beta) N(z; Hm, S) + beta t_nu(z; Hm, (nu-2)/nu S).
inline double robust_likelihood(const Vector& z, const GaussianComponent& component, const MeasurementModel& mm,
                                double dof, double beta) {
    const auto t = prepare_innovation(component, mm, 0);
    return std::exp(detail::log_robust_likelihood(t, innovation(mm, z, t.predicted), dof, beta));
}

/// Robust prediction: (1-alpha)-scaled survivors and spawns, alpha-scaled
/// copies of the prior (memory), beta-scaled births, in that order.
/// Produces J_{k-1}(1 + J_beta) + J_{k-1} + J_gamma components; the first
/// J_{k-1} are the survivors of the prior components in prior order.
inline GaussianMixture robust_predict(const GaussianMixture& prior, const MotionModel& motion, const SpawnModel& spawn,
                                      const BirthModel& birth, double alpha, double beta) {
    GaussianMixture out;
    out.step = prior.step + 1;
    out.components.reserve(prior.size() * (2 + spawn.terms.size()) + birth.intensity.size());
    const Matrix& f = motion.transition;
    const double keep = 1.0 - alpha;
    for (const auto& c : prior.components) {
        out.components.push_back({keep * (motion.survival * c.weight), f * c.mean,
                                  motion.process_noise + f * c.covariance * f.transpose()});
    }
    for (const auto& c : prior.components) {
        for (const auto& s : spawn.terms) {
            out.components.push_back({keep * (c.weight * s.weight), s.transition * c.mean + s.offset,
                                      s.noise + s.transition * c.covariance * s.transition.transpose()});
        }
    }
    for (const auto& c : prior.components) out.components.push_back({alpha * c.weight, c.mean, c.covariance});
    for (const auto& b : birth.intensity.components) out.components.push_back({beta * b.weight, b.mean, b.covariance});
    return out;
}

/// Adaptation laws evaluated on the just-predicted mixture, reusing
/// precomputed innovation terms for `pred`.
inline RobustnessState adapt_parameters(const GaussianMixture& prior, const GaussianMixture& pred,
                                        std::span<const InnovationTerms> terms, std::span<const Vector> meas,
                                        const MotionModel& motion, const MeasurementModel& mm,
                                        const AdaptationConfig& cfg, const RobustnessState& prev) {
    RobustnessState rs = prev;
    rs.measurement_weights.clear();

    // Dynamic model error over the nominal survivors.
    const std::size_t survivors = std::min(prior.size(), pred.size());
    double eps_f = 0.0;
    for (std::size_t i = 0; i < survivors; ++i) {
        const auto& p = pred.components[i];
        const Vector r = p.mean - motion.transition * prior.components[i].mean;
        const auto llt = detail::factorize_spd(p.covariance);
        eps_f += std::sqrt(detail::mahalanobis_sq(llt, r));
    }
    rs.eps_f = survivors > 0 ? eps_f / static_cast<double>(survivors) : 0.0;
    rs.alpha = alpha_law(rs.eps_f, cfg.lambda_f);
    rs.w_global = global_weight_law(mm.detection, total_mass(pred), meas.size(), cfg.gamma_w);

    if (meas.empty()) return rs;

    std::vector<double> distances(meas.size(), std::numeric_limits<double>::infinity());
    for (std::size_t zi = 0; zi < meas.size(); ++zi) {
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (!(pred.components[i].weight > 0.0)) continue;
            const Vector r = innovation(mm, meas[zi], terms[i].predicted);
            distances[zi] = std::min(distances[zi], std::sqrt(detail::mahalanobis_sq(terms[i].factor, r)));
        }
    }

    double sum = 0.0;
    std::size_t finite = 0;
    const auto nz = static_cast<double>(mm.measurement_dim());
    for (double d : distances) {
        if (!std::isfinite(d)) continue;
        sum += d;
        ++finite;
        if (d * d <= cfg.innovation_gate) {
            rs.innovation_window.push_back(d * d / nz);
            while (rs.innovation_window.size() > cfg.kurtosis_window) rs.innovation_window.pop_front();
        }
    }
    if (finite > 0) {
        rs.eps_g = sum / static_cast<double>(finite);
        rs.beta = beta_law(rs.eps_g, cfg.lambda_g);
    }
    rs.measurement_weights = measurement_weight_law(distances, cfg.gamma);

    // Kurtosis of the sign-symmetrized samples +-sqrt(delta): the mean is zero,
    // so m2 = mean(delta) and m4 = mean(delta^2).
    if (rs.innovation_window.size() >= cfg.kurtosis_min_samples) {
        double m2 = 0.0;
        double m4 = 0.0;
        for (double d : rs.innovation_window) {
            m2 += d;
            m4 += d * d;
        }
        m2 /= static_cast<double>(rs.innovation_window.size());
        m4 /= static_cast<double>(rs.innovation_window.size());
        if (m2 > 0.0) rs.kurtosis = std::clamp(m4 / (m2 * m2), 3.0, 30.0);
    }
    rs.dof = select_dof(rs.kurtosis, cfg);
    return rs;
}

inline RobustnessState adapt_parameters(const GaussianMixture& prior, const GaussianMixture& pred,
                                        std::span<const Vector> meas, const MotionModel& motion,
                                        const MeasurementModel& mm, const AdaptationConfig& cfg,
                                        const RobustnessState& prev) {
    const auto terms = detail::prepare_all(pred, mm);
    return adapt_parameters(prior, pred, terms, meas, motion, mm, cfg, prev);
}

/// Credibility-weighted heavy-tailed update using precomputed innovation terms.
inline GaussianMixture robust_update(const GaussianMixture& pred, std::span<const InnovationTerms> terms,
                                     std::span<const Vector> meas, const MeasurementModel& mm,
                                     const ClutterModel& clutter, const RobustnessState& rs) {
    const std::size_t n = pred.size();
    GaussianMixture out;
    out.step = pred.step;
    out.components.reserve(n * (1 + meas.size()));
    const double miss = 1.0 - rs.w_global * mm.detection;
    for (const auto& c : pred.components) out.components.push_back({miss * c.weight, c.mean, c.covariance});
    if (meas.empty() || n == 0) return out;

    const double log_pd = detail::safe_log(mm.detection);
    std::vector<double> log_num(n);
    std::vector<Vector> residuals(n);
    for (std::size_t zi = 0; zi < meas.size(); ++zi) {
        const auto& z = meas[zi];
        const double wz = rs.measurement_weights.empty() ? 1.0 : rs.measurement_weights[zi];
        const double log_scale = detail::safe_log(wz) + log_pd;
        for (std::size_t j = 0; j < n; ++j) {
            residuals[j] = innovation(mm, z, terms[j].predicted);
            const double log_q = detail::log_robust_likelihood(terms[j], residuals[j], rs.dof, rs.beta);
            log_num[j] = (log_scale + detail::safe_log(pred.components[j].weight)) + log_q;
        }
        const auto weights = normalized_detection_weights(log_num, clutter_intensity(clutter, z));
        for (std::size_t j = 0; j < n; ++j) {
            out.components.push_back({weights[j], pred.components[j].mean + terms[j].gain * residuals[j],
                                      terms[j].updated_cov});
        }
    }
    return out;
}

inline GaussianMixture robust_update(const GaussianMixture& pred, std::span<const Vector> meas,
                                     const MeasurementModel& mm, const ClutterModel& clutter,
                                     const RobustnessState& rs) {
    const auto terms = detail::prepare_all(pred, mm);
    return robust_update(pred, terms, meas, mm, clutter, rs);
}

struct RobustFilterConfig {
    ComponentManagementConfig management;
    AdaptationConfig adaptation;
};

struct RobustFilterState {
    GaussianMixture posterior;
    RobustnessState robustness;
};

inline RobustFilterState initial_robust_state(const RobustFilterConfig& cfg) {
    return {GaussianMixture{}, initial_robustness(cfg.adaptation)};
}

struct RobustStepResult {
    RobustFilterState state;
    StepDiagnostics diagnostics;
};

namespace detail {

/// Robustness parameters actually applied at this step (pinned or adapted).
inline RobustnessState pinned_robustness(const AdaptationConfig& cfg, std::size_t num_meas,
                                         const RobustnessState& prev) {
    RobustnessState rs = prev;
    rs.alpha = cfg.pinned.alpha;
    rs.beta = cfg.pinned.tail_mix;
    rs.w_global = cfg.pinned.w_global;
    rs.dof = cfg.pinned.dof;
    rs.measurement_weights.assign(num_meas, cfg.pinned.measurement_weight);
    return rs;
}

inline void fill_robust_diagnostics(StepDiagnostics& d, const RobustnessState& rs) {
    d.alpha = rs.alpha;
    d.beta = rs.beta;
    d.w_global = rs.w_global;
    d.eps_f = rs.eps_f;
    d.eps_g = rs.eps_g;
    d.dof = rs.dof;
    d.kurtosis = rs.kurtosis;
}

}  // namespace detail

/// One cycle of the robust filter: robust prediction with the previous
/// alpha/beta, adaptation on the new prediction, robust update, component
/// management and state extraction.
inline RobustStepResult step(const RobustFilterState& state, std::span<const Vector> meas, const SystemModels& models,
                             const RobustFilterConfig& cfg) {
    RobustStepResult r;
    auto& d = r.diagnostics;
    const auto& ad = cfg.adaptation;

    auto t0 = detail::Clock::now();
    const double alpha = ad.adaptive ? state.robustness.alpha : ad.pinned.alpha;
    const double birth_scale = ad.adaptive ? state.robustness.beta : ad.pinned.birth_scale;
    const auto pred = robust_predict(state.posterior, models.motion, models.spawn, models.birth, alpha, birth_scale);
    d.times.predict_ms = detail::elapsed_ms(t0);
    d.predicted_components = pred.size();

    t0 = detail::Clock::now();
    const auto terms = detail::prepare_all(pred, models.measurement);
    RobustnessState rs;
    if (ad.adaptive && !pred.empty()) {
        rs = adapt_parameters(state.posterior, pred, terms, meas, models.motion, models.measurement, ad,
                              state.robustness);
    } else if (ad.adaptive) {
        rs = state.robustness;
        rs.measurement_weights.assign(meas.size(), 1.0 / static_cast<double>(std::max<std::size_t>(1, meas.size())));
    } else {
        rs = detail::pinned_robustness(ad, meas.size(), state.robustness);
    }
    d.times.adapt_ms = detail::elapsed_ms(t0);

    t0 = detail::Clock::now();
    const auto upd = robust_update(pred, terms, meas, models.measurement, models.clutter, rs);
    d.times.update_ms = detail::elapsed_ms(t0);
    d.updated_components = upd.size();

    t0 = detail::Clock::now();
    r.state.posterior = manage_components(upd, cfg.management);
    check_covariances(r.state.posterior);
    d.times.manage_ms = detail::elapsed_ms(t0);

    t0 = detail::Clock::now();
    d.estimates = extract_states(r.state.posterior);
    d.times.extract_ms = detail::elapsed_ms(t0);

    r.state.robustness = std::move(rs);
    detail::fill_robust_diagnostics(d, r.state.robustness);
    d.component_count = r.state.posterior.size();
    d.total_mass = total_mass(r.state.posterior);
    d.max_condition = max_condition_number(r.state.posterior);
    return r;
}

}  // namespace rgmphd
