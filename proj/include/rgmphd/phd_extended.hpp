#pragma once

#include "rgmphd/errors.hpp"
#include "rgmphd/gaussian_mixture.hpp"
#include "rgmphd/kalman.hpp"
#include "rgmphd/models.hpp"
#include "rgmphd/phd_robust.hpp"
#include "rgmphd/phd_standard.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <set>
#include <span>
#include <vector>

namespace rgmphd {

using Cell = std::vector<std::size_t>;  // sorted measurement indices

/// A decomposition of (a subset of) the measurement set into disjoint cells.
/// Cells are kept in canonical order: indices ascending inside a cell, cells
/// ordered by their smallest index.
struct Partition {
    std::vector<Cell> cells;
    std::vector<double> credibility;  // w_W per cell, filled by assign_credibility

    friend bool operator==(const Partition& a, const Partition& b) { return a.cells == b.cells; }
};

struct ExtendedTargetModel {
    double rate = 4.0;  // lambda: expected measurements per target per scan
    bool merge_duplicate_cells = false;
};

namespace detail {

inline void canonicalize(Partition& p) {
    for (auto& c : p.cells) std::sort(c.begin(), c.end());
    std::sort(p.cells.begin(), p.cells.end(), [](const Cell& a, const Cell& b) { return a.front() < b.front(); });
}

}  // namespace detail

/// Every set partition of {0, ..., n-1}, enumerated by restricted growth
/// strings. There are Bell(n) of them.
inline std::vector<Partition> enumerate_partitions(std::size_t n) {
    if (n > 8) throw TooLarge("enumerate_partitions: " + std::to_string(n) + " measurements (limit 8)");
    std::vector<Partition> out;
    if (n == 0) {
        out.emplace_back();
        return out;
    }
    std::vector<std::size_t> label(n, 0);
    std::vector<std::size_t> max_before(n, 0);  // max label among positions < i
    while (true) {
        Partition p;
        const std::size_t blocks = 1 + *std::max_element(label.begin(), label.end());
        p.cells.resize(blocks);
        for (std::size_t i = 0; i < n; ++i) p.cells[label[i]].push_back(i);
        out.push_back(std::move(p));

        // Next restricted growth string: bump the rightmost position that may grow.
        std::size_t i = n - 1;
        while (i > 0 && label[i] > max_before[i]) --i;
        if (i == 0) break;
        ++label[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            label[j] = 0;
            max_before[j] = std::max(max_before[j - 1], label[j - 1]);
        }
    }
    return out;
}

inline std::vector<Partition> enumerate_partitions(std::span<const Vector> meas) {
    return enumerate_partitions(meas.size());
}

/// Single-linkage clustering of the measurements at each threshold, plus the
/// all-singletons partition; duplicates removed, singletons first.
inline std::vector<Partition> distance_partition(std::span<const Vector> meas, std::span<const double> thresholds) {
    const std::size_t n = meas.size();
    std::vector<Partition> out;
    auto add = [&out](Partition p) {
        detail::canonicalize(p);
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
    };

    Partition singletons;
    for (std::size_t i = 0; i < n; ++i) singletons.cells.push_back({i});
    add(std::move(singletons));

    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) dist[i * n + j] = dist[j * n + i] = (meas[i] - meas[j]).norm();

    std::vector<std::size_t> parent(n);
    auto find = [&parent](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (double th : thresholds) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (dist[i * n + j] <= th) parent[find(i)] = find(j);
        std::vector<std::vector<std::size_t>> groups(n);
        for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
        Partition p;
        for (auto& g : groups)
            if (!g.empty()) p.cells.push_back(std::move(g));
        add(std::move(p));
    }
    return out;
}

/// Default clustering distances {0.5, 1, 2, 4} * sqrt(trace(R)).
inline std::vector<double> default_thresholds(const MeasurementModel& mm) {
    const double s = std::sqrt(mm.noise.trace());
    return {0.5 * s, 1.0 * s, 2.0 * s, 4.0 * s};
}

/// w_W = product of member credibilities; an empty weight list means all ones.
inline double cell_credibility(const Cell& cell, std::span<const double> weights) {
    double w = 1.0;
    if (weights.empty()) return w;
    for (auto i : cell) w *= weights[i];
    return w;
}

inline void assign_credibility(std::vector<Partition>& partitions, std::span<const double> weights) {
    for (auto& p : partitions) {
        p.credibility.clear();
        for (const auto& c : p.cells) p.credibility.push_back(cell_credibility(c, weights));
    }
}

/// log(e^{-lambda} lambda^n / n!).
inline double log_poisson_count(double lambda, std::size_t n) {
    if (lambda <= 0.0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    const auto k = static_cast<double>(n);
    return -lambda + k * std::log(lambda) - std::lgamma(k + 1.0);
}

/// g_W from already-evaluated point likelihoods p(z|x), z in W.
inline double cell_likelihood(double lambda, std::span<const double> point_likelihoods) {
    double g = std::exp(log_poisson_count(lambda, point_likelihoods.size()));
    for (double p : point_likelihoods) g *= p;
    return g;
}

/// Result of conditioning a Gaussian component on every measurement of a cell.
struct CellConditioning {
    double log_likelihood = 0.0;  // log of the product of predictive densities
    Vector mean;
    Matrix covariance;
};

/// Sequential Kalman conditioning on the cell members in order; the product
/// of predictive likelihoods equals the joint integral of prod p(z|x)
/// against the component.
inline CellConditioning condition_on_cell(const GaussianComponent& c, std::span<const Vector> meas, const Cell& cell,
                                          const MeasurementModel& mm, std::size_t index = 0) {
    CellConditioning out{0.0, c.mean, c.covariance};
    for (auto zi : cell) {
        const GaussianComponent running{1.0, out.mean, out.covariance};
        const auto t = prepare_innovation(running, mm, index);
        const Vector r = innovation(mm, meas[zi], t.predicted);
        out.log_likelihood +=
            detail::log_gaussian_from_parts(detail::mahalanobis_sq(t.factor, r), t.log_det, r.size());
        out.mean = out.mean + t.gain * r;
        out.covariance = t.updated_cov;
    }
    return out;
}

/// integral of g_W(x) N(x; m, P) dx for a Gaussian measurement model.
inline double cell_likelihood(std::span<const Vector> meas, const Cell& cell, const GaussianComponent& c,
                              const ExtendedTargetModel& etm, const MeasurementModel& mm) {
    if (cell.empty()) throw std::invalid_argument("cell_likelihood: empty cell");
    const auto cond = condition_on_cell(c, meas, cell, mm);
    return std::exp(log_poisson_count(etm.rate, cell.size()) + cond.log_likelihood);
}

/// Extended-target robust update: missed-detection copies scaled by
/// (1 - w_global p_D), then for every retained cell W of every partition one
/// conditioned copy per component with weight
///   w_W p_D w_j g_W,j / (kappa^{|W|} + w_W p_D sum_l w_l g_W,l).
/// Cells with w_W < prune_eps are skipped.
inline GaussianMixture extended_update(const GaussianMixture& pred, std::span<const Vector> meas,
                                       std::span<const Partition> partitions, const ExtendedTargetModel& etm,
                                       const MeasurementModel& mm, const ClutterModel& clutter,
                                       const RobustnessState& rs, double prune_eps = 1e-6) {
    const std::size_t n = pred.size();
    GaussianMixture out;
    out.step = pred.step;
    const double miss = 1.0 - rs.w_global * mm.detection;
    for (const auto& c : pred.components) out.components.push_back({miss * c.weight, c.mean, c.covariance});
    if (meas.empty() || n == 0) return out;

    std::set<Cell> seen;
    const double log_pd = detail::safe_log(mm.detection);
    std::vector<double> log_num(n);
    std::vector<CellConditioning> cond(n);
    for (const auto& part : partitions) {
        for (const auto& cell : part.cells) {
            if (cell.empty()) continue;
            if (etm.merge_duplicate_cells && !seen.insert(cell).second) continue;
            const double w_cell = cell_credibility(cell, rs.measurement_weights);
            if (w_cell < prune_eps) continue;

            double log_kappa = 0.0;
            for (auto zi : cell) log_kappa += detail::safe_log(clutter_intensity(clutter, meas[zi]));
            const double log_scale = detail::safe_log(w_cell) + log_pd + log_poisson_count(etm.rate, cell.size());
            for (std::size_t j = 0; j < n; ++j) {
                cond[j] = condition_on_cell(pred.components[j], meas, cell, mm, j);
                log_num[j] = (log_scale + detail::safe_log(pred.components[j].weight)) + cond[j].log_likelihood;
            }
            std::vector<double> terms(log_num);
            terms.push_back(log_kappa);
            const double log_den = detail::log_sum_exp(terms);
            for (std::size_t j = 0; j < n; ++j) {
                const double w = log_den == -std::numeric_limits<double>::infinity() ? 0.0
                                                                                      : std::exp(log_num[j] - log_den);
                out.components.push_back({w, std::move(cond[j].mean), std::move(cond[j].covariance)});
            }
        }
    }
    return out;
}

struct ExtendedFilterConfig {
    ComponentManagementConfig management;
    AdaptationConfig adaptation;
    ExtendedTargetModel target;
    std::vector<double> threshold_scales{0.5, 1.0, 2.0, 4.0};  // multiples of sqrt(trace(R))
    double prune_eps = 1e-6;
};

/// One cycle of the robust extended-target filter. Prediction and adaptation
/// follow the point-target robust filter; the update runs over distance
/// partitions of the measurement set.
inline RobustStepResult extended_step(const RobustFilterState& state, std::span<const Vector> meas,
                                      const SystemModels& models, const ExtendedFilterConfig& cfg) {
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
    RobustnessState rs;
    if (ad.adaptive && !pred.empty()) {
        rs = adapt_parameters(state.posterior, pred, meas, models.motion, models.measurement, ad, state.robustness);
    } else if (ad.adaptive) {
        rs = state.robustness;
        rs.measurement_weights.assign(meas.size(), 1.0 / static_cast<double>(std::max<std::size_t>(1, meas.size())));
    } else {
        rs = detail::pinned_robustness(ad, meas.size(), state.robustness);
    }
    d.times.adapt_ms = detail::elapsed_ms(t0);

    t0 = detail::Clock::now();
    const double scale = std::sqrt(models.measurement.noise.trace());
    std::vector<double> thresholds;
    for (double s : cfg.threshold_scales) thresholds.push_back(s * scale);
    std::sort(thresholds.begin(), thresholds.end());
    auto partitions = distance_partition(meas, thresholds);
    assign_credibility(partitions, rs.measurement_weights);
    const auto upd = extended_update(pred, meas, partitions, cfg.target, models.measurement, models.clutter, rs,
                                     cfg.prune_eps);
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
