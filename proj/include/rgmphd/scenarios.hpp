#pragma once

#include "rgmphd/errors.hpp"
#include "rgmphd/gaussian_mixture.hpp"
#include "rgmphd/models.hpp"
#include "rgmphd/phd_standard.hpp"
#include "rgmphd/rng.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace rgmphd {

enum class ScenarioKind { linear, nonlinear_ct, high_clutter, maneuvering };

inline std::string to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::linear: return "linear";
        case ScenarioKind::nonlinear_ct: return "nonlinear_ct";
        case ScenarioKind::high_clutter: return "high_clutter";
        case ScenarioKind::maneuvering: return "maneuvering";
    }
    return "linear";
}

inline std::optional<ScenarioKind> scenario_from_string(const std::string& s) {
    if (s == "linear") return ScenarioKind::linear;
    if (s == "nonlinear_ct") return ScenarioKind::nonlinear_ct;
    if (s == "high_clutter") return ScenarioKind::high_clutter;
    if (s == "maneuvering") return ScenarioKind::maneuvering;
    return std::nullopt;
}

/// Piecewise-constant detection probability: levels cycled every `period` steps.
struct DetectionSchedule {
    std::vector<double> levels{0.98};
    std::size_t period = 10;

    [[nodiscard]] double at(std::size_t k) const {
        if (levels.size() == 1 || period == 0) return levels.front();
        return levels[(k / period) % levels.size()];
    }
    [[nodiscard]] double mean() const {
        double s = 0.0;
        for (double l : levels) s += l;
        return s / static_cast<double>(levels.size());
    }
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::linear;
    std::size_t duration = 100;  // K
    double dt = 1.0;
    double birth_rate = 0.2;     // lambda_b
    double clutter_rate = 10.0;  // lambda_c
    DetectionSchedule detection;
    double survival = 0.99;
    double region_half_width = 1000.0;  // position region [-h, h]^2
    double birth_core_half_width = 500.0;
    std::size_t initial_tracks = 5;
    double initial_radius = 750.0;
    double speed_min = 8.0;
    double speed_max = 12.0;
    double turn_rate_max = std::numbers::pi / 18.0;
    double accel_max = 5.0;
    std::size_t maneuver_length = 10;
    double max_range = 1414.0;  // range-bearing clutter support
    std::uint64_t seed = 1;
};

/// Operating point of each named scenario.
inline ScenarioConfig default_scenario(ScenarioKind kind) {
    ScenarioConfig c;
    c.kind = kind;
    if (kind == ScenarioKind::high_clutter) {
        c.clutter_rate = 25.0;
        c.detection = {{0.6, 0.9}, 10};
    }
    return c;
}

struct TruthState {
    std::size_t id = 0;
    Vector state;
};

struct TrackSpan {
    std::size_t id = 0;
    std::size_t birth = 0;
    std::size_t death = 0;  // first step at which the track no longer exists
};

struct ScenarioTruth {
    std::vector<std::vector<TruthState>> steps;
    std::vector<TrackSpan> tracks;

    [[nodiscard]] std::vector<Vector> states_at(std::size_t k) const {
        std::vector<Vector> out;
        for (const auto& t : steps[k]) out.push_back(t.state);
        return out;
    }
};

inline constexpr long kClutterOrigin = -1;

struct MeasurementFrame {
    std::size_t step = 0;
    std::vector<Vector> measurements;
    std::vector<long> origins;  // track id, or kClutterOrigin
};

inline Matrix scenario_process_noise() { return Eigen::Vector4d(1.0, 1.0, 0.5, 0.5).asDiagonal(); }

inline MeasurementModel scenario_measurement_model(const ScenarioConfig& cfg, double detection) {
    MeasurementModel mm;
    mm.detection = detection;
    if (cfg.kind == ScenarioKind::nonlinear_ct) {
        mm.kind = MeasurementKind::range_bearing;
        mm.noise = Eigen::Vector2d(10.0, 0.01).asDiagonal();
    } else {
        mm.kind = MeasurementKind::linear;
        mm.observation = Matrix::Zero(2, 4);
        mm.observation(0, 0) = 1.0;
        mm.observation(1, 1) = 1.0;
        mm.noise = Eigen::Vector2d(10.0, 10.0).asDiagonal();
    }
    return mm;
}

inline ClutterModel scenario_clutter(const ScenarioConfig& cfg) {
    ClutterModel c;
    c.rate = cfg.clutter_rate;
    if (cfg.kind == ScenarioKind::nonlinear_ct) {
        c.lower = Eigen::Vector2d(0.0, -std::numbers::pi);
        c.upper = Eigen::Vector2d(cfg.max_range, std::numbers::pi);
    } else {
        c.lower = Eigen::Vector2d::Constant(-cfg.region_half_width);
        c.upper = Eigen::Vector2d::Constant(cfg.region_half_width);
    }
    return c;
}

/// Filter-side birth intensity: a 4x4 grid of Gaussians over the region
/// interior with total weight equal to the birth rate.
inline BirthModel grid_birth(const ScenarioConfig& cfg, std::size_t grid = 4, double pos_sigma = 300.0,
                             double vel_sigma = 10.0) {
    BirthModel b;
    const double span = 0.75 * cfg.region_half_width;
    const double w = cfg.birth_rate / static_cast<double>(grid * grid);
    const Matrix cov = Eigen::Vector4d(pos_sigma * pos_sigma, pos_sigma * pos_sigma, vel_sigma * vel_sigma,
                                       vel_sigma * vel_sigma)
                           .asDiagonal();
    for (std::size_t i = 0; i < grid; ++i) {
        for (std::size_t j = 0; j < grid; ++j) {
            Vector m = Vector::Zero(4);
            m(0) = -span + 2.0 * span * static_cast<double>(i) / static_cast<double>(grid - 1);
            m(1) = -span + 2.0 * span * static_cast<double>(j) / static_cast<double>(grid - 1);
            b.intensity.components.push_back({w, m, cov});
        }
    }
    return b;
}

/// Models a filter uses on a scenario: constant velocity motion, no spawning,
/// grid birth, the scenario sensor with the given detection probability.
inline SystemModels filter_models(const ScenarioConfig& cfg, double detection) {
    SystemModels m;
    m.motion = {constant_velocity_transition(cfg.dt), scenario_process_noise(), cfg.survival};
    m.birth = grid_birth(cfg);
    m.measurement = scenario_measurement_model(cfg, detection);
    m.clutter = scenario_clutter(cfg);
    return m;
}

namespace detail {

struct LiveTrack {
    std::size_t id;
    Vector x;
    double omega = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> maneuvers;  // [start, end)
    std::vector<Eigen::Vector2d> accel;
};

inline Vector sample_gaussian(const Matrix& cov, SplitMix64& rng) {
    std::normal_distribution<double> n01;
    Vector e(cov.rows());
    for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = n01(rng);
    return cov.llt().matrixL() * e;
}

}  // namespace detail

/// Ground-truth trajectories. Step 0 holds the initial tracks, placed evenly
/// on a circle and heading roughly inward. Each later step propagates the
/// surviving tracks, drops those that die or leave the region, and adds
/// Poisson(lambda_b) births uniformly in the region core.
inline ScenarioTruth generate_truth(const ScenarioConfig& cfg) {
    SplitMix64 rng(child_seed(cfg.seed, 0));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto uniform = [&](double a, double b) { return a + (b - a) * u01(rng); };
    const Matrix q = scenario_process_noise();
    const Matrix f_cv = constant_velocity_transition(cfg.dt);

    ScenarioTruth truth;
    truth.steps.resize(cfg.duration);
    std::vector<detail::LiveTrack> live;
    std::size_t next_id = 0;

    auto spawn_track = [&](Vector x, std::size_t k) {
        detail::LiveTrack t;
        t.id = next_id++;
        t.x = std::move(x);
        if (cfg.kind == ScenarioKind::nonlinear_ct) t.omega = uniform(-cfg.turn_rate_max, cfg.turn_rate_max);
        if (cfg.kind == ScenarioKind::maneuvering) {
            const auto windows = 1 + static_cast<std::size_t>(u01(rng) < 0.5);
            for (std::size_t w = 0; w < windows; ++w) {
                const auto onset = k + static_cast<std::size_t>(u01(rng) * static_cast<double>(cfg.duration));
                const double mag = uniform(0.0, cfg.accel_max);
                const double dir = uniform(-std::numbers::pi, std::numbers::pi);
                t.maneuvers.emplace_back(onset, onset + cfg.maneuver_length);
                t.accel.emplace_back(mag * std::cos(dir), mag * std::sin(dir));
            }
        }
        truth.tracks.push_back({t.id, k, cfg.duration});
        live.push_back(std::move(t));
    };

    for (std::size_t i = 0; i < cfg.initial_tracks; ++i) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(cfg.initial_tracks) +
                             uniform(-0.2, 0.2);
        const double heading = theta + std::numbers::pi + uniform(-std::numbers::pi / 8.0, std::numbers::pi / 8.0);
        const double speed = uniform(cfg.speed_min, cfg.speed_max);
        Vector x(4);
        x << cfg.initial_radius * std::cos(theta), cfg.initial_radius * std::sin(theta), speed * std::cos(heading),
            speed * std::sin(heading);
        spawn_track(std::move(x), 0);
    }

    auto record = [&](std::size_t k) {
        for (const auto& t : live) truth.steps[k].push_back({t.id, t.x});
    };
    if (cfg.duration > 0) record(0);

    for (std::size_t k = 1; k < cfg.duration; ++k) {
        std::vector<detail::LiveTrack> next;
        for (auto& t : live) {
            const bool survives = u01(rng) < cfg.survival;
            const Matrix f = cfg.kind == ScenarioKind::nonlinear_ct ? coordinated_turn_transition(t.omega, cfg.dt) : f_cv;
            Vector x = f * t.x + detail::sample_gaussian(q, rng);
            for (std::size_t w = 0; w < t.maneuvers.size(); ++w) {
                if (k >= t.maneuvers[w].first && k < t.maneuvers[w].second) {
                    const auto& a = t.accel[w];
                    x(0) += 0.5 * cfg.dt * cfg.dt * a.x();
                    x(1) += 0.5 * cfg.dt * cfg.dt * a.y();
                    x(2) += cfg.dt * a.x();
                    x(3) += cfg.dt * a.y();
                }
            }
            const bool inside = std::abs(x(0)) <= cfg.region_half_width && std::abs(x(1)) <= cfg.region_half_width;
            if (survives && inside) {
                t.x = std::move(x);
                next.push_back(std::move(t));
            } else {
                for (auto& span : truth.tracks)
                    if (span.id == t.id) span.death = k;
            }
        }
        live = std::move(next);

        std::poisson_distribution<int> births(cfg.birth_rate);
        const int nb = cfg.birth_rate > 0.0 ? births(rng) : 0;
        for (int b = 0; b < nb; ++b) {
            const double heading = uniform(-std::numbers::pi, std::numbers::pi);
            const double speed = uniform(cfg.speed_min, cfg.speed_max);
            Vector x(4);
            x << uniform(-cfg.birth_core_half_width, cfg.birth_core_half_width),
                uniform(-cfg.birth_core_half_width, cfg.birth_core_half_width), speed * std::cos(heading),
                speed * std::sin(heading);
            spawn_track(std::move(x), k);
        }
        record(k);
    }
    return truth;
}

/// Sensor output for every step: detections of live targets with the
/// scheduled p_D, then Poisson(lambda_c) clutter uniform over the clutter box.
inline std::vector<MeasurementFrame> generate_measurements(const ScenarioTruth& truth, const ScenarioConfig& cfg,
                                                           const MeasurementModel& mm, const ClutterModel& clutter) {
    SplitMix64 rng(child_seed(cfg.seed, 1));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const Matrix noise_l = mm.noise.llt().matrixL();
    std::normal_distribution<double> n01;

    std::vector<MeasurementFrame> frames(truth.steps.size());
    for (std::size_t k = 0; k < truth.steps.size(); ++k) {
        auto& fr = frames[k];
        fr.step = k;
        const double pd = cfg.detection.at(k);
        for (const auto& t : truth.steps[k]) {
            if (!(u01(rng) < pd)) continue;
            Vector e(mm.measurement_dim());
            for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = n01(rng);
            Vector z = predict_measurement(mm, t.state).z + noise_l * e;
            if (mm.kind == MeasurementKind::range_bearing) z(1) = wrap_angle(z(1));
            fr.measurements.push_back(std::move(z));
            fr.origins.push_back(static_cast<long>(t.id));
        }
        std::poisson_distribution<int> count(clutter.rate);
        const int nc = clutter.rate > 0.0 ? count(rng) : 0;
        for (int c = 0; c < nc; ++c) {
            Vector z(clutter.lower.size());
            for (Eigen::Index i = 0; i < z.size(); ++i)
                z(i) = clutter.lower(i) + (clutter.upper(i) - clutter.lower(i)) * u01(rng);
            fr.measurements.push_back(std::move(z));
            fr.origins.push_back(kClutterOrigin);
        }
    }
    return frames;
}

// Line-delimited JSON dumps. A scenario dump holds one object per step:
//   {"step":k,"measurements":[[..],..],"origins":[..],"truth":[[..],..],"truth_ids":[..]}
// An estimate dump holds {"step":k,"states":[[..],..]} per step.

inline nlohmann::json to_json_array(const Vector& v) {
    return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline Vector from_json_array(const nlohmann::json& j) {
    const auto vals = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

inline void write_scenario_dump(std::ostream& os, const ScenarioTruth& truth, const std::vector<MeasurementFrame>& frames) {
    for (std::size_t k = 0; k < frames.size(); ++k) {
        nlohmann::json line;
        line["step"] = k;
        line["measurements"] = nlohmann::json::array();
        for (const auto& z : frames[k].measurements) line["measurements"].push_back(to_json_array(z));
        line["origins"] = frames[k].origins;
        line["truth"] = nlohmann::json::array();
        line["truth_ids"] = nlohmann::json::array();
        if (k < truth.steps.size()) {
            for (const auto& t : truth.steps[k]) {
                line["truth"].push_back(to_json_array(t.state));
                line["truth_ids"].push_back(t.id);
            }
        }
        os << line.dump() << '\n';
    }
}

struct ScenarioDump {
    ScenarioTruth truth;
    std::vector<MeasurementFrame> frames;
};

inline ScenarioDump read_scenario_dump(std::istream& is) {
    ScenarioDump d;
    std::string text;
    std::size_t line_no = 0;
    while (std::getline(is, text)) {
        ++line_no;
        if (text.empty()) continue;
        nlohmann::json line;
        try {
            line = nlohmann::json::parse(text);
            MeasurementFrame fr;
            fr.step = line.at("step").get<std::size_t>();
            for (const auto& z : line.at("measurements")) fr.measurements.push_back(from_json_array(z));
            if (line.contains("origins")) fr.origins = line["origins"].get<std::vector<long>>();
            std::vector<TruthState> states;
            const auto& tr = line.at("truth");
            for (std::size_t i = 0; i < tr.size(); ++i) {
                const std::size_t id = line.contains("truth_ids") ? line["truth_ids"][i].get<std::size_t>() : i;
                states.push_back({id, from_json_array(tr[i])});
            }
            d.truth.steps.push_back(std::move(states));
            d.frames.push_back(std::move(fr));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, "", e.what());
        }
    }
    return d;
}

inline void write_estimate_dump(std::ostream& os, const std::vector<std::vector<Vector>>& estimates) {
    for (std::size_t k = 0; k < estimates.size(); ++k) {
        nlohmann::json line;
        line["step"] = k;
        line["states"] = nlohmann::json::array();
        for (const auto& x : estimates[k]) line["states"].push_back(to_json_array(x));
        os << line.dump() << '\n';
    }
}

/// Reads per-step state sets from either dump format ("states" or "truth").
inline std::vector<std::vector<Vector>> read_state_sets(std::istream& is) {
    std::vector<std::vector<Vector>> out;
    std::string text;
    std::size_t line_no = 0;
    while (std::getline(is, text)) {
        ++line_no;
        if (text.empty()) continue;
        try {
            const auto line = nlohmann::json::parse(text);
            const auto& arr = line.contains("states") ? line.at("states") : line.at("truth");
            std::vector<Vector> states;
            for (const auto& x : arr) states.push_back(from_json_array(x));
            out.push_back(std::move(states));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, "", e.what());
        }
    }
    return out;
}

}  // namespace rgmphd
