#pragma once

#include "rgmphd/errors.hpp"
#include "rgmphd/gaussian_mixture.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

namespace rgmphd {

// State layout throughout the library: (p_x, p_y, v_x, v_y).

struct MotionModel {
    Matrix transition;       // F
    Matrix process_noise;    // Q
    double survival = 0.99;  // p_S
};

struct SpawnTerm {
    double weight = 0.0;
    Matrix transition;  // F_beta
    Vector offset;      // d_beta
    Matrix noise;       // Q_beta
};

struct SpawnModel {
    std::vector<SpawnTerm> terms;
};

struct BirthModel {
    GaussianMixture intensity;
};

enum class MeasurementKind { linear, range_bearing };

struct MeasurementModel {
    MeasurementKind kind = MeasurementKind::linear;
    Matrix observation;  // H, unused for range_bearing
    Matrix noise;        // R
    double detection = 0.98;  // p_D
    double range_floor = 1e-6;

    [[nodiscard]] Eigen::Index measurement_dim() const { return noise.rows(); }
};

/// Homogeneous Poisson clutter, uniform over an axis-aligned box.
struct ClutterModel {
    double rate = 10.0;  // expected false alarms per scan
    Vector lower;
    Vector upper;

    [[nodiscard]] double volume() const {
        double v = 1.0;
        for (Eigen::Index i = 0; i < lower.size(); ++i) v *= upper(i) - lower(i);
        return v;
    }

    [[nodiscard]] bool contains(const Vector& z) const {
        for (Eigen::Index i = 0; i < lower.size(); ++i)
            if (z(i) < lower(i) || z(i) > upper(i)) return false;
        return true;
    }
};

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = a - two_pi * std::floor((a + std::numbers::pi) / two_pi);
    if (w <= -std::numbers::pi) w += two_pi;
    if (w > std::numbers::pi) w -= two_pi;
    return w;
}

struct PredictedMeasurement {
    Vector z;
    Matrix jacobian;
};

/// Predicted measurement h(x) and its Jacobian at x (H itself when linear).
inline PredictedMeasurement predict_measurement(const MeasurementModel& model, const Vector& x) {
    if (model.kind == MeasurementKind::linear) return {model.observation * x, model.observation};

    const double px = x(0);
    const double py = x(1);
    const double r2 = px * px + py * py;
    const double r = std::sqrt(r2);
    if (!(r >= model.range_floor)) throw DegenerateGeometry("target at sensor origin (range " + std::to_string(r) + ")");

    PredictedMeasurement out;
    out.z.resize(2);
    out.z << r, std::atan2(py, px);
    out.jacobian = Matrix::Zero(2, x.size());
    out.jacobian(0, 0) = px / r;
    out.jacobian(0, 1) = py / r;
    out.jacobian(1, 0) = -py / r2;
    out.jacobian(1, 1) = px / r2;
    return out;
}

/// z - z_hat with the bearing coordinate wrapped for range-bearing sensors.
inline Vector innovation(const MeasurementModel& model, const Vector& z, const Vector& z_hat) {
    Vector r = z - z_hat;
    if (model.kind == MeasurementKind::range_bearing) r(1) = wrap_angle(r(1));
    return r;
}

inline double clutter_intensity(const ClutterModel& model, const Vector& z) {
    if (model.rate <= 0.0 || !model.contains(z)) return 0.0;
    return model.rate / model.volume();
}

inline Matrix constant_velocity_transition(double dt) {
    Matrix f = Matrix::Identity(4, 4);
    f(0, 2) = dt;
    f(1, 3) = dt;
    return f;
}

/// Coordinated-turn transition for turn rate omega; reduces to constant
/// velocity as omega -> 0.
inline Matrix coordinated_turn_transition(double omega, double dt) {
    double s_over_w = dt;      // sin(w dt)/w
    double c_over_w = 0.0;     // (1 - cos(w dt))/w
    if (std::abs(omega) > 1e-9) {
        s_over_w = std::sin(omega * dt) / omega;
        c_over_w = (1.0 - std::cos(omega * dt)) / omega;
    } else {
        const double a = omega * dt;
        c_over_w = 0.5 * a * dt;
    }
    const double c = std::cos(omega * dt);
    const double s = std::sin(omega * dt);
    Matrix f = Matrix::Zero(4, 4);
    f(0, 0) = 1.0;
    f(0, 2) = s_over_w;
    f(0, 3) = -c_over_w;
    f(1, 1) = 1.0;
    f(1, 2) = c_over_w;
    f(1, 3) = s_over_w;
    f(2, 2) = c;
    f(2, 3) = -s;
    f(3, 2) = s;
    f(3, 3) = c;
    return f;
}

}  // namespace rgmphd
