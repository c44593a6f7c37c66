#pragma once

#include "rgmphd/models.hpp"
#include "rgmphd/phd_standard.hpp"
#include "rgmphd/rng.hpp"

#include <random>

namespace fixtures {

using namespace rgmphd;

inline MeasurementModel linear_sensor(double pd = 0.98) {
    MeasurementModel mm;
    mm.observation = Matrix::Zero(2, 4);
    mm.observation(0, 0) = 1.0;
    mm.observation(1, 1) = 1.0;
    mm.noise = 10.0 * Matrix::Identity(2, 2);
    mm.detection = pd;
    return mm;
}

inline ClutterModel square_clutter(double rate = 10.0) {
    ClutterModel c;
    c.rate = rate;
    c.lower = Eigen::Vector2d(-1000.0, -1000.0);
    c.upper = Eigen::Vector2d(1000.0, 1000.0);
    return c;
}

inline MotionModel cv_motion() {
    return {constant_velocity_transition(1.0), Eigen::Vector4d(1.0, 1.0, 0.5, 0.5).asDiagonal(), 0.99};
}

inline Matrix random_spd(int n, SplitMix64& rng, double scale = 1.0) {
    std::normal_distribution<double> g;
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = g(rng);
    return scale * (a * a.transpose() / n + 0.5 * Matrix::Identity(n, n));
}

inline GaussianMixture random_mixture(std::size_t j, SplitMix64& rng, double spread = 500.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GaussianMixture m;
    for (std::size_t i = 0; i < j; ++i) {
        Vector mean(4);
        mean << spread * (2.0 * u(rng) - 1.0), spread * (2.0 * u(rng) - 1.0), 10.0 * (u(rng) - 0.5), 10.0 * (u(rng) - 0.5);
        m.components.push_back({0.05 + u(rng), mean, random_spd(4, rng, 20.0)});
    }
    return m;
}

inline std::vector<Vector> random_measurements(std::size_t n, SplitMix64& rng, double spread = 500.0) {
    std::uniform_real_distribution<double> u(-spread, spread);
    std::vector<Vector> z;
    for (std::size_t i = 0; i < n; ++i) z.push_back(Eigen::Vector2d(u(rng), u(rng)));
    return z;
}

inline SpawnModel random_spawn(std::size_t n, SplitMix64& rng) {
    SpawnModel s;
    for (std::size_t i = 0; i < n; ++i)
        s.terms.push_back({0.05, Matrix::Identity(4, 4), Vector::Constant(4, 5.0), random_spd(4, rng, 10.0)});
    return s;
}

inline BirthModel random_birth(std::size_t n, SplitMix64& rng) { return {random_mixture(n, rng)}; }

}  // namespace fixtures
