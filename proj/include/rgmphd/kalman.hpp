#pragma once

#include "rgmphd/errors.hpp"
#include "rgmphd/gaussian_mixture.hpp"
#include "rgmphd/models.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace rgmphd {

/// Per-component quantities of a (linearized) Kalman measurement update that
/// do not depend on the measurement value.
struct InnovationTerms {
    Vector predicted;       // z_hat = h(m)
    Matrix jacobian;        // H
    Matrix covariance;      // S = H P H' + R
    Eigen::LLT<Matrix> factor;
    double log_det = 0.0;   // log |S|
    Matrix gain;            // K = P H' S^{-1}
    Matrix updated_cov;     // Joseph form (I-KH) P (I-KH)' + K R K'
};

/// Builds S, K and the updated covariance for one component. A failed
/// Cholesky of S raises SingularInnovation carrying `index`.
inline InnovationTerms prepare_innovation(const GaussianComponent& c, const MeasurementModel& mm, std::size_t index) {
    InnovationTerms t;
    auto pred = predict_measurement(mm, c.mean);
    t.predicted = std::move(pred.z);
    t.jacobian = std::move(pred.jacobian);
    const Matrix ph = c.covariance * t.jacobian.transpose();
    Matrix s = t.jacobian * ph + mm.noise;
    t.covariance = 0.5 * (s + s.transpose());
    t.factor.compute(t.covariance);
    if (t.factor.info() != Eigen::Success) throw SingularInnovation(index);
    const auto diag = t.factor.matrixLLT().diagonal();
    if ((diag.array() <= 0.0).any() || !diag.allFinite()) throw SingularInnovation(index);
    t.log_det = detail::log_det_from_llt(t.factor);
    t.gain = t.factor.solve(ph.transpose()).transpose();
    const auto n = c.covariance.rows();
    const Matrix ikh = Matrix::Identity(n, n) - t.gain * t.jacobian;
    Matrix p = ikh * c.covariance * ikh.transpose() + t.gain * mm.noise * t.gain.transpose();
    t.updated_cov = 0.5 * (p + p.transpose());
    return t;
}

}  // namespace rgmphd
