#pragma once

#include "seqcast/linalg.hpp"

#include <functional>

namespace seqcast {

/// Central-difference Jacobian of fn at x.
Matrix numeric_jacobian(const std::function<Vector(const Vector&)>& fn,
                        const Vector& x, double step = 1e-6);

/**
 * Nonlinear state-space model: state transition f, measurement h, their
 * Jacobians (numeric fallback when not supplied), and the process /
 * measurement noise covariances.
 */
struct StateSpaceModel {
    std::function<Vector(const Vector&)> f;
    std::function<Vector(const Vector&)> h;
    std::function<Matrix(const Vector&)> jf; // optional
    std::function<Matrix(const Vector&)> jh; // optional
    Matrix q; // n×n process noise
    Matrix r; // m×m measurement noise

    Matrix jacobian_f(const Vector& x) const;
    Matrix jacobian_h(const Vector& x) const;
};

struct EkfState {
    Vector x_hat; // state estimate
    Matrix p;     // estimate covariance
};

/// Time update: x̂⁻ = f(x̂), P⁻ = J_f P J_fᵀ + Q with J_f at the prior estimate.
EkfState predict(const StateSpaceModel& model, const EkfState& state);

/**
 * Measurement update: S = J_h P⁻ J_hᵀ + R, K = P⁻ J_hᵀ S⁻¹,
 * x̂⁺ = x̂⁻ + K(y − h(x̂⁻)), P⁺ = (I − K J_h) P⁻, then P symmetrized.
 * Throws SingularSystemError when the innovation covariance degenerates.
 */
EkfState update(const StateSpaceModel& model, const EkfState& predicted,
                const Vector& y);

/// Level+trend random-walk model for scalar series: x = [level, trend],
/// f(x) = [level+trend, trend], h(x) = level, analytic Jacobians.
StateSpaceModel local_linear_trend(double q_level, double q_trend, double r);

/// One-step-ahead forecaster over a scalar measurement model.
class EkfForecaster {
public:
    EkfForecaster(StateSpaceModel model, EkfState init);

    /// Assimilates an arrived observation (predict + update).
    void observe(double y);
    /// Next-step point forecast h(f(x̂)) from the current estimate.
    double predict_next() const;

    const EkfState& state() const { return state_; }

private:
    StateSpaceModel model_;
    EkfState state_;
};

} // namespace seqcast
