#include "seqcast/ekf.hpp"

#include "seqcast/errors.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace seqcast {

Matrix numeric_jacobian(const std::function<Vector(const Vector&)>& fn,
                        const Vector& x, double step) {
    if (!(step > 0.0)) {
        throw DimensionError("numeric_jacobian: step must be > 0");
    }
    const Vector base = fn(x);
    Matrix jac = Matrix::zeros(base.size(), x.size());
    std::vector<double> probe(x.begin(), x.end());
    for (std::size_t c = 0; c < x.size(); ++c) {
        const double saved = probe[c];
        probe[c] = saved + step;
        const Vector up = fn(Vector(probe));
        probe[c] = saved - step;
        const Vector down = fn(Vector(probe));
        probe[c] = saved;
        if (up.size() != base.size() || down.size() != base.size()) {
            throw DimensionError("numeric_jacobian: fn output size varies");
        }
        for (std::size_t r = 0; r < base.size(); ++r) {
            jac(r, c) = (up[r] - down[r]) / (2.0 * step);
        }
    }
    return jac;
}

Matrix StateSpaceModel::jacobian_f(const Vector& x) const {
    return jf ? jf(x) : numeric_jacobian(f, x);
}

Matrix StateSpaceModel::jacobian_h(const Vector& x) const {
    return jh ? jh(x) : numeric_jacobian(h, x);
}

namespace {

Matrix symmetrize(const Matrix& p) {
    Matrix out = Matrix::zeros(p.rows(), p.cols());
    for (std::size_t r = 0; r < p.rows(); ++r)
        for (std::size_t c = 0; c < p.cols(); ++c)
            out(r, c) = 0.5 * (p(r, c) + p(c, r));
    return out;
}

void require_finite_state(const EkfState& state, const char* where) {
    for (const double v : state.x_hat) {
        if (!std::isfinite(v)) throw DivergenceError(std::string(where) + ": non-finite state");
    }
    for (const double v : state.p.span()) {
        if (!std::isfinite(v)) throw DivergenceError(std::string(where) + ": non-finite covariance");
    }
}

} // namespace

EkfState predict(const StateSpaceModel& model, const EkfState& state) {
    const std::size_t n = state.x_hat.size();
    if (state.p.rows() != n || state.p.cols() != n || model.q.rows() != n) {
        throw DimensionError("ekf predict: state/covariance dimensions disagree");
    }
    const Vector x_prior = model.f(state.x_hat);
    if (x_prior.size() != n) {
        throw DimensionError("ekf predict: f changes state dimension");
    }
    const Matrix jac = model.jacobian_f(state.x_hat);
    const Matrix p_prior =
        add(matmul(matmul(jac, state.p), transpose(jac)), model.q);
    EkfState out{x_prior, p_prior};
    require_finite_state(out, "ekf predict");
    return out;
}

EkfState update(const StateSpaceModel& model, const EkfState& predicted,
                const Vector& y) {
    const std::size_t n = predicted.x_hat.size();
    const std::size_t m = y.size();
    if (model.r.rows() != m || model.r.cols() != m) {
        throw DimensionError("ekf update: measurement noise dimension mismatch");
    }
    const Vector y_hat = model.h(predicted.x_hat);
    if (y_hat.size() != m) {
        throw DimensionError("ekf update: observation dimension mismatch");
    }
    const Matrix jh = model.jacobian_h(predicted.x_hat); // m×n

    // innovation covariance
    const Matrix p_jh_t = matmul(predicted.p, transpose(jh)); // n×m
    const Matrix s = add(matmul(jh, p_jh_t), model.r);        // m×m

    // gain via SPD solve: S Kᵀ = (P⁻ J_hᵀ)ᵀ
    Matrix gain_t(m, n, std::vector<double>(m * n, 0.0));
    try {
        gain_t = solve_spd_multi(s, transpose(p_jh_t));
    } catch (const SingularSystemError&) {
        throw SingularSystemError("ekf update: degenerate innovation covariance");
    }
    const Matrix gain = transpose(gain_t); // n×m

    const Vector innovation = sub(y, y_hat);
    const Vector x_post = add(predicted.x_hat, matvec(gain, innovation));

    Matrix i_minus_kjh = Matrix::identity(n);
    const Matrix kjh = matmul(gain, jh);
    for (std::size_t row = 0; row < n; ++row)
        for (std::size_t col = 0; col < n; ++col)
            i_minus_kjh(row, col) -= kjh(row, col);
    const Matrix p_post = matmul(i_minus_kjh, predicted.p);
    EkfState out{x_post, symmetrize(p_post)};
    require_finite_state(out, "ekf update");
    return out;
}

StateSpaceModel local_linear_trend(double q_level, double q_trend, double r) {
    StateSpaceModel model{
        [](const Vector& x) {
            return Vector({x[0] + x[1], x[1]});
        },
        [](const Vector& x) { return Vector({x[0]}); },
        [](const Vector&) {
            return Matrix(2, 2, {1.0, 1.0, 0.0, 1.0});
        },
        [](const Vector&) { return Matrix(1, 2, {1.0, 0.0}); },
        Matrix(2, 2, {q_level, 0.0, 0.0, q_trend}),
        Matrix(1, 1, {r}),
    };
    return model;
}

EkfForecaster::EkfForecaster(StateSpaceModel model, EkfState init)
    : model_(std::move(model)), state_(std::move(init)) {
    if (model_.r.rows() != 1) {
        throw DimensionError("EkfForecaster: scalar measurement model required");
    }
}

void EkfForecaster::observe(double y) {
    state_ = update(model_, predict(model_, state_), Vector({y}));
}

double EkfForecaster::predict_next() const {
    return model_.h(model_.f(state_.x_hat))[0];
}

} // namespace seqcast
