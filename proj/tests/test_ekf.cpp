#include "seqcast/ekf.hpp"
#include "seqcast/errors.hpp"
#include "seqcast/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace seqcast;

namespace {

StateSpaceModel scalar_identity_model(double q, double r) {
    return StateSpaceModel{
        [](const Vector& x) { return x; },
        [](const Vector& x) { return x; },
        [](const Vector&) { return Matrix::identity(1); },
        [](const Vector&) { return Matrix::identity(1); },
        Matrix(1, 1, {q}),
        Matrix(1, 1, {r}),
    };
}

// Plain textbook linear Kalman filter, coded independently of the EKF path:
// the oracle for the linear-model equivalence test.
struct LinearKfOracle {
    Matrix a, h, q, r;
    Vector x;
    Matrix p;

    void step(double y) {
        // predict
        x = matvec(a, x);
        p = add(matmul(matmul(a, p), transpose(a)), q);
        // update
        const Matrix ph_t = matmul(p, transpose(h));
        const Matrix s = add(matmul(h, ph_t), r);
        const double gain0 = ph_t(0, 0) / s(0, 0);
        const double gain1 = ph_t(1, 0) / s(0, 0);
        const double innovation = y - (h(0, 0) * x[0] + h(0, 1) * x[1]);
        x = Vector({x[0] + gain0 * innovation, x[1] + gain1 * innovation});
        Matrix i_kh = Matrix::identity(2);
        i_kh(0, 0) -= gain0 * h(0, 0);
        i_kh(0, 1) -= gain0 * h(0, 1);
        i_kh(1, 0) -= gain1 * h(0, 0);
        i_kh(1, 1) -= gain1 * h(0, 1);
        p = matmul(i_kh, p);
        // mirror the filter's symmetry hygiene
        const double off = 0.5 * (p(0, 1) + p(1, 0));
        p(0, 1) = off;
        p(1, 0) = off;
    }
};

} // namespace

TEST_CASE("predict leaves an identity model with zero process noise unchanged") {
    const StateSpaceModel model = scalar_identity_model(0.0, 1.0);
    const EkfState state{Vector({1.7}), Matrix(1, 1, {2.0})};
    const EkfState next = predict(model, state);
    CHECK(next.x_hat[0] == 1.7);
    CHECK(next.p(0, 0) == 2.0);
}

TEST_CASE("predict adds process noise to the propagated covariance") {
    const StateSpaceModel model = scalar_identity_model(0.5, 1.0);
    const EkfState next =
        predict(model, EkfState{Vector({0.0}), Matrix(1, 1, {1.0})});
    CHECK(next.p(0, 0) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("predict advances the level by the trend in the level+trend model") {
    const StateSpaceModel model = local_linear_trend(0.0, 0.0, 1.0);
    const EkfState next = predict(
        model, EkfState{Vector({1.0, 0.1}), Matrix::identity(2)});
    CHECK(next.x_hat[0] == doctest::Approx(1.1).epsilon(1e-12));
    CHECK(next.x_hat[1] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("update: scalar identity case has the textbook gain") {
    const StateSpaceModel model = scalar_identity_model(0.0, 1.0);
    const EkfState predicted{Vector({0.0}), Matrix(1, 1, {1.0})};
    const EkfState posterior = update(model, predicted, Vector({2.0}));
    // K = P/(P+R) = 0.5
    CHECK(posterior.x_hat[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(posterior.p(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("update with enormous measurement noise ignores the observation") {
    const StateSpaceModel model = scalar_identity_model(0.0, 1e12);
    const EkfState predicted{Vector({3.0}), Matrix(1, 1, {1.0})};
    const EkfState posterior = update(model, predicted, Vector({100.0}));
    CHECK(posterior.x_hat[0] == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("update reports a degenerate innovation covariance") {
    const StateSpaceModel model = scalar_identity_model(0.0, 0.0);
    const EkfState predicted{Vector({0.0}), Matrix(1, 1, {0.0})};
    CHECK_THROWS_AS(update(model, predicted, Vector({1.0})),
                    SingularSystemError);
}

TEST_CASE("EKF equals the linear Kalman filter oracle on a linear model") {
    const double q_level = 1e-3, q_trend = 1e-4, r = 0.25;
    const StateSpaceModel model = local_linear_trend(q_level, q_trend, r);

    LinearKfOracle oracle{Matrix(2, 2, {1, 1, 0, 1}), Matrix(1, 2, {1, 0}),
                          Matrix(2, 2, {q_level, 0, 0, q_trend}),
                          Matrix(1, 1, {r}), Vector({0.0, 0.0}),
                          Matrix::identity(2)};
    EkfState state{Vector({0.0, 0.0}), Matrix::identity(2)};

    SeededRng rng(321);
    double truth_level = 5.0, truth_trend = 0.02;
    for (int step = 0; step < 100; ++step) {
        truth_level += truth_trend;
        const double y = truth_level + rng.normal(0.0, std::sqrt(r));
        state = update(model, predict(model, state), Vector({y}));
        oracle.step(y);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(std::abs(state.x_hat[i] - oracle.x[i]) <= 1e-10);
            for (std::size_t j = 0; j < 2; ++j) {
                CHECK(std::abs(state.p(i, j) - oracle.p(i, j)) <= 1e-10);
            }
        }
    }
}

TEST_CASE("numeric jacobian basics") {
    const auto identity = [](const Vector& x) { return x; };
    const Matrix ji = numeric_jacobian(identity, Vector({1.0, -2.0}));
    CHECK(ji(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ji(0, 1) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(ji(1, 1) == doctest::Approx(1.0).epsilon(1e-9));

    const auto fn = [](const Vector& x) {
        return Vector({x[0] * x[0], x[1]});
    };
    const Matrix j = numeric_jacobian(fn, Vector({3.0, 5.0}));
    CHECK(j(0, 0) == doctest::Approx(6.0).epsilon(1e-6));
    CHECK(j(0, 1) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(j(1, 0) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(j(1, 1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("numeric jacobian matches the analytic level+trend jacobians") {
    const StateSpaceModel model = local_linear_trend(0.0, 0.0, 1.0);
    const Vector at({2.0, -0.5});
    const Matrix jf_numeric = numeric_jacobian(model.f, at);
    const Matrix jf_analytic = model.jf(at);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(jf_numeric(i, j) ==
                  doctest::Approx(jf_analytic(i, j)).epsilon(1e-9));
}

TEST_CASE("numeric jacobian is used when no analytic one is supplied") {
    StateSpaceModel model = scalar_identity_model(0.0, 1.0);
    model.jf = nullptr;
    model.jh = nullptr;
    const EkfState next =
        predict(model, EkfState{Vector({1.0}), Matrix(1, 1, {1.0})});
    CHECK(next.p(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("forecaster: first prediction precedes any observation") {
    const StateSpaceModel model = local_linear_trend(1e-4, 1e-4, 1e-2);
    const EkfForecaster fc(model, EkfState{Vector({2.0, 0.5}),
                                           Matrix::identity(2)});
    // h(f(x)) = level + trend
    CHECK(fc.predict_next() == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("forecaster converges on a constant series") {
    const StateSpaceModel model = local_linear_trend(1e-6, 1e-6, 1e-2);
    EkfForecaster fc(model, EkfState{Vector({0.0, 1.0}), Matrix::identity(2)});
    const double constant = 5.0;
    double early_error = 0.0, late_error = 0.0;
    for (int step = 0; step < 200; ++step) {
        const double err = std::abs(fc.predict_next() - constant);
        if (step == 10) early_error = err;
        if (step == 199) late_error = err;
        fc.observe(constant);
    }
    CHECK(late_error < early_error);
    CHECK(late_error < 1e-3);
}

TEST_CASE("forecaster trend converges to the slope of a noiseless ramp") {
    const StateSpaceModel model = local_linear_trend(1e-6, 1e-6, 1e-2);
    // start with a wrong trend estimate on purpose
    EkfForecaster fc(model, EkfState{Vector({0.0, 0.0}), Matrix::identity(2)});
    const double slope = 0.3;
    for (int step = 1; step <= 500; ++step) {
        fc.observe(10.0 + slope * step);
    }
    CHECK(std::abs(fc.state().x_hat[1] - slope) < 1e-3);
}

TEST_CASE("covariance stays symmetric with non-negative diagonal") {
    SeededRng rng(77);
    const StateSpaceModel model =
        local_linear_trend(rng.uniform(1e-6, 1e-3), rng.uniform(1e-6, 1e-3),
                           rng.uniform(1e-3, 1.0));
    EkfState state{Vector({0.0, 0.0}), Matrix::identity(2)};
    for (int step = 0; step < 10000; ++step) {
        state = update(model, predict(model, state),
                       Vector({rng.normal(0.0, 3.0)}));
        CHECK(state.p(0, 1) == state.p(1, 0));
        CHECK(state.p(0, 0) >= 0.0);
        CHECK(state.p(1, 1) >= 0.0);
    }
}

TEST_CASE("posterior covariance agrees with the Joseph form for optimal gains") {
    SeededRng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const double p_prior = rng.uniform(0.1, 5.0);
        const double r = rng.uniform(0.1, 5.0);
        const StateSpaceModel model = scalar_identity_model(0.0, r);
        const EkfState predicted{Vector({rng.uniform(-1.0, 1.0)}),
                                 Matrix(1, 1, {p_prior})};
        const EkfState posterior =
            update(model, predicted, Vector({rng.uniform(-2.0, 2.0)}));
        const double k = p_prior / (p_prior + r);
        const double joseph = (1 - k) * p_prior * (1 - k) + k * r * k;
        CHECK(std::abs(posterior.p(0, 0) - joseph) < 1e-8);
    }
}
