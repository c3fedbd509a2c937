#include "seqcast/arma.hpp"
#include "seqcast/errors.hpp"
#include "seqcast/rng.hpp"
#include "seqcast/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace seqcast;

TEST_CASE("difference basics") {
    CHECK(difference(std::vector<double>{1, 2, 4, 7}, 1) ==
          std::vector<double>{1, 2, 3});
    const std::vector<double> s{3.5, -1.0, 2.25};
    CHECK(difference(s, 0) == s);
    CHECK_THROWS_AS(difference(std::vector<double>{1, 2}, 2),
                    InsufficientDataError);
    CHECK_THROWS_AS(difference(s, -1), DimensionError);
}

TEST_CASE("difference/undifference round trip is exact for d in 0..3") {
    SeededRng rng(8);
    std::vector<double> s(40);
    for (double& v : s) v = rng.uniform(-10.0, 10.0);
    for (int d = 0; d <= 3; ++d) {
        const std::vector<double> diffs = difference(s, d);
        const std::vector<double> seeds(s.end() - d, s.end());
        const std::vector<double> back = undifference(diffs, seeds);
        REQUIRE(back.size() == s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            CHECK(std::abs(back[i] - s[i]) <= 1e-12 * std::max(1.0, std::abs(s[i])));
        }
    }
}

TEST_CASE("fit_ar_ols recovers a deterministic decay exactly") {
    std::vector<double> s(20);
    s[0] = 1.0;
    for (std::size_t i = 1; i < s.size(); ++i) s[i] = 0.5 * s[i - 1];
    const ArFit fit = fit_ar_ols(s, 1);
    CHECK(std::abs(fit.c) < 1e-10);
    CHECK(std::abs(fit.alpha[0] - 0.5) < 1e-10);
}

TEST_CASE("fit_ar_ols rejects invalid input") {
    const std::vector<double> s{1, 2, 3, 4, 5, 6};
    CHECK_THROWS_AS(fit_ar_ols(s, 0), DimensionError);
    CHECK_THROWS_AS(fit_ar_ols(std::vector<double>{1, 2, 3}, 1),
                    InsufficientDataError);
    const std::vector<double> constant(30, 4.2);
    CHECK_THROWS_AS(fit_ar_ols(constant, 2), DegenerateRegressionError);
}

TEST_CASE("fit_ar_ols recovers synthetic AR(2) coefficients") {
    ArSynthSpec spec;
    spec.points = 5000;
    spec.alpha = {0.5, -0.25};
    spec.sigma = 0.1;
    const TimeSeries series = synth_ar(spec, 1234);
    const ArFit fit = fit_ar_ols(series.values, 2);
    CHECK(std::abs(fit.alpha[0] - 0.5) < 0.05);
    CHECK(std::abs(fit.alpha[1] + 0.25) < 0.05);
}

TEST_CASE("fit_ar_ols residuals are orthogonal to the regressors") {
    ArSynthSpec spec;
    spec.points = 2000;
    spec.alpha = {0.4, 0.2};
    spec.sigma = 0.5;
    const TimeSeries series = synth_ar(spec, 99);
    const std::vector<double>& s = series.values;
    const int p = 2;
    const ArFit fit = fit_ar_ols(s, p);
    const std::size_t n = s.size();
    std::vector<double> xte(p + 1, 0.0);
    for (std::size_t t = p; t < n; ++t) {
        double resid = s[t] - fit.c;
        for (int lag = 1; lag <= p; ++lag) resid -= fit.alpha[lag - 1] * s[t - lag];
        xte[0] += resid;
        for (int lag = 1; lag <= p; ++lag) xte[lag] += s[t - lag] * resid;
    }
    for (const double v : xte) {
        CHECK(std::abs(v) / static_cast<double>(n - p) < 1e-8);
    }
}

TEST_CASE("forecast_ar basics") {
    ArFit fit;
    fit.c = 0.0;
    fit.alpha = {0.5};
    CHECK(forecast_ar(fit, std::vector<double>{0.25}) ==
          doctest::Approx(0.125).epsilon(1e-14));
    fit.c = 3.0;
    fit.alpha = {0.0, 0.0};
    CHECK(forecast_ar(fit, std::vector<double>{7.0, 9.0}) == 3.0);
    CHECK_THROWS_AS(forecast_ar(fit, std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("forecast_ar pairs alpha_i with lag i (newest value last)") {
    // x(t) = 0.7 x(t-1) - 0.2 x(t-2), exactly
    std::vector<double> s{1.0, 2.0};
    for (int i = 2; i < 30; ++i) s.push_back(0.7 * s[i - 1] - 0.2 * s[i - 2]);
    const ArFit fit = fit_ar_ols(s, 2);
    CHECK(std::abs(fit.alpha[0] - 0.7) < 1e-9);
    CHECK(std::abs(fit.alpha[1] + 0.2) < 1e-9);
    const double next = 0.7 * s.back() - 0.2 * s[s.size() - 2];
    const std::vector<double> recent(s.end() - 2, s.end());
    CHECK(forecast_ar(fit, recent) == doctest::Approx(next).epsilon(1e-10));
}

TEST_CASE("forecast_ar continues the deterministic decay exactly") {
    std::vector<double> s(20);
    s[0] = 1.0;
    for (std::size_t i = 1; i < s.size(); ++i) s[i] = 0.5 * s[i - 1];
    const ArFit fit = fit_ar_ols(s, 1);
    const std::vector<double> recent{s.back()};
    CHECK(forecast_ar(fit, recent) ==
          doctest::Approx(0.5 * s.back()).epsilon(1e-10));
}

TEST_CASE("ArimaSpec validation") {
    CHECK_THROWS_AS((ArimaSpec{-1, 0, 0}).validate(), DimensionError);
    CHECK_THROWS_AS((ArimaSpec{0, 0, 0}).validate(), DimensionError);
    CHECK_NOTHROW((ArimaSpec{0, 1, 0}).validate());
    CHECK_NOTHROW((ArimaSpec{1, 0, 0}).validate());
}

TEST_CASE("fit_arima with (1,0,0) coincides with fit_ar_ols") {
    ArSynthSpec spec;
    spec.points = 400;
    spec.alpha = {0.6};
    spec.sigma = 0.3;
    const TimeSeries series = synth_ar(spec, 7);
    const ArFit ar = fit_ar_ols(series.values, 1);
    const ArimaFit arima = fit_arima(series.values, ArimaSpec{1, 0, 0});
    CHECK(std::abs(arima.mu - ar.c) < 1e-6);
    CHECK(std::abs(arima.alpha[0] - ar.alpha[0]) < 1e-6);
}

TEST_CASE("fit_arima recovers synthetic ARMA(1,1) coefficients") {
    ArmaSynthSpec spec;
    spec.points = 10000;
    spec.alpha = {0.6};
    spec.beta = {0.3};
    spec.sigma = 1.0;
    const TimeSeries series = synth_arma(spec, 2025);
    const ArimaFit fit = fit_arima(series.values, ArimaSpec{1, 0, 1});
    CHECK(std::abs(fit.alpha[0] - 0.6) < 0.1);
    CHECK(std::abs(fit.beta[0] - 0.3) < 0.15);
}

TEST_CASE("(0,1,0) on a linear ramp continues the ramp exactly") {
    std::vector<double> ramp;
    for (int i = 0; i < 60; ++i) ramp.push_back(5.0 + 1.5 * i);
    const ArimaFit fit = fit_arima(ramp, ArimaSpec{0, 1, 0});
    CHECK(forecast_arima(fit, ramp) ==
          doctest::Approx(ramp.back() + 1.5).epsilon(1e-12));
}

TEST_CASE("forecast_arima with q=0, d=0 equals forecast_ar") {
    ArSynthSpec spec;
    spec.points = 300;
    spec.alpha = {0.5, -0.2};
    spec.sigma = 0.4;
    const TimeSeries series = synth_ar(spec, 55);
    const ArimaFit arima = fit_arima(series.values, ArimaSpec{2, 0, 0});
    ArFit ar;
    ar.c = arima.mu;
    ar.alpha = arima.alpha;
    const std::vector<double> recent(series.values.end() - 2,
                                     series.values.end());
    CHECK(std::abs(forecast_arima(arima, series.values) -
                   forecast_ar(ar, recent)) < 1e-10);
}

TEST_CASE("arima one-step forecasts beat the naive forecast on held-out ARMA data") {
    ArmaSynthSpec spec;
    spec.points = 4000;
    spec.alpha = {0.6};
    spec.beta = {0.3};
    spec.sigma = 1.0;
    const TimeSeries series = synth_arma(spec, 313);
    const std::vector<double>& s = series.values;
    const std::size_t split = 2000;
    const ArimaFit fit = fit_arima(
        std::span<const double>(s).first(split), ArimaSpec{1, 0, 1});
    double mse_arima = 0.0, mse_naive = 0.0;
    for (std::size_t t = split; t < s.size(); ++t) {
        const auto history = std::span<const double>(s).first(t);
        const double pred = forecast_arima(fit, history);
        mse_arima += (pred - s[t]) * (pred - s[t]);
        mse_naive += (s[t - 1] - s[t]) * (s[t - 1] - s[t]);
    }
    CHECK(mse_arima < mse_naive);
}

TEST_CASE("refitting the same data is deterministic and idempotent") {
    ArmaSynthSpec spec;
    spec.points = 500;
    spec.alpha = {0.4};
    spec.beta = {0.2};
    const TimeSeries series = synth_arma(spec, 17);
    const ArimaFit a = fit_arima(series.values, ArimaSpec{1, 0, 1});
    const ArimaFit b = fit_arima(series.values, ArimaSpec{1, 0, 1});
    CHECK(a.mu == b.mu);
    CHECK(a.alpha == b.alpha);
    CHECK(a.beta == b.beta);
    CHECK(a.residuals == b.residuals);
}

TEST_CASE("over-differenced data surfaces as a degenerate regression") {
    // differencing a smooth signal plus iid noise plants a unit MA root; the
    // stage-2 estimate lands non-invertible and the innovation recursion
    // explodes, which must be reported rather than silently forecast from
    SineSpec spec;
    spec.points = 230;
    spec.noise_sd = 0.05;
    const TimeSeries series = synth_sine(spec, 7);
    const std::span<const double> train(series.values.data(), 200);
    CHECK_THROWS_AS(fit_arima(train, ArimaSpec{2, 1, 1}),
                    DegenerateRegressionError);
}

TEST_CASE("fit_arima rejects series that are too short") {
    const std::vector<double> s{1, 2, 3, 4, 5, 6, 7, 8};
    CHECK_THROWS_AS(fit_arima(s, ArimaSpec{1, 0, 1}), InsufficientDataError);
}
