#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace seqcast {

/// d-fold first differences; length shrinks by d.
std::vector<double> difference(std::span<const double> series, int d);

/// Exact left inverse of difference given the last d original values
/// (seeds[0] is the oldest seed). Returns the reconstructed original tail.
std::vector<double> undifference(std::span<const double> diffs,
                                 std::span<const double> seeds);

/// AR(p) fit: x(t) = c + Σ alpha_i · x(t−i) + ε(t). alpha[0] is α₁, the
/// coefficient on the most recent lag.
struct ArFit {
    double c = 0.0;
    std::vector<double> alpha;

    int p() const { return static_cast<int>(alpha.size()); }
};

/// Ordinary least squares over all rows with p lags available, solved via
/// the normal equations. Throws DegenerateRegressionError on rank-deficient
/// designs (e.g. constant series).
ArFit fit_ar_ols(std::span<const double> series, int p);

/// One-step forecast, c + Σ alpha_i · recent(t−i). `recent` holds the last
/// p values in chronological order (recent.back() is the newest).
double forecast_ar(const ArFit& fit, std::span<const double> recent);

struct ArimaSpec {
    int p = 1;
    int d = 0;
    int q = 0;

    void validate() const; // all >= 0; p+q >= 1 when d == 0
};

/**
 * ARIMA(p,D,q) fit on the D-differenced series, plus-sign MA convention:
 * w(t) = mu + Σ alpha_i·w(t−i) + a(t) + Σ beta_j·a(t−j).
 */
struct ArimaFit {
    ArimaSpec spec;
    double mu = 0.0;                // stage-2 regression intercept (drift)
    std::vector<double> alpha;      // AR coefficients, most recent lag first
    std::vector<double> beta;       // MA coefficients, most recent lag first
    std::vector<double> residuals;  // innovation estimates on the differenced
                                    // scale, aligned with the differenced series
};

/**
 * Hannan–Rissanen estimation: a long OLS autoregression supplies innovation
 * proxies, a second OLS on lagged values and lagged innovations yields
 * (mu, alpha, beta), and residuals are recomputed from that fit. With q = 0
 * the first stage drops out and the fit coincides with fit_ar_ols.
 */
ArimaFit fit_arima(std::span<const double> series, const ArimaSpec& spec);

/// One-step forecast on the differenced scale (future innovation = 0),
/// integrated back through the last d original values.
double forecast_arima(const ArimaFit& fit, std::span<const double> series);

} // namespace seqcast
