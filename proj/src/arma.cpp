#include "seqcast/arma.hpp"

#include "seqcast/errors.hpp"
#include "seqcast/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace seqcast {

std::vector<double> difference(std::span<const double> series, int d) {
    if (d < 0) {
        throw DimensionError("difference: order must be >= 0");
    }
    if (series.size() <= static_cast<std::size_t>(d)) {
        throw InsufficientDataError("difference: series too short for order");
    }
    std::vector<double> out(series.begin(), series.end());
    for (int level = 0; level < d; ++level) {
        for (std::size_t i = 0; i + 1 < out.size(); ++i) {
            out[i] = out[i + 1] - out[i];
        }
        out.pop_back();
    }
    return out;
}

namespace {

// Last value of the k-fold difference, from the last k+1 originals.
double kth_difference_tail(std::span<const double> seeds, int k) {
    std::vector<double> tail(seeds.end() - (k + 1), seeds.end());
    for (int level = 0; level < k; ++level) {
        for (std::size_t i = 0; i + 1 < tail.size(); ++i) {
            tail[i] = tail[i + 1] - tail[i];
        }
        tail.pop_back();
    }
    return tail.front();
}

} // namespace

std::vector<double> undifference(std::span<const double> diffs,
                                 std::span<const double> seeds) {
    const int d = static_cast<int>(seeds.size());
    std::vector<double> level(diffs.begin(), diffs.end());
    // walk back down the differencing levels, anchoring each on the tail
    // value implied by the seeds; compensated summation keeps the long
    // backward chain exact to a few ulps
    for (int k = d; k >= 1; --k) {
        const double tail = kth_difference_tail(seeds, k - 1);
        std::vector<double> lower(level.size() + 1);
        lower.back() = tail;
        double sum = tail;
        double carry = 0.0;
        for (std::size_t i = level.size(); i-- > 0;) {
            const double y = -level[i] - carry;
            const double t = sum + y;
            carry = (t - sum) - y;
            sum = t;
            lower[i] = sum;
        }
        level = std::move(lower);
    }
    return level;
}

namespace {

// Accumulates the normal equations for rows produced by `fill_row` and
// solves them; theta has `k` entries. Degenerate designs surface as
// SingularSystemError from the Cholesky solve.
std::vector<double> ols_normal_equations(
    std::size_t row_count, std::size_t k,
    const std::function<void(std::size_t, std::vector<double>&)>& fill_row,
    const std::function<double(std::size_t)>& target) {
    Matrix xtx = Matrix::zeros(k, k);
    std::vector<double> xty(k, 0.0);
    std::vector<double> row(k, 0.0);
    for (std::size_t r = 0; r < row_count; ++r) {
        fill_row(r, row);
        const double y = target(r);
        for (std::size_t a = 0; a < k; ++a) {
            xty[a] += row[a] * y;
            for (std::size_t b = a; b < k; ++b) {
                xtx(a, b) += row[a] * row[b];
            }
        }
    }
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < a; ++b) xtx(a, b) = xtx(b, a);
    const Vector theta = solve_spd(xtx, Vector(std::move(xty)));
    return std::vector<double>(theta.begin(), theta.end());
}

} // namespace

ArFit fit_ar_ols(std::span<const double> series, int p) {
    if (p < 1) {
        throw DimensionError("fit_ar_ols: order must be >= 1");
    }
    const std::size_t n = series.size();
    if (n < static_cast<std::size_t>(2 * p + 2)) {
        throw InsufficientDataError(
            "fit_ar_ols: need at least 2p+2 observations");
    }
    const std::size_t k = static_cast<std::size_t>(p) + 1;
    const std::size_t rows = n - static_cast<std::size_t>(p);
    std::vector<double> theta;
    try {
        theta = ols_normal_equations(
            rows, k,
            [&](std::size_t r, std::vector<double>& row) {
                const std::size_t t = r + static_cast<std::size_t>(p);
                row[0] = 1.0;
                for (int lag = 1; lag <= p; ++lag) {
                    row[static_cast<std::size_t>(lag)] =
                        series[t - static_cast<std::size_t>(lag)];
                }
            },
            [&](std::size_t r) { return series[r + static_cast<std::size_t>(p)]; });
    } catch (const SingularSystemError&) {
        throw DegenerateRegressionError(
            "fit_ar_ols: rank-deficient design (constant or degenerate series)");
    }
    ArFit fit;
    fit.c = theta[0];
    fit.alpha.assign(theta.begin() + 1, theta.end());
    return fit;
}

double forecast_ar(const ArFit& fit, std::span<const double> recent) {
    const std::size_t p = fit.alpha.size();
    if (recent.size() != p) {
        throw DimensionError("forecast_ar: need exactly p recent values");
    }
    double value = fit.c;
    for (std::size_t lag = 1; lag <= p; ++lag) {
        value += fit.alpha[lag - 1] * recent[p - lag];
    }
    return value;
}

void ArimaSpec::validate() const {
    if (p < 0 || d < 0 || q < 0) {
        throw DimensionError("ArimaSpec: orders must be >= 0");
    }
    if (d == 0 && p + q < 1) {
        throw DimensionError("ArimaSpec: p+q must be >= 1 when d == 0");
    }
}

namespace {

// Innovation estimates implied by a coefficient set, zero where lags are
// missing; used both at fit time and when forecasting from fresh data.
// A non-invertible MA estimate (roots on or inside the unit circle, e.g.
// from over-differencing) makes this recursion explode; that surfaces as a
// degenerate-regression error rather than astronomically wrong forecasts.
std::vector<double> recompute_residuals(std::span<const double> w, double mu,
                                        const std::vector<double>& alpha,
                                        const std::vector<double>& beta) {
    const std::size_t p = alpha.size();
    const std::size_t q = beta.size();
    double scale = 1.0;
    for (const double v : w) scale = std::max(scale, std::abs(v));
    const double bound = 1e8 * scale;
    std::vector<double> a(w.size(), 0.0);
    for (std::size_t t = p; t < w.size(); ++t) {
        double fitted = mu;
        for (std::size_t lag = 1; lag <= p; ++lag) {
            fitted += alpha[lag - 1] * w[t - lag];
        }
        for (std::size_t lag = 1; lag <= q; ++lag) {
            fitted += (t >= lag) ? beta[lag - 1] * a[t - lag] : 0.0;
        }
        a[t] = w[t] - fitted;
        if (!std::isfinite(a[t]) || std::abs(a[t]) > bound) {
            throw DegenerateRegressionError(
                "fit_arima: explosive innovation recursion "
                "(non-invertible MA estimate)");
        }
    }
    return a;
}

} // namespace

ArimaFit fit_arima(std::span<const double> series, const ArimaSpec& spec) {
    spec.validate();
    const std::vector<double> w = difference(series, spec.d);
    const std::size_t n = w.size();
    const std::size_t p = static_cast<std::size_t>(spec.p);
    const std::size_t q = static_cast<std::size_t>(spec.q);
    if (n < 2 * (p + q) + 20) {
        throw InsufficientDataError(
            "fit_arima: need at least 2(p+q)+20 differenced observations");
    }

    ArimaFit fit;
    fit.spec = spec;

    if (q == 0 && p > 0) {
        // the long-AR stage degenerates away; this is plain AR-by-OLS
        const ArFit ar = fit_ar_ols(w, spec.p);
        fit.mu = ar.c;
        fit.alpha = ar.alpha;
    } else if (q == 0 && p == 0) {
        // drift-only model on the differenced scale
        double mean = 0.0;
        for (const double x : w) mean += x;
        fit.mu = mean / static_cast<double>(n);
    } else {
        // stage 1: long autoregression supplies innovation proxies
        const int long_order =
            std::max(1, std::min(20, static_cast<int>(n / 4)));
        const ArFit long_ar = fit_ar_ols(w, long_order);
        const std::size_t m = static_cast<std::size_t>(long_order);
        std::vector<double> proxy(n, 0.0);
        for (std::size_t t = m; t < n; ++t) {
            double fitted = long_ar.c;
            for (std::size_t lag = 1; lag <= m; ++lag) {
                fitted += long_ar.alpha[lag - 1] * w[t - lag];
            }
            proxy[t] = w[t] - fitted;
        }

        // stage 2: regress w on its own lags and the proxy innovations
        const std::size_t t0 = std::max(p, m + q);
        if (n <= t0 + p + q + 2) {
            throw InsufficientDataError(
                "fit_arima: too few rows for the innovation regression");
        }
        const std::size_t k = 1 + p + q;
        std::vector<double> theta;
        try {
            theta = ols_normal_equations(
                n - t0, k,
                [&](std::size_t r, std::vector<double>& row) {
                    const std::size_t t = r + t0;
                    row[0] = 1.0;
                    for (std::size_t lag = 1; lag <= p; ++lag) {
                        row[lag] = w[t - lag];
                    }
                    for (std::size_t lag = 1; lag <= q; ++lag) {
                        row[p + lag] = proxy[t - lag];
                    }
                },
                [&](std::size_t r) { return w[r + t0]; });
        } catch (const SingularSystemError&) {
            throw DegenerateRegressionError(
                "fit_arima: rank-deficient innovation regression");
        }
        fit.mu = theta[0];
        fit.alpha.assign(theta.begin() + 1, theta.begin() + 1 + p);
        fit.beta.assign(theta.begin() + 1 + p, theta.end());
    }

    fit.residuals = recompute_residuals(w, fit.mu, fit.alpha, fit.beta);
    return fit;
}

double forecast_arima(const ArimaFit& fit, std::span<const double> series) {
    const std::size_t p = fit.alpha.size();
    const std::size_t q = fit.beta.size();
    const std::vector<double> w = difference(series, fit.spec.d);
    if (w.size() < std::max(p, q)) {
        throw InsufficientDataError(
            "forecast_arima: series too short to supply the required lags");
    }
    const std::vector<double> a =
        recompute_residuals(w, fit.mu, fit.alpha, fit.beta);

    double next = fit.mu;
    for (std::size_t lag = 1; lag <= p; ++lag) {
        next += fit.alpha[lag - 1] * w[w.size() - lag];
    }
    for (std::size_t lag = 1; lag <= q; ++lag) {
        next += fit.beta[lag - 1] * a[a.size() - lag];
    }

    // integrate back: next value at each lower differencing level is its
    // current tail plus the level-above forecast
    const int d = fit.spec.d;
    double value = next;
    for (int k = d; k >= 1; --k) {
        value += kth_difference_tail(series.subspan(series.size() - d),
                                     k - 1);
    }
    return value;
}

} // namespace seqcast
