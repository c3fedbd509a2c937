#include "seqcast/synth.hpp"

#include "seqcast/errors.hpp"
#include "seqcast/rng.hpp"

#include <cmath>
#include <string>

namespace seqcast {

namespace {

TimeSeries with_index_timestamps(std::string id, std::vector<double> values) {
    TimeSeries series;
    series.id = std::move(id);
    series.values = std::move(values);
    series.timestamps.reserve(series.values.size());
    for (std::size_t i = 1; i <= series.values.size(); ++i) {
        series.timestamps.push_back(std::to_string(i));
    }
    series.validate();
    return series;
}

} // namespace

TimeSeries synth_sine(const SineSpec& spec, std::uint64_t seed) {
    if (spec.points < 2 || !(spec.period > 0.0)) {
        throw ConfigError("synth_sine: need points >= 2 and period > 0");
    }
    SeededRng rng(seed);
    std::vector<double> values(spec.points);
    for (std::size_t i = 0; i < spec.points; ++i) {
        const double t = static_cast<double>(i + 1);
        values[i] = spec.offset +
                    spec.amplitude * std::sin(2.0 * M_PI * t / spec.period);
        if (spec.noise_sd > 0.0) values[i] += rng.normal(0.0, spec.noise_sd);
    }
    return with_index_timestamps("sine", std::move(values));
}

TimeSeries synth_arma(const ArmaSynthSpec& spec, std::uint64_t seed) {
    if (spec.points < 2) {
        throw ConfigError("synth_arma: need points >= 2");
    }
    SeededRng rng(seed);
    const std::size_t p = spec.alpha.size();
    const std::size_t q = spec.beta.size();
    const std::size_t total = spec.points + spec.burn_in;
    std::vector<double> x(total, 0.0);
    std::vector<double> a(total, 0.0);
    for (std::size_t t = 0; t < total; ++t) {
        a[t] = rng.normal(0.0, spec.sigma);
        double value = spec.c + a[t];
        for (std::size_t lag = 1; lag <= p && lag <= t; ++lag) {
            value += spec.alpha[lag - 1] * x[t - lag];
        }
        for (std::size_t lag = 1; lag <= q && lag <= t; ++lag) {
            value += spec.beta[lag - 1] * a[t - lag];
        }
        x[t] = value;
        if (!std::isfinite(x[t])) {
            throw DivergenceError("synth_arma: non-stationary coefficients");
        }
    }
    x.erase(x.begin(), x.begin() + static_cast<long>(spec.burn_in));
    return with_index_timestamps("arma", std::move(x));
}

TimeSeries synth_ar(const ArSynthSpec& spec, std::uint64_t seed) {
    ArmaSynthSpec arma;
    arma.points = spec.points;
    arma.alpha = spec.alpha;
    arma.c = spec.c;
    arma.sigma = spec.sigma;
    arma.burn_in = spec.burn_in;
    TimeSeries series = synth_arma(arma, seed);
    series.id = "ar";
    return series;
}

TimeSeries synth_random_walk(const RandomWalkSpec& spec, std::uint64_t seed) {
    if (spec.points < 2) {
        throw ConfigError("synth_random_walk: need points >= 2");
    }
    SeededRng rng(seed);
    std::vector<double> values(spec.points);
    double level = spec.start;
    for (std::size_t i = 0; i < spec.points; ++i) {
        values[i] = level;
        level += spec.drift + rng.normal(0.0, spec.sigma);
    }
    return with_index_timestamps("random_walk", std::move(values));
}

} // namespace seqcast
