#include "seqcast/harness.hpp"

#include "seqcast/errors.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <future>
#include <iostream>
#include <limits>
#include <utility>

namespace seqcast {

void TimeSeries::validate() const {
    if (values.size() < 2) {
        throw InsufficientDataError("TimeSeries: need at least 2 observations");
    }
    if (timestamps.size() != values.size()) {
        throw DimensionError("TimeSeries: timestamp/value count mismatch");
    }
    for (const double v : values) {
        if (!std::isfinite(v)) {
            throw DimensionError("TimeSeries: non-finite value");
        }
    }
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        if (!timestamp_less(timestamps[i - 1], timestamps[i])) {
            throw DimensionError(
                "TimeSeries: timestamps must be strictly increasing");
        }
    }
}

bool timestamp_less(const std::string& a, const std::string& b) {
    const auto as_number = [](const std::string& s, double& out) {
        const char* first = s.data();
        const char* last = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(first, last, out);
        return ec == std::errc() && ptr == last;
    };
    double na = 0.0, nb = 0.0;
    if (as_number(a, na) && as_number(b, nb)) return na < nb;
    return a < b;
}

double metric_e(const std::vector<ForecastRecord>& records) {
    if (records.empty()) {
        throw InsufficientDataError("metric_e: no records");
    }
    double sum = 0.0;
    for (const ForecastRecord& r : records) {
        if (r.observed == 0.0) {
            throw DegenerateLabelError("metric_e: zero observation");
        }
        sum += std::abs(r.predicted - r.observed) / std::abs(r.observed);
    }
    return sum / static_cast<double>(records.size());
}

MinMaxScaler MinMaxScaler::fit(std::span<const double> window) {
    if (window.empty()) {
        throw InsufficientDataError("MinMaxScaler: empty window");
    }
    const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
    if (!(*hi > *lo)) {
        throw DegenerateScaleError("MinMaxScaler: window has zero range");
    }
    return MinMaxScaler{*lo, *hi};
}

RunReport rolling_forecast(Forecaster& forecaster, const TimeSeries& series,
                           const RollingOptions& options) {
    series.validate();
    const std::size_t train_len = options.train_len;
    const std::size_t horizon = options.horizon;
    if (train_len < 2 || horizon < 1 || horizon >= train_len) {
        throw ConfigError("rolling_forecast: need T > N >= 1 and T >= 2");
    }
    if (series.values.size() < train_len + horizon) {
        throw InsufficientDataError(
            "rolling_forecast: series shorter than T + N");
    }

    const auto started = std::chrono::steady_clock::now();
    RunReport report;
    report.series_id = series.id;
    report.method = forecaster.name();

    MinMaxScaler scaler = MinMaxScaler::identity();
    if (options.scaling == ScalingMode::MinMax) {
        try {
            scaler = MinMaxScaler::fit(
                std::span<const double>(series.values).first(train_len));
        } catch (const DegenerateScaleError&) {
            report.warnings.push_back(
                "constant training window; scaling disabled for this run");
        }
    }

    const std::size_t window_len = train_len - 1;
    std::vector<double> seq;
    seq.reserve(train_len + horizon);
    for (std::size_t i = 0; i < train_len; ++i) {
        seq.push_back(scaler.scale(series.values[i]));
    }

    int consecutive_failures = 0;
    for (std::size_t t = 1; t <= horizon + 1; ++t) {
        const long target_index = static_cast<long>(train_len + t);
        const double label = scaler.scale(series.values[train_len + t - 2]);
        if (t <= horizon || forecaster.retrain_after_horizon()) {
            try {
                forecaster.retrain(
                    std::span<const double>(seq).subspan(t - 1, window_len),
                    label);
            } catch (const std::exception& ex) {
                report.failures.push_back(StepFailure{
                    target_index, std::string("retrain: ") + ex.what()});
            }
        }
        if (t > horizon) break;

        const double observed = series.values[train_len + t - 1];
        double predicted_scaled = std::numeric_limits<double>::quiet_NaN();
        std::string failure;
        try {
            predicted_scaled = forecaster.predict(
                std::span<const double>(seq).subspan(t, window_len));
            if (!std::isfinite(predicted_scaled) ||
                !std::isfinite(scaler.inverse(predicted_scaled))) {
                failure = "predict: non-finite forecast";
            }
        } catch (const std::exception& ex) {
            failure = std::string("predict: ") + ex.what();
        }

        if (!failure.empty()) {
            report.failures.push_back(StepFailure{target_index, failure});
            // keep the window finite by substituting the arrived truth
            seq.push_back(scaler.scale(observed));
            if (++consecutive_failures >= 3) {
                report.aborted = true;
                break;
            }
            continue;
        }
        consecutive_failures = 0;

        const double predicted = scaler.inverse(predicted_scaled);
        seq.push_back(options.feedback == FeedbackMode::Prediction
                          ? predicted_scaled
                          : scaler.scale(observed));
        if (observed == 0.0) {
            ++report.excluded_zero_observations;
        } else {
            report.records.push_back(
                ForecastRecord{target_index, predicted, observed,
                               std::abs(predicted - observed) / std::abs(observed)});
        }
    }

    if (!report.records.empty()) {
        report.metric_e = metric_e(report.records);
    }
    if (options.include_timing) {
        report.wall_time_ms =
            std::chrono::duration<double, std::milli>(
                std::chrono::steady_clock::now() - started)
                .count();
    }
    return report;
}

std::vector<RunReport> compare_methods(const TimeSeries& series,
                                       const std::vector<MethodConfig>& methods,
                                       const CompareOptions& options) {
    if (methods.empty()) {
        throw ConfigError("compare_methods: need at least one method");
    }
    const SeededRng root(options.seed);

    std::vector<std::future<RunReport>> futures;
    futures.reserve(methods.size());
    for (const MethodConfig& method : methods) {
        const std::uint64_t method_seed = root.derive(method.label).seed();
        futures.push_back(std::async(std::launch::async, [&series, &options,
                                                          method, method_seed] {
            RunReport report;
            report.series_id = series.id;
            report.method = method.label;
            report.config_echo = method.config_echo;
            try {
                auto forecaster = method.factory(method_seed);
                RollingOptions rolling{options.train_len, options.horizon,
                                       method.scaling, options.feedback,
                                       options.include_timing};
                RunReport inner = rolling_forecast(*forecaster, series, rolling);
                inner.method = method.label;
                inner.config_echo = method.config_echo;
                return inner;
            } catch (const std::exception& ex) {
                report.error = ex.what();
                return report;
            }
        }));
    }

    std::vector<RunReport> reports;
    reports.reserve(methods.size());
    for (auto& f : futures) reports.push_back(f.get());

    std::stable_sort(reports.begin(), reports.end(),
                     [](const RunReport& a, const RunReport& b) {
                         if (a.metric_e.has_value() != b.metric_e.has_value()) {
                             return a.metric_e.has_value();
                         }
                         if (a.metric_e && b.metric_e &&
                             *a.metric_e != *b.metric_e) {
                             return *a.metric_e < *b.metric_e;
                         }
                         return false;
                     });
    return reports;
}

// --- forecaster implementations ---

namespace {

class NaiveForecaster final : public Forecaster {
public:
    std::string name() const override { return "naive"; }

    void retrain(std::span<const double>, double label) override {
        last_observation_ = label;
        has_observation_ = true;
    }

    double predict(std::span<const double> window) override {
        return has_observation_ ? last_observation_ : window.back();
    }

private:
    double last_observation_ = 0.0;
    bool has_observation_ = false;
};

class ArForecaster final : public Forecaster {
public:
    ArForecaster(int p, bool refit_each_step)
        : p_(p), refit_each_step_(refit_each_step) {}

    std::string name() const override { return "ar"; }

    void retrain(std::span<const double> window, double label) override {
        if (fit_ && !refit_each_step_) return;
        std::vector<double> data(window.begin(), window.end());
        data.push_back(label);
        last_value_ = label;
        try {
            fit_ = fit_ar_ols(data, p_);
            degenerate_ = false;
        } catch (const DegenerateRegressionError& ex) {
            degenerate_ = true;
            std::cerr << "[seqcast] ar: " << ex.what()
                      << "; falling back to last-value forecast\n";
        }
    }

    double predict(std::span<const double> window) override {
        if (!fit_ || degenerate_) return last_value_;
        const std::size_t p = static_cast<std::size_t>(p_);
        if (window.size() < p) {
            throw InsufficientDataError("ar: window shorter than order p");
        }
        return forecast_ar(*fit_, window.subspan(window.size() - p));
    }

private:
    int p_;
    bool refit_each_step_;
    std::optional<ArFit> fit_;
    bool degenerate_ = false;
    double last_value_ = 0.0;
};

class ArimaForecaster final : public Forecaster {
public:
    ArimaForecaster(const ArimaSpec& spec, bool refit_each_step)
        : spec_(spec), refit_each_step_(refit_each_step) {
        spec_.validate();
    }

    std::string name() const override { return "arima"; }

    void retrain(std::span<const double> window, double label) override {
        if (fit_ && !refit_each_step_) return;
        std::vector<double> data(window.begin(), window.end());
        data.push_back(label);
        last_value_ = label;
        try {
            fit_ = fit_arima(data, spec_);
            degenerate_ = false;
        } catch (const DegenerateRegressionError& ex) {
            degenerate_ = true;
            std::cerr << "[seqcast] arima: " << ex.what()
                      << "; falling back to last-value forecast\n";
        }
    }

    double predict(std::span<const double> window) override {
        if (!fit_ || degenerate_) return last_value_;
        try {
            return forecast_arima(*fit_, window);
        } catch (const DegenerateRegressionError& ex) {
            std::cerr << "[seqcast] arima: " << ex.what()
                      << "; falling back to last-value forecast\n";
            return last_value_;
        }
    }

private:
    ArimaSpec spec_;
    bool refit_each_step_;
    std::optional<ArimaFit> fit_;
    bool degenerate_ = false;
    double last_value_ = 0.0;
};

class EkfAdapter final : public Forecaster {
public:
    explicit EkfAdapter(const EkfOptions& options) : options_(options) {}

    std::string name() const override { return "ekf"; }

    void retrain(std::span<const double> window, double label) override {
        if (!filter_) {
            initialize(window, label);
        } else {
            filter_->observe(label);
        }
    }

    double predict(std::span<const double>) override {
        if (!filter_) {
            throw InsufficientDataError("ekf: predict before first retrain");
        }
        return filter_->predict_next();
    }

private:
    void initialize(std::span<const double> window, double label) {
        std::vector<double> train(window.begin(), window.end());
        train.push_back(label);
        const std::size_t n = train.size();
        double mean = 0.0;
        for (const double x : train) mean += x;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const double x : train) var += (x - mean) * (x - mean);
        var /= static_cast<double>(n);

        const double q_level = options_.q_level.value_or(
            std::max(1e-4 * var, 1e-10));
        const double q_trend = options_.q_trend.value_or(
            std::max(1e-4 * var, 1e-10));
        const double r = options_.r.value_or(std::max(1e-2 * var, 1e-8));

        // level: last training observation; trend: mean first difference
        const double level = options_.init_level.value_or(label);
        const double trend = options_.init_trend.value_or(
            (train.back() - train.front()) / static_cast<double>(n - 1));
        const double p0 = options_.p0.value_or(std::max(var, 1e-6));
        EkfState init{Vector({level, trend}),
                      Matrix(2, 2, {p0, 0.0, 0.0, p0})};
        filter_.emplace(local_linear_trend(q_level, q_trend, r), init);
    }

    EkfOptions options_;
    std::optional<EkfForecaster> filter_;
};

} // namespace

std::unique_ptr<Forecaster> make_naive_forecaster() {
    return std::make_unique<NaiveForecaster>();
}

std::unique_ptr<Forecaster> make_ar_forecaster(int p, bool refit_each_step) {
    return std::make_unique<ArForecaster>(p, refit_each_step);
}

std::unique_ptr<Forecaster> make_arima_forecaster(const ArimaSpec& spec,
                                                  bool refit_each_step) {
    return std::make_unique<ArimaForecaster>(spec, refit_each_step);
}

std::unique_ptr<Forecaster> make_ekf_forecaster(const EkfOptions& options) {
    return std::make_unique<EkfAdapter>(options);
}

LstmForecaster::LstmForecaster(const TrainConfig& cfg)
    : cfg_(cfg), params_(init_zero(cfg.dims)),
      adam_(AdamState::init(cfg.dims, cfg)) {
    cfg_.validate();
    if (cfg_.init == InitMode::Seeded) {
        SeededRng rng(cfg_.seed);
        params_ = init_seeded(cfg_.dims, rng, cfg_.init_scale);
    }
}

void LstmForecaster::retrain(std::span<const double> window, double label) {
    if (cfg_.adam_reset_per_iteration) {
        adam_ = AdamState::init(cfg_.dims, cfg_);
    }
    IterationResult iter = train_one_iteration(params_, window, label, cfg_, adam_);
    params_ = std::move(iter.best);
    records_.push_back(std::move(iter.records));
}

double LstmForecaster::predict(std::span<const double> window) {
    return forward(params_, window);
}

std::unique_ptr<LstmForecaster> make_lstm_forecaster(const TrainConfig& cfg) {
    return std::make_unique<LstmForecaster>(cfg);
}

} // namespace seqcast
