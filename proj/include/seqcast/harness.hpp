#pragma once

#include "seqcast/arma.hpp"
#include "seqcast/ekf.hpp"
#include "seqcast/training.hpp"

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace seqcast {

struct TimeSeries {
    std::string id;
    std::vector<std::string> timestamps;
    std::vector<double> values;

    void validate() const; // matching lengths, finite values, length >= 2
};

/// Orders two timestamp labels, numerically when both parse as numbers and
/// lexicographically otherwise (ISO dates sort correctly either way).
bool timestamp_less(const std::string& a, const std::string& b);

/**
 * One-step-ahead forecaster driven by the rolling protocol: retrain sees the
 * current training window and the arrived observation, predict produces the
 * next-step forecast from the shifted window.
 */
class Forecaster {
public:
    virtual ~Forecaster() = default;
    virtual std::string name() const = 0;
    virtual void retrain(std::span<const double> window, double label) = 0;
    virtual double predict(std::span<const double> window) = 0;
    /// True for trainable models that retrain once more after the last
    /// scored step (the sequential scheme's final iteration); filters and
    /// the naive baseline skip that call.
    virtual bool retrain_after_horizon() const { return false; }
};

struct ForecastRecord {
    long time_index;       // 1-based position in the series, in (T, T+N]
    double predicted;
    double observed;
    double relative_error; // |predicted − observed| / |observed|
};

/// Mean relative absolute error over the prediction horizon.
double metric_e(const std::vector<ForecastRecord>& records);

struct StepFailure {
    long time_index;
    std::string message;
};

struct RunReport {
    std::string series_id;
    std::string method;
    std::map<std::string, std::string> config_echo;
    std::vector<ForecastRecord> records;
    std::optional<double> metric_e;
    int excluded_zero_observations = 0;
    std::vector<StepFailure> failures;
    bool aborted = false;
    std::vector<std::string> warnings;
    std::optional<double> wall_time_ms; // volatile; kept out of default JSON
    std::optional<std::string> error;   // whole-run failure (compare isolation)
};

/// Affine map of the training range onto [0,1]; extrapolates beyond it.
struct MinMaxScaler {
    double min_value = 0.0;
    double max_value = 1.0;

    static MinMaxScaler fit(std::span<const double> window);
    static MinMaxScaler identity() { return MinMaxScaler{0.0, 1.0}; }

    double scale(double x) const {
        return (x - min_value) / (max_value - min_value);
    }
    double inverse(double u) const {
        return min_value + u * (max_value - min_value);
    }
};

enum class ScalingMode { MinMax, None };

struct RollingOptions {
    std::size_t train_len = 0; // T
    std::size_t horizon = 0;   // N
    ScalingMode scaling = ScalingMode::None;
    FeedbackMode feedback = FeedbackMode::Prediction;
    bool include_timing = false;
};

/**
 * The real-time iteration scheme over any forecaster: per step, retrain on
 * the current width-(T−1) window and arrived label, predict the next value
 * from the shifted window, record it against the truth, and slide forward.
 * Scaling is fitted once on the initial training values and inverted on
 * every emitted prediction. Zero observations are excluded from the metric
 * with a count; the run aborts after 3 consecutive failed predictions.
 */
RunReport rolling_forecast(Forecaster& forecaster, const TimeSeries& series,
                           const RollingOptions& options);

struct MethodConfig {
    std::string label;
    std::function<std::unique_ptr<Forecaster>(std::uint64_t seed)> factory;
    ScalingMode scaling = ScalingMode::None;
    std::map<std::string, std::string> config_echo;
};

struct CompareOptions {
    std::size_t train_len = 0;
    std::size_t horizon = 0;
    FeedbackMode feedback = FeedbackMode::Prediction;
    std::uint64_t seed = 0; // per-method seeds derived from this
    bool include_timing = false;
};

/// One rolling run per method over identical data and (T, N); failures are
/// isolated into the affected report. Reports come back sorted by metric,
/// errored runs last.
std::vector<RunReport> compare_methods(const TimeSeries& series,
                                       const std::vector<MethodConfig>& methods,
                                       const CompareOptions& options);

// --- forecaster implementations ---

std::unique_ptr<Forecaster> make_naive_forecaster();
std::unique_ptr<Forecaster> make_ar_forecaster(int p, bool refit_each_step = true);
std::unique_ptr<Forecaster> make_arima_forecaster(const ArimaSpec& spec,
                                                  bool refit_each_step = true);

struct EkfOptions {
    // noise scales default to fractions of the training variance
    std::optional<double> q_level;
    std::optional<double> q_trend;
    std::optional<double> r;
    // initial-state overrides; defaults derive from the training window
    std::optional<double> init_level;
    std::optional<double> init_trend;
    std::optional<double> p0;
};
std::unique_ptr<Forecaster> make_ekf_forecaster(const EkfOptions& options = {});

/// Sequentially trained LSTM behind the Forecaster interface; exposes the
/// per-iteration epoch records for training-log output.
class LstmForecaster : public Forecaster {
public:
    explicit LstmForecaster(const TrainConfig& cfg);

    std::string name() const override { return "lstm"; }
    void retrain(std::span<const double> window, double label) override;
    double predict(std::span<const double> window) override;
    bool retrain_after_horizon() const override { return true; }

    const std::vector<std::vector<EpochRecord>>& iteration_records() const {
        return records_;
    }
    const LstmParams& params() const { return params_; }

private:
    TrainConfig cfg_;
    LstmParams params_;
    AdamState adam_;
    std::vector<std::vector<EpochRecord>> records_;
};

std::unique_ptr<LstmForecaster> make_lstm_forecaster(const TrainConfig& cfg);

} // namespace seqcast
