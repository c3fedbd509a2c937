#pragma once

#include "seqcast/lstm.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace seqcast {

enum class InitMode { Seeded, Zero };

/// What the rolling window carries once the horizon starts: the model's own
/// prior predictions (the scheme as written) or the arrived observations.
enum class FeedbackMode { Prediction, Observation };

struct TrainConfig {
    LstmDims dims{};
    int epochs = 100; // L
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    InitMode init = InitMode::Seeded;
    double init_scale = 0.1;
    std::uint64_t seed = 0;
    bool adam_reset_per_iteration = false;
    FeedbackMode feedback = FeedbackMode::Prediction;

    void validate() const;
};

/// Bias-corrected first/second moment accumulators, flat parameter layout.
struct AdamState {
    std::vector<double> m, v;
    long step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double learning_rate = 1e-3;

    static AdamState init(const LstmDims& dims, const TrainConfig& cfg);
};

/// Per-epoch bookkeeping: the loss observed at this epoch together with the
/// exact parameters that produced it (taken before the optimizer step).
struct EpochRecord {
    int epoch_index; // 1-based, in [1, L]
    double loss;
    LstmParams snapshot;
};

/// (pred - label)^2 / label^2. Throws DegenerateLabelError when label == 0.
double loss_relative_mse(double pred, double label);

struct BpttResult {
    double loss;
    Gradients gradients;
};

/// Exact reverse-mode derivatives of loss_relative_mse(forward(params,
/// window), label) with respect to every parameter.
BpttResult bptt_gradients(const LstmParams& params,
                          std::span<const double> window, double label);

/// Central-difference gradient, (L(θ+δ)−L(θ−δ))/2δ per parameter. Verification
/// oracle: depends only on forward() and the loss, never on the BPTT path.
Gradients fd_gradient_oracle(const LstmParams& params,
                             std::span<const double> window, double label,
                             double step = 1e-5);

/// One optimizer step; state is advanced in place and new parameters returned.
LstmParams adam_step(const LstmParams& params, const Gradients& grads,
                     AdamState& state);

struct IterationResult {
    LstmParams best; // snapshot attaining the minimal recorded loss
    std::vector<EpochRecord> records;
};

/**
 * Trains L epochs on the single (window, label) instance: forward, loss,
 * BPTT, ADAM, recording loss + snapshot each epoch before the update, and
 * returns the least-loss snapshot (earliest epoch wins ties). Optimizer
 * moments carry across calls through `adam`.
 */
IterationResult train_one_iteration(const LstmParams& lstm1,
                                    std::span<const double> window,
                                    double label, const TrainConfig& cfg,
                                    AdamState& adam);

struct SequentialForecast {
    std::vector<double> predictions; // x̂(T+1) … x̂(T+N)
    LstmParams final_params;
    std::vector<std::vector<EpochRecord>> records; // one list per iteration
};

/// Observer invoked once per outer iteration with the training window and
/// label before training; used for logging and bookkeeping tests.
using IterationObserver =
    std::function<void(int iteration, std::span<const double> window, double label)>;

/**
 * The sequential one-step-ahead scheme over a raw value sequence: iterations
 * t = 1..N+1 each retrain on the current width-(T−1) window against the
 * arrived observation, then predict the next step from the shifted window.
 * Windows extend past the observed range with prior predictions (or arrived
 * truths, per cfg.feedback). Requires series length >= T+N.
 */
SequentialForecast sequential_forecast_lstm(std::span<const double> series,
                                            std::size_t train_len,
                                            std::size_t horizon,
                                            const TrainConfig& cfg,
                                            const IterationObserver& observer = {});

struct GradCheckResult {
    int instances = 0;
    double max_relative_error = 0.0;
};

/// BPTT-vs-central-difference sweep over seeded random instances
/// (K=1, hidden 4, window 10); relative error uses max(|fd|, 1e-8) in the
/// denominator.
GradCheckResult run_gradient_check(int instances, std::uint64_t seed);

} // namespace seqcast
