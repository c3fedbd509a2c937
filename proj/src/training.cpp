#include "seqcast/training.hpp"

#include "seqcast/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

namespace seqcast {

void TrainConfig::validate() const {
    std::string problems;
    const auto complain = [&](const std::string& p) {
        problems += problems.empty() ? p : ("; " + p);
    };
    if (dims.num_layers < 1) complain("dims.num_layers must be >= 1");
    if (dims.hidden_dim < 1) complain("dims.hidden_dim must be >= 1");
    if (epochs < 1) complain("epochs must be >= 1");
    if (!(learning_rate > 0.0)) complain("learning_rate must be > 0");
    if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) complain("adam_beta1 must be in (0,1)");
    if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) complain("adam_beta2 must be in (0,1)");
    if (!(adam_epsilon > 0.0)) complain("adam_epsilon must be > 0");
    if (!(init_scale >= 0.0)) complain("init_scale must be >= 0");
    if (!problems.empty()) throw ConfigError("TrainConfig: " + problems);
}

AdamState AdamState::init(const LstmDims& dims, const TrainConfig& cfg) {
    AdamState state;
    const std::size_t n = param_count(dims);
    state.m.assign(n, 0.0);
    state.v.assign(n, 0.0);
    state.beta1 = cfg.adam_beta1;
    state.beta2 = cfg.adam_beta2;
    state.epsilon = cfg.adam_epsilon;
    state.learning_rate = cfg.learning_rate;
    return state;
}

double loss_relative_mse(double pred, double label) {
    if (label == 0.0) {
        throw DegenerateLabelError("loss_relative_mse: label is zero");
    }
    const double diff = pred - label;
    return (diff * diff) / (label * label);
}

namespace {

inline double sigmoid_scalar(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Activation trace of one layer over the whole window, laid out step-major.
struct LayerTrace {
    std::size_t hidden = 0;
    std::size_t input = 0;
    std::vector<double> z;      // steps × (hidden+input)
    std::vector<double> f, i, g, o, tanh_c, c_prev; // steps × hidden
};

struct TraceResult {
    double prediction = 0.0;
    std::vector<double> final_hidden;
    std::vector<LayerTrace> layers;
};

// Forward pass mirroring lstm.cpp's forward_full operation-for-operation so
// that recorded losses match forward() bit-exactly, with per-step activations
// kept for the backward sweep.
TraceResult forward_traced(const LstmParams& params,
                           std::span<const double> window) {
    if (window.empty()) {
        throw DimensionError("forward: window must hold at least one value");
    }
    const std::size_t h = params.layers.front().hidden_dim();
    const std::size_t k = params.layers.size();
    const std::size_t steps = window.size();

    std::vector<std::vector<double>> stream(steps);
    for (std::size_t t = 0; t < steps; ++t) stream[t] = {window[t]};

    TraceResult out;
    out.layers.resize(k);

    std::vector<double> hidden(h), cell(h), z, fa(h), ia(h), ga(h), oa(h);
    for (std::size_t layer = 0; layer < k; ++layer) {
        const CellWeights& w = params.layers[layer];
        const std::size_t in = w.input_dim();
        const std::size_t zlen = h + in;
        LayerTrace& trace = out.layers[layer];
        trace.hidden = h;
        trace.input = in;
        trace.z.resize(steps * zlen);
        trace.f.resize(steps * h);
        trace.i.resize(steps * h);
        trace.g.resize(steps * h);
        trace.o.resize(steps * h);
        trace.tanh_c.resize(steps * h);
        trace.c_prev.resize(steps * h);

        std::fill(hidden.begin(), hidden.end(), 0.0);
        std::fill(cell.begin(), cell.end(), 0.0);
        z.assign(zlen, 0.0);
        for (std::size_t t = 0; t < steps; ++t) {
            std::copy(hidden.begin(), hidden.end(), z.begin());
            std::copy(stream[t].begin(), stream[t].end(), z.begin() + h);
            std::copy(z.begin(), z.end(), trace.z.begin() + t * zlen);

            const auto affine = [&](const Matrix& m, const Vector& b,
                                    std::vector<double>& dst) {
                for (std::size_t r = 0; r < h; ++r) {
                    double acc = b[r];
                    for (std::size_t c = 0; c < zlen; ++c)
                        acc += m(r, c) * z[c];
                    dst[r] = acc;
                }
            };
            affine(w.w_f, w.b_f, fa);
            affine(w.w_i, w.b_i, ia);
            affine(w.w_c, w.b_c, ga);
            affine(w.w_o, w.b_o, oa);

            for (std::size_t d = 0; d < h; ++d) {
                const double fd = sigmoid_scalar(fa[d]);
                const double id = sigmoid_scalar(ia[d]);
                const double gd = std::tanh(ga[d]);
                const double od = sigmoid_scalar(oa[d]);
                trace.c_prev[t * h + d] = cell[d];
                cell[d] = fd * cell[d] + id * gd;
                hidden[d] = od * std::tanh(cell[d]);
                if (!std::isfinite(cell[d]) || !std::isfinite(hidden[d])) {
                    throw DivergenceError(
                        "forward: non-finite hidden/cell state");
                }
                trace.f[t * h + d] = fd;
                trace.i[t * h + d] = id;
                trace.g[t * h + d] = gd;
                trace.o[t * h + d] = od;
                trace.tanh_c[t * h + d] = std::tanh(cell[d]);
            }
            stream[t] = hidden;
        }
    }

    double pred = params.readout_b;
    for (std::size_t d = 0; d < h; ++d) pred += params.readout_w[d] * hidden[d];
    if (!std::isfinite(pred)) {
        throw DivergenceError("forward: non-finite prediction");
    }
    out.prediction = pred;
    out.final_hidden = hidden;
    return out;
}

// Flat offsets of each slot in the canonical parameter layout.
struct SlotOffsets {
    std::size_t w[4]; // w_f, w_i, w_c, w_o
    std::size_t b[4]; // b_f, b_i, b_c, b_o
};

std::vector<SlotOffsets> layer_offsets(const LstmDims& dims) {
    std::vector<SlotOffsets> offsets(dims.num_layers);
    const std::size_t h = dims.hidden_dim;
    std::size_t pos = 0;
    for (std::size_t l = 0; l < dims.num_layers; ++l) {
        const std::size_t in = (l == 0) ? 1 : h;
        const std::size_t wsz = h * (h + in);
        for (int s = 0; s < 4; ++s) offsets[l].w[s] = pos + s * wsz;
        for (int s = 0; s < 4; ++s) offsets[l].b[s] = pos + 4 * wsz + s * h;
        pos += 4 * wsz + 4 * h;
    }
    return offsets;
}

} // namespace

BpttResult bptt_gradients(const LstmParams& params,
                          std::span<const double> window, double label) {
    const TraceResult trace = forward_traced(params, window);
    const double loss = loss_relative_mse(trace.prediction, label);
    if (!std::isfinite(loss)) {
        throw DivergenceError("bptt_gradients: non-finite loss");
    }

    const LstmDims dims = params.dims();
    const std::size_t h = dims.hidden_dim;
    const std::size_t k = dims.num_layers;
    const std::size_t steps = window.size();
    const std::vector<SlotOffsets> offsets = layer_offsets(dims);

    std::vector<double> flat(param_count(dims), 0.0);
    const double dpred = 2.0 * (trace.prediction - label) / (label * label);

    // readout
    const std::size_t readout_off = flat.size() - h - 1;
    for (std::size_t d = 0; d < h; ++d) {
        flat[readout_off + d] = dpred * trace.final_hidden[d];
    }
    flat.back() = dpred;

    // loss gradient w.r.t. each layer's hidden stream; top layer feels the
    // readout only at the final step, lower layers receive dx from above
    std::vector<double> dh_in(steps * h, 0.0);
    for (std::size_t d = 0; d < h; ++d) {
        dh_in[(steps - 1) * h + d] = dpred * params.readout_w[d];
    }

    std::vector<double> dh_next(h), dc_next(h);
    std::vector<double> daf(h), dai(h), dac(h), dao(h), dz;
    std::vector<double> dx_out;
    for (std::size_t layer = k; layer-- > 0;) {
        const CellWeights& w = params.layers[layer];
        const LayerTrace& lt = trace.layers[layer];
        const std::size_t in = lt.input;
        const std::size_t zlen = h + in;
        const SlotOffsets& off = offsets[layer];
        dz.assign(zlen, 0.0);
        dx_out.assign(steps * in, 0.0);
        std::fill(dh_next.begin(), dh_next.end(), 0.0);
        std::fill(dc_next.begin(), dc_next.end(), 0.0);

        for (std::size_t t = steps; t-- > 0;) {
            const double* z = lt.z.data() + t * zlen;
            const double* f = lt.f.data() + t * h;
            const double* i = lt.i.data() + t * h;
            const double* g = lt.g.data() + t * h;
            const double* o = lt.o.data() + t * h;
            const double* tc = lt.tanh_c.data() + t * h;
            const double* cp = lt.c_prev.data() + t * h;

            for (std::size_t d = 0; d < h; ++d) {
                const double dht = dh_in[t * h + d] + dh_next[d];
                const double dot = dht * tc[d];
                dao[d] = dot * o[d] * (1.0 - o[d]);
                const double dct = dc_next[d] + dht * o[d] * (1.0 - tc[d] * tc[d]);
                const double dft = dct * cp[d];
                daf[d] = dft * f[d] * (1.0 - f[d]);
                const double dit = dct * g[d];
                dai[d] = dit * i[d] * (1.0 - i[d]);
                const double dgt = dct * i[d];
                dac[d] = dgt * (1.0 - g[d] * g[d]);
                dc_next[d] = dct * f[d];
            }

            const std::array<const std::vector<double>*, 4> das = {&daf, &dai,
                                                                   &dac, &dao};
            for (int s = 0; s < 4; ++s) {
                const std::vector<double>& da = *das[s];
                double* gw = flat.data() + off.w[s];
                double* gb = flat.data() + off.b[s];
                for (std::size_t r = 0; r < h; ++r) {
                    const double dar = da[r];
                    if (dar == 0.0) continue;
                    double* row = gw + r * zlen;
                    for (std::size_t c = 0; c < zlen; ++c)
                        row[c] += dar * z[c];
                    gb[r] += dar;
                }
            }

            std::fill(dz.begin(), dz.end(), 0.0);
            const std::array<const Matrix*, 4> ws = {&w.w_f, &w.w_i, &w.w_c,
                                                     &w.w_o};
            for (int s = 0; s < 4; ++s) {
                const Matrix& m = *ws[s];
                const std::vector<double>& da = *das[s];
                for (std::size_t r = 0; r < h; ++r) {
                    const double dar = da[r];
                    if (dar == 0.0) continue;
                    for (std::size_t c = 0; c < zlen; ++c)
                        dz[c] += m(r, c) * dar;
                }
            }
            for (std::size_t d = 0; d < h; ++d) dh_next[d] = dz[d];
            for (std::size_t c = 0; c < in; ++c)
                dx_out[t * in + c] = dz[h + c];
        }

        if (layer > 0) {
            dh_in.swap(dx_out); // dx of this layer is dh of the layer below
        }
    }

    for (const double v : flat) {
        if (!std::isfinite(v)) {
            throw DivergenceError("bptt_gradients: non-finite gradient");
        }
    }
    return BpttResult{loss, unflatten_gradients(dims, flat)};
}

Gradients fd_gradient_oracle(const LstmParams& params,
                             std::span<const double> window, double label,
                             double step) {
    if (!(step > 0.0)) {
        throw DimensionError("fd_gradient_oracle: step must be > 0");
    }
    const LstmDims dims = params.dims();
    std::vector<double> flat = flatten(params);
    std::vector<double> grad(flat.size(), 0.0);
    for (std::size_t idx = 0; idx < flat.size(); ++idx) {
        const double saved = flat[idx];
        flat[idx] = saved + step;
        const double up =
            loss_relative_mse(forward(unflatten_params(dims, flat), window), label);
        flat[idx] = saved - step;
        const double down =
            loss_relative_mse(forward(unflatten_params(dims, flat), window), label);
        flat[idx] = saved;
        grad[idx] = (up - down) / (2.0 * step);
    }
    return unflatten_gradients(dims, grad);
}

LstmParams adam_step(const LstmParams& params, const Gradients& grads,
                     AdamState& state) {
    std::vector<double> p = flatten(params);
    const std::vector<double> g = flatten(grads);
    if (p.size() != g.size() || p.size() != state.m.size() ||
        p.size() != state.v.size()) {
        throw DimensionError("adam_step: parameter/gradient/state size mismatch");
    }
    state.step_count += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, state.step_count);
    const double bc2 = 1.0 - std::pow(state.beta2, state.step_count);
    for (std::size_t idx = 0; idx < p.size(); ++idx) {
        state.m[idx] = state.beta1 * state.m[idx] + (1.0 - state.beta1) * g[idx];
        state.v[idx] =
            state.beta2 * state.v[idx] + (1.0 - state.beta2) * g[idx] * g[idx];
        const double m_hat = state.m[idx] / bc1;
        const double v_hat = state.v[idx] / bc2;
        p[idx] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
    return unflatten_params(params.dims(), p);
}

IterationResult train_one_iteration(const LstmParams& lstm1,
                                    std::span<const double> window,
                                    double label, const TrainConfig& cfg,
                                    AdamState& adam) {
    cfg.validate();
    LstmParams params = lstm1;
    std::vector<EpochRecord> records;
    records.reserve(static_cast<std::size_t>(cfg.epochs));
    std::size_t best = 0;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        BpttResult step = bptt_gradients(params, window, label);
        records.push_back(EpochRecord{epoch, step.loss, params});
        if (step.loss < records[best].loss) {
            best = records.size() - 1; // strict <: earliest epoch wins ties
        }
        params = adam_step(params, step.gradients, adam);
    }
    return IterationResult{records[best].snapshot, std::move(records)};
}

SequentialForecast sequential_forecast_lstm(std::span<const double> series,
                                            std::size_t train_len,
                                            std::size_t horizon,
                                            const TrainConfig& cfg,
                                            const IterationObserver& observer) {
    cfg.validate();
    if (train_len < 2 || horizon < 1) {
        throw InsufficientDataError(
            "sequential_forecast_lstm: need train_len >= 2 and horizon >= 1");
    }
    if (horizon >= train_len) {
        throw InsufficientDataError(
            "sequential_forecast_lstm: horizon must be < train_len");
    }
    if (series.size() < train_len + horizon) {
        throw InsufficientDataError(
            "sequential_forecast_lstm: series shorter than train_len + horizon");
    }

    SeededRng rng(cfg.seed);
    LstmParams params = (cfg.init == InitMode::Zero)
                            ? init_zero(cfg.dims)
                            : init_seeded(cfg.dims, rng, cfg.init_scale);
    AdamState adam = AdamState::init(cfg.dims, cfg);

    const std::size_t window_len = train_len - 1;
    std::vector<double> seq(series.begin(), series.begin() + train_len);
    seq.reserve(train_len + horizon);

    SequentialForecast out{{}, params, {}};
    for (std::size_t t = 1; t <= horizon + 1; ++t) {
        const std::span<const double> window =
            std::span<const double>(seq).subspan(t - 1, window_len);
        const double label = series[train_len + t - 2];
        if (observer) observer(static_cast<int>(t), window, label);
        if (cfg.adam_reset_per_iteration) {
            adam = AdamState::init(cfg.dims, cfg);
        }
        IterationResult iter = train_one_iteration(params, window, label, cfg, adam);
        params = std::move(iter.best);
        out.records.push_back(std::move(iter.records));
        if (t <= horizon) {
            const std::span<const double> next_window =
                std::span<const double>(seq).subspan(t, window_len);
            const double pred = forward(params, next_window);
            out.predictions.push_back(pred);
            seq.push_back(cfg.feedback == FeedbackMode::Prediction
                              ? pred
                              : series[train_len + t - 1]);
        }
    }
    out.final_params = std::move(params);
    return out;
}

GradCheckResult run_gradient_check(int instances, std::uint64_t seed) {
    const LstmDims dims{1, 4};
    const std::size_t window_len = 10;
    SeededRng rng(seed);
    GradCheckResult result{instances, 0.0};
    for (int inst = 0; inst < instances; ++inst) {
        LstmParams params = init_seeded(dims, rng, 0.5);
        std::vector<double> window(window_len);
        for (double& x : window) x = rng.uniform(-1.0, 1.0);
        double label = rng.uniform(0.5, 1.5);
        if (rng.uniform01() < 0.5) label = -label;

        const BpttResult bptt = bptt_gradients(params, window, label);
        const Gradients fd = fd_gradient_oracle(params, window, label);
        const std::vector<double> gb = flatten(bptt.gradients);
        const std::vector<double> gf = flatten(fd);
        for (std::size_t idx = 0; idx < gb.size(); ++idx) {
            const double denom = std::max(std::abs(gf[idx]), 1e-8);
            const double rel = std::abs(gb[idx] - gf[idx]) / denom;
            result.max_relative_error = std::max(result.max_relative_error, rel);
        }
    }
    return result;
}

} // namespace seqcast
