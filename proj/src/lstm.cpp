#include "seqcast/lstm.hpp"

#include "seqcast/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <utility>

namespace seqcast {

namespace {

void check_dims(const LstmDims& dims) {
    if (dims.num_layers < 1 || dims.hidden_dim < 1) {
        throw DimensionError("LstmDims: need num_layers >= 1, hidden_dim >= 1");
    }
}

std::size_t layer_input_dim(const LstmDims& dims, std::size_t layer) {
    return layer == 0 ? 1 : dims.hidden_dim;
}

void check_cell(const CellWeights& w) {
    const std::size_t h = w.b_f.size();
    const auto same = [&](const Matrix& m) {
        return m.rows() == h && m.cols() == w.w_f.cols() && m.cols() > h;
    };
    if (!same(w.w_f) || !same(w.w_i) || !same(w.w_c) || !same(w.w_o) ||
        w.b_i.size() != h || w.b_c.size() != h || w.b_o.size() != h) {
        throw DimensionError("CellWeights: gate shapes disagree");
    }
}

void check_params(const LstmParams& params) {
    if (params.layers.empty()) {
        throw DimensionError("LstmParams: need at least one layer");
    }
    const std::size_t hidden = params.layers.front().hidden_dim();
    std::size_t expected_input = 1;
    for (const CellWeights& cell : params.layers) {
        check_cell(cell);
        if (cell.hidden_dim() != hidden || cell.input_dim() != expected_input) {
            throw DimensionError("LstmParams: layer dimension chain broken");
        }
        expected_input = cell.hidden_dim();
    }
    if (params.readout_w.size() != hidden) {
        throw DimensionError("LstmParams: readout width != hidden_dim");
    }
    if (!std::isfinite(params.readout_b)) {
        throw DimensionError("LstmParams: non-finite readout bias");
    }
}

} // namespace

CellState CellState::zero(std::size_t hidden_dim) {
    return CellState{Vector::zeros(hidden_dim), Vector::zeros(hidden_dim)};
}

LstmDims LstmParams::dims() const {
    return LstmDims{layers.size(),
                    layers.empty() ? 0 : layers.front().hidden_dim()};
}

std::size_t param_count(const LstmDims& dims) {
    check_dims(dims);
    const std::size_t h = dims.hidden_dim;
    std::size_t count = 0;
    for (std::size_t l = 0; l < dims.num_layers; ++l) {
        count += 4 * h * (h + layer_input_dim(dims, l)) + 4 * h;
    }
    return count + h + 1; // readout
}

namespace {

// Shared canonical traversal for LstmParams and Gradients.
template <class T>
std::vector<double> flatten_impl(const T& p) {
    std::vector<double> flat;
    for (const CellWeights& cell : p.layers) {
        for (const Matrix* m : {&cell.w_f, &cell.w_i, &cell.w_c, &cell.w_o}) {
            flat.insert(flat.end(), m->span().begin(), m->span().end());
        }
        for (const Vector* b : {&cell.b_f, &cell.b_i, &cell.b_c, &cell.b_o}) {
            flat.insert(flat.end(), b->begin(), b->end());
        }
    }
    flat.insert(flat.end(), p.readout_w.begin(), p.readout_w.end());
    flat.push_back(p.readout_b);
    return flat;
}

template <class T>
T unflatten_impl(const LstmDims& dims, std::span<const double> flat) {
    check_dims(dims);
    if (flat.size() != param_count(dims)) {
        throw DimensionError("unflatten: flat length does not match dims");
    }
    const std::size_t h = dims.hidden_dim;
    std::size_t pos = 0;
    const auto take = [&](std::size_t n) {
        std::vector<double> chunk(flat.begin() + pos, flat.begin() + pos + n);
        pos += n;
        return chunk;
    };
    T out{{}, Vector::zeros(h), 0.0};
    for (std::size_t l = 0; l < dims.num_layers; ++l) {
        const std::size_t in = layer_input_dim(dims, l);
        const std::size_t cols = h + in;
        Matrix w_f(h, cols, take(h * cols));
        Matrix w_i(h, cols, take(h * cols));
        Matrix w_c(h, cols, take(h * cols));
        Matrix w_o(h, cols, take(h * cols));
        Vector b_f(take(h)), b_i(take(h)), b_c(take(h)), b_o(take(h));
        out.layers.push_back(CellWeights{std::move(w_f), std::move(w_i),
                                         std::move(w_c), std::move(w_o),
                                         std::move(b_f), std::move(b_i),
                                         std::move(b_c), std::move(b_o)});
    }
    out.readout_w = Vector(take(h));
    out.readout_b = flat[pos];
    return out;
}

} // namespace

std::vector<double> flatten(const LstmParams& params) {
    return flatten_impl(params);
}

std::vector<double> flatten(const Gradients& grads) {
    return flatten_impl(grads);
}

LstmParams unflatten_params(const LstmDims& dims, std::span<const double> flat) {
    return unflatten_impl<LstmParams>(dims, flat);
}

Gradients unflatten_gradients(const LstmDims& dims, std::span<const double> flat) {
    return unflatten_impl<Gradients>(dims, flat);
}

Gradients zero_gradients(const LstmDims& dims) {
    return unflatten_impl<Gradients>(
        dims, std::vector<double>(param_count(dims), 0.0));
}

CellState cell_step(const CellWeights& w, const CellState& prev, const Vector& x) {
    check_cell(w);
    const std::size_t h = w.hidden_dim();
    if (prev.h.size() != h || prev.c.size() != h || x.size() != w.input_dim()) {
        throw DimensionError("cell_step: state/input shape mismatch");
    }
    // z = [h_prev, x]
    std::vector<double> z(prev.h.begin(), prev.h.end());
    z.insert(z.end(), x.begin(), x.end());
    const Vector zv(std::move(z));

    const Vector f = sigmoid(add(matvec(w.w_f, zv), w.b_f));
    const Vector i = sigmoid(add(matvec(w.w_i, zv), w.b_i));
    const Vector c_tilde = tanh_ew(add(matvec(w.w_c, zv), w.b_c));
    const Vector c = add(hadamard(f, prev.c), hadamard(i, c_tilde));
    const Vector o = sigmoid(add(matvec(w.w_o, zv), w.b_o));
    const Vector h_next = hadamard(o, tanh_ew(c));
    return CellState{h_next, c};
}

namespace {

// Raw scalar-buffer forward shared by forward() and the BPTT trace in
// training.cpp; Vector/Matrix wrappers stay at the API boundary.
void gate_affine(const Matrix& w, const Vector& b,
                 std::span<const double> z, std::span<double> out) {
    const std::size_t rows = w.rows();
    const std::size_t cols = w.cols();
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = b[r];
        for (std::size_t c = 0; c < cols; ++c) acc += w(r, c) * z[c];
        out[r] = acc;
    }
}

inline double sigmoid_scalar(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace

ForwardResult forward_full(const LstmParams& params,
                           std::span<const double> window) {
    check_params(params);
    if (window.empty()) {
        throw DimensionError("forward: window must hold at least one value");
    }
    const std::size_t h = params.layers.front().hidden_dim();
    const std::size_t k = params.layers.size();

    // current inputs per step; starts as the raw window, becomes the hidden
    // stream of each layer in turn
    std::vector<std::vector<double>> stream(window.size());
    for (std::size_t t = 0; t < window.size(); ++t) {
        stream[t] = {window[t]};
    }

    std::vector<double> hidden(h), cell(h), z, f(h), i(h), g(h), o(h);
    for (std::size_t layer = 0; layer < k; ++layer) {
        const CellWeights& w = params.layers[layer];
        const std::size_t in = w.input_dim();
        std::fill(hidden.begin(), hidden.end(), 0.0);
        std::fill(cell.begin(), cell.end(), 0.0);
        z.assign(h + in, 0.0);
        for (std::size_t t = 0; t < window.size(); ++t) {
            std::copy(hidden.begin(), hidden.end(), z.begin());
            std::copy(stream[t].begin(), stream[t].end(), z.begin() + h);
            gate_affine(w.w_f, w.b_f, z, f);
            gate_affine(w.w_i, w.b_i, z, i);
            gate_affine(w.w_c, w.b_c, z, g);
            gate_affine(w.w_o, w.b_o, z, o);
            for (std::size_t d = 0; d < h; ++d) {
                const double fd = sigmoid_scalar(f[d]);
                const double id = sigmoid_scalar(i[d]);
                const double gd = std::tanh(g[d]);
                const double od = sigmoid_scalar(o[d]);
                cell[d] = fd * cell[d] + id * gd;
                hidden[d] = od * std::tanh(cell[d]);
                if (!std::isfinite(cell[d]) || !std::isfinite(hidden[d])) {
                    throw DivergenceError(
                        "forward: non-finite hidden/cell state");
                }
            }
            stream[t] = hidden;
        }
    }

    double pred = params.readout_b;
    for (std::size_t d = 0; d < h; ++d) pred += params.readout_w[d] * hidden[d];
    if (!std::isfinite(pred)) {
        throw DivergenceError("forward: non-finite prediction");
    }
    return ForwardResult{pred, Vector(std::move(hidden))};
}

double forward(const LstmParams& params, std::span<const double> window) {
    return forward_full(params, window).prediction;
}

LstmParams init_zero(const LstmDims& dims) {
    return unflatten_params(dims,
                            std::vector<double>(param_count(dims), 0.0));
}

LstmParams init_seeded(const LstmDims& dims, SeededRng& rng, double scale) {
    std::vector<double> flat(param_count(dims));
    for (double& x : flat) x = rng.uniform(-scale, scale);
    return unflatten_params(dims, flat);
}

std::string params_to_json(const LstmParams& params) {
    check_params(params);
    const LstmDims dims = params.dims();
    nlohmann::ordered_json j;
    j["format"] = "lstm-params-v1";
    j["num_layers"] = dims.num_layers;
    j["hidden_dim"] = dims.hidden_dim;
    j["input_dim"] = 1;
    j["data"] = flatten(params);
    return j.dump();
}

LstmParams params_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "lstm-params-v1") {
        throw DimensionError("params_from_json: unknown snapshot format");
    }
    const LstmDims dims{j.at("num_layers").get<std::size_t>(),
                        j.at("hidden_dim").get<std::size_t>()};
    const auto data = j.at("data").get<std::vector<double>>();
    return unflatten_params(dims, data);
}

} // namespace seqcast
