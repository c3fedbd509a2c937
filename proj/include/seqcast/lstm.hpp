#pragma once

#include "seqcast/linalg.hpp"
#include "seqcast/rng.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace seqcast {

/// Stack shape. Layer 0 consumes the scalar series; every layer above
/// consumes the hidden stream of the layer below.
struct LstmDims {
    std::size_t num_layers = 1; // K
    std::size_t hidden_dim = 8;
};

/**
 * One recurrent cell: four gate matrices of shape hidden × (hidden + input)
 * acting on the concatenation [h_prev, x], plus the four gate biases.
 */
struct CellWeights {
    Matrix w_f, w_i, w_c, w_o;
    Vector b_f, b_i, b_c, b_o;

    std::size_t hidden_dim() const { return b_f.size(); }
    std::size_t input_dim() const { return w_f.cols() - b_f.size(); }
};

struct CellState {
    Vector h; // hidden state
    Vector c; // memory cell

    static CellState zero(std::size_t hidden_dim);
};

/// Full parameter set: K stacked cells plus a linear readout mapping the top
/// layer's final hidden state to one scalar.
struct LstmParams {
    std::vector<CellWeights> layers;
    Vector readout_w;
    double readout_b = 0.0;

    LstmDims dims() const;
};

/// Slot-for-slot derivative (or moment) container matching LstmParams.
struct Gradients {
    std::vector<CellWeights> layers;
    Vector readout_w;
    double readout_b = 0.0;
};

/// Number of scalars in a parameter set of the given shape.
std::size_t param_count(const LstmDims& dims);

// Canonical flat layout, also used by the JSON snapshot format:
// per layer w_f, w_i, w_c, w_o (row-major), b_f, b_i, b_c, b_o;
// then readout_w, readout_b.
std::vector<double> flatten(const LstmParams& params);
std::vector<double> flatten(const Gradients& grads);
LstmParams unflatten_params(const LstmDims& dims, std::span<const double> flat);
Gradients unflatten_gradients(const LstmDims& dims, std::span<const double> flat);
Gradients zero_gradients(const LstmDims& dims);

/// Single recurrent step: gates from [h_prev, x], then the cell and hidden
/// updates f⊙c_prev + i⊙c̃ and o⊙tanh(c).
CellState cell_step(const CellWeights& w, const CellState& prev, const Vector& x);

struct ForwardResult {
    double prediction;
    Vector final_hidden; // top layer's hidden state after the last input
};

/// Many-to-one pass: feeds the window through all layers from zero initial
/// states and reads out one scalar. Throws DivergenceError on non-finite
/// intermediates.
double forward(const LstmParams& params, std::span<const double> window);
ForwardResult forward_full(const LstmParams& params, std::span<const double> window);

LstmParams init_zero(const LstmDims& dims);
/// Uniform in [-scale, scale], filled in canonical flat order.
LstmParams init_seeded(const LstmDims& dims, SeededRng& rng, double scale);

/// Snapshot serialization: JSON object with a dims header and the canonical
/// flat data array. Round-trips bit-exactly.
std::string params_to_json(const LstmParams& params);
LstmParams params_from_json(const std::string& text);

} // namespace seqcast
