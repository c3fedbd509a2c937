#include "seqcast/errors.hpp"
#include "seqcast/lstm.hpp"

#include <doctest.h>

#include <cmath>

using namespace seqcast;

namespace {

CellWeights zero_cell(std::size_t hidden, std::size_t input) {
    const std::size_t cols = hidden + input;
    return CellWeights{Matrix::zeros(hidden, cols), Matrix::zeros(hidden, cols),
                       Matrix::zeros(hidden, cols), Matrix::zeros(hidden, cols),
                       Vector::zeros(hidden), Vector::zeros(hidden),
                       Vector::zeros(hidden), Vector::zeros(hidden)};
}

// K=1, hidden 1 parameters with hand-set weights; the expected forward value
// below was computed independently with a step-by-step scalar trace.
LstmParams hand_params() {
    LstmParams p{{zero_cell(1, 1)}, Vector({1.5}), -0.25};
    CellWeights& w = p.layers[0];
    w.w_f(0, 0) = 0.1;  w.w_f(0, 1) = -0.2; w.b_f[0] = 0.05;
    w.w_i(0, 0) = 0.3;  w.w_i(0, 1) = 0.4;  w.b_i[0] = -0.1;
    w.w_c(0, 0) = -0.5; w.w_c(0, 1) = 0.6;  w.b_c[0] = 0.2;
    w.w_o(0, 0) = 0.7;  w.w_o(0, 1) = -0.8; w.b_o[0] = 0.0;
    return p;
}

} // namespace

TEST_CASE("cell_step zero-initialization fixed point") {
    const CellWeights w = zero_cell(1, 1);
    const CellState next = cell_step(w, CellState::zero(1), Vector({3.7}));
    CHECK(next.h[0] == 0.0);
    CHECK(next.c[0] == 0.0);
}

TEST_CASE("cell_step analytic gate values") {
    const CellWeights w = zero_cell(1, 1);
    // zero weights: f = i = o = sigmoid(0) = 0.5, candidate = tanh(0) = 0
    const CellState prev{Vector({0.0}), Vector({1.0})};
    const CellState next = cell_step(w, prev, Vector({0.0}));
    CHECK(next.c[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(next.h[0] == doctest::Approx(0.23105857863000487).epsilon(1e-12));
}

TEST_CASE("cell_step forget-gate saturation") {
    CellWeights w = zero_cell(1, 1);
    w.b_f[0] = 10.0; // sigmoid(10) = 0.9999546...
    const CellState prev{Vector({0.0}), Vector({1.0})};
    const CellState next = cell_step(w, prev, Vector({0.0}));
    CHECK(next.c[0] == doctest::Approx(0.9999546021312976).epsilon(1e-12));
}

TEST_CASE("cell_step rejects mismatched shapes") {
    const CellWeights w = zero_cell(2, 1);
    CHECK_THROWS_AS(cell_step(w, CellState::zero(1), Vector({1.0})),
                    DimensionError);
    CHECK_THROWS_AS(cell_step(w, CellState::zero(2), Vector({1.0, 2.0})),
                    DimensionError);
}

TEST_CASE("forward with all-zero parameters predicts zero") {
    const LstmParams p = init_zero(LstmDims{2, 3});
    const std::vector<double> window{0.4, -1.2, 7.0, 0.0};
    CHECK(forward(p, window) == 0.0);
}

TEST_CASE("forward matches the hand-computed scalar trace") {
    const LstmParams p = hand_params();
    const std::vector<double> window{0.5, 0.25};
    CHECK(forward(p, window) ==
          doctest::Approx(-0.06499053936966381).epsilon(1e-14));
}

TEST_CASE("doubling the readout weights doubles prediction minus bias") {
    LstmParams p = hand_params();
    const std::vector<double> window{0.5, 0.25, -0.3};
    const double base = forward(p, window) - p.readout_b;
    p.readout_w = scale(p.readout_w, 2.0);
    const double doubled = forward(p, window) - p.readout_b;
    CHECK(doubled == doctest::Approx(2.0 * base).epsilon(1e-12));
}

TEST_CASE("forward is deterministic bitwise") {
    SeededRng rng(11);
    const LstmParams p = init_seeded(LstmDims{2, 4}, rng, 0.3);
    const std::vector<double> window{0.1, 0.9, -0.5, 0.2, 0.8};
    CHECK(forward(p, window) == forward(p, window));
}

TEST_CASE("gate ranges and hidden-state bound") {
    SeededRng rng(5);
    const LstmDims dims{1, 6};
    for (int trial = 0; trial < 20; ++trial) {
        const LstmParams p = init_seeded(dims, rng, 2.0);
        CellState state = CellState::zero(dims.hidden_dim);
        for (int t = 0; t < 10; ++t) {
            const Vector x({rng.uniform(-3.0, 3.0)});
            state = cell_step(p.layers[0], state, x);
            for (std::size_t d = 0; d < dims.hidden_dim; ++d) {
                CHECK(std::abs(state.h[d]) < 1.0);
            }
        }
    }
}

TEST_CASE("init_seeded determinism and zero-scale degeneration") {
    const LstmDims dims{2, 5};
    SeededRng r1(77), r2(77), r3(78);
    CHECK(flatten(init_seeded(dims, r1, 0.1)) == flatten(init_seeded(dims, r2, 0.1)));
    CHECK(flatten(init_seeded(dims, r3, 0.0)) == flatten(init_zero(dims)));
}

TEST_CASE("init_zero forward is zero for any window") {
    const LstmParams p = init_zero(LstmDims{1, 8});
    CHECK(forward(p, std::vector<double>{1.0, 2.0, 3.0}) == 0.0);
}

TEST_CASE("forward rejects empty windows and reports divergence") {
    const LstmParams p = init_zero(LstmDims{1, 2});
    CHECK_THROWS_AS(forward(p, std::span<const double>{}), DimensionError);

    // NaN inputs poison the recurrence and are reported as divergence
    const std::vector<double> poisoned{0.5, std::nan("")};
    CHECK_THROWS_AS(forward(p, poisoned), DivergenceError);

    // the linear readout can overflow even though gates saturate finitely
    LstmParams big = init_zero(LstmDims{1, 2});
    for (std::size_t d = 0; d < 2; ++d) {
        big.layers[0].b_f[d] = 5.0; // retain the cell so it keeps growing
        big.layers[0].b_c[d] = 5.0;
        big.layers[0].b_o[d] = 5.0;
        big.readout_w[d] = 1.7e308;
    }
    const std::vector<double> window{1.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(forward(big, window), DivergenceError);
}

TEST_CASE("flatten/unflatten round trip") {
    SeededRng rng(21);
    const LstmDims dims{3, 4};
    const LstmParams p = init_seeded(dims, rng, 0.5);
    const std::vector<double> flat = flatten(p);
    CHECK(flat.size() == param_count(dims));
    CHECK(flatten(unflatten_params(dims, flat)) == flat);
    CHECK_THROWS_AS(unflatten_params(dims, std::vector<double>(3, 0.0)),
                    DimensionError);
}

TEST_CASE("parameter snapshot JSON round trip is bit-exact") {
    SeededRng rng(31);
    const LstmParams p = init_seeded(LstmDims{2, 3}, rng, 0.7);
    const LstmParams back = params_from_json(params_to_json(p));
    CHECK(flatten(back) == flatten(p));
    CHECK(back.readout_b == p.readout_b);
    CHECK_THROWS(params_from_json("{\"format\":\"other\"}"));
}
