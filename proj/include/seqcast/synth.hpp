#pragma once

#include "seqcast/harness.hpp"

#include <cstdint>
#include <vector>

namespace seqcast {

struct SineSpec {
    std::size_t points = 230;
    double period = 50.0;
    double amplitude = 1.0;
    double offset = 2.0; // keeps values away from zero for relative metrics
    double noise_sd = 0.0;
};
TimeSeries synth_sine(const SineSpec& spec, std::uint64_t seed);

struct ArmaSynthSpec {
    std::size_t points = 1000;
    std::vector<double> alpha;    // AR coefficients, most recent lag first
    std::vector<double> beta;     // MA coefficients (plus convention)
    double c = 0.0;
    double sigma = 1.0;
    std::size_t burn_in = 200;
};
/// x(t) = c + Σ alpha_i·x(t−i) + a(t) + Σ beta_j·a(t−j), Gaussian innovations.
TimeSeries synth_arma(const ArmaSynthSpec& spec, std::uint64_t seed);

struct ArSynthSpec {
    std::size_t points = 1000;
    std::vector<double> alpha{0.5, -0.25};
    double c = 0.0;
    double sigma = 0.1;
    std::size_t burn_in = 200;
};
TimeSeries synth_ar(const ArSynthSpec& spec, std::uint64_t seed);

struct RandomWalkSpec {
    std::size_t points = 1000;
    double start = 100.0;
    double drift = 0.0;
    double sigma = 1.0;
};
TimeSeries synth_random_walk(const RandomWalkSpec& spec, std::uint64_t seed);

} // namespace seqcast
