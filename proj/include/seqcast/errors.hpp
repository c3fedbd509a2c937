#pragma once

#include <stdexcept>
#include <string>

namespace seqcast {

/// Shape or length disagreement between operands.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Linear system is not SPD / not solvable (Cholesky failed).
struct SingularSystemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Relative loss is undefined because the label is zero.
struct DegenerateLabelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Regression design is rank deficient (e.g. constant series).
struct DegenerateRegressionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Min-max scaling impossible: window has zero range.
struct DegenerateScaleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A computation produced NaN/Inf.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Series too short for the requested operation.
struct InsufficientDataError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Invalid run configuration; message lists every problem found.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// CSV ingestion failure; message names the offending line where known.
struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace seqcast
