#pragma once

#include "seqcast/harness.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace seqcast {

using FlatConfig = std::map<std::string, std::string>;

struct LstmMethodConfig {
    bool enabled = false;
    TrainConfig train;
    bool scaling = true; // LSTM inputs are min-max scaled by default
};

struct ArMethodConfig {
    bool enabled = false;
    int p = 1;
    bool refit_each_step = true;
    bool scaling = false;
};

struct ArimaMethodConfig {
    bool enabled = false;
    ArimaSpec spec;
    bool refit_each_step = true;
    bool scaling = false;
};

struct EkfMethodConfig {
    bool enabled = false;
    EkfOptions options;
    bool scaling = false;
};

struct NaiveMethodConfig {
    bool enabled = false;
    bool scaling = false;
};

/**
 * Fully resolved run description. Converts to and from a flat key map
 * (section-qualified keys such as "lstm.hidden_dim"); the map is what config
 * files parse into, what CLI flags override, and what reports echo, so a
 * report's config reproduces its run exactly.
 */
struct RunConfig {
    std::string series_path;
    std::string value_column = "1";
    std::string timestamp_column;
    std::size_t train_len = 0; // T
    std::size_t horizon = 0;   // N
    std::optional<std::uint64_t> seed;
    std::string output_dir = ".";
    FeedbackMode feedback = FeedbackMode::Prediction;
    bool include_timing = false;
    std::optional<std::string> preset;
    std::optional<std::string> method; // set for single-method forecast runs

    LstmMethodConfig lstm;
    ArMethodConfig ar;
    ArimaMethodConfig arima;
    EkfMethodConfig ekf;
    NaiveMethodConfig naive;

    /// Parses and validates; throws ConfigError listing every problem found
    /// (unknown keys, unparseable values, violated bounds), not just the first.
    static RunConfig from_flat_map(const FlatConfig& flat);
    FlatConfig to_flat_map() const;

    /// Methods for the harness, in canonical order (lstm, ekf, ar, arima,
    /// naive), restricted to enabled sections or to `only` when given.
    std::vector<MethodConfig> build_methods(
        const std::optional<std::string>& only = {}) const;

    /// Seed is mandatory whenever the LSTM participates.
    void require_seed_for_lstm(bool lstm_selected) const;
};

/// `key = value` lines with `[section]` headers and `#` comments. A section
/// header alone enables its method.
FlatConfig parse_config_text(const std::string& text);
FlatConfig parse_config_file(const std::string& path);
std::string config_to_text(const FlatConfig& flat);

/// Documented per-series defaults: training/prediction lengths and the
/// reported best AR/ARIMA orders.
struct Preset {
    std::size_t train_len;
    std::size_t horizon;
    int ar_p;
    ArimaSpec arima;
};
const std::map<std::string, Preset>& presets();

/// Fills absent keys from the named preset; unknown names throw ConfigError.
void apply_preset(FlatConfig& flat, const std::string& name);

} // namespace seqcast
