#include "seqcast/config.hpp"

#include "seqcast/csv.hpp"
#include "seqcast/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <set>
#include <sstream>

namespace seqcast {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "series", "value_column", "timestamp_column", "T", "N", "seed",
        "output_dir", "feedback", "timing", "preset", "method",
        "lstm.enabled", "lstm.hidden_dim", "lstm.K", "lstm.L", "lstm.lr",
        "lstm.adam_beta1", "lstm.adam_beta2", "lstm.adam_epsilon",
        "lstm.adam_reset", "lstm.init", "lstm.init_scale", "lstm.scaling",
        "ar.enabled", "ar.p", "ar.refit", "ar.scaling",
        "arima.enabled", "arima.p", "arima.d", "arima.q", "arima.refit",
        "arima.scaling",
        "ekf.enabled", "ekf.q_level", "ekf.q_trend", "ekf.r", "ekf.init_level",
        "ekf.init_trend", "ekf.p0", "ekf.scaling",
        "naive.enabled", "naive.scaling",
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

// Collects every problem before failing, per the exhaustive-errors contract.
struct Problems {
    std::vector<std::string> items;

    void add(const std::string& p) { items.push_back(p); }
    void raise_if_any() const {
        if (items.empty()) return;
        std::string message = "invalid configuration:";
        for (const std::string& p : items) message += "\n  - " + p;
        throw ConfigError(message);
    }
};

class FlatReader {
public:
    FlatReader(const FlatConfig& flat, Problems& problems)
        : flat_(flat), problems_(problems) {}

    bool has(const std::string& key) const { return flat_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& dflt) {
        const auto it = flat_.find(key);
        return it == flat_.end() ? dflt : it->second;
    }

    template <class T, class Parser>
    T get(const std::string& key, T dflt, Parser parse, const char* expect) {
        const auto it = flat_.find(key);
        if (it == flat_.end()) return dflt;
        T out{};
        if (!parse(it->second, out)) {
            problems_.add("key '" + key + "': expected " + expect + ", got '" +
                          it->second + "'");
            return dflt;
        }
        return out;
    }

private:
    const FlatConfig& flat_;
    Problems& problems_;
};

bool parse_u64(const std::string& s, std::uint64_t& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_size(const std::string& s, std::size_t& out) {
    std::uint64_t v = 0;
    if (!parse_u64(s, v)) return false;
    out = static_cast<std::size_t>(v);
    return true;
}

bool parse_int(const std::string& s, int& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_double_value(const std::string& s, double& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_bool(const std::string& s, bool& out) {
    if (s == "on" || s == "true" || s == "1") { out = true; return true; }
    if (s == "off" || s == "false" || s == "0") { out = false; return true; }
    return false;
}

bool parse_feedback(const std::string& s, FeedbackMode& out) {
    if (s == "prediction") { out = FeedbackMode::Prediction; return true; }
    if (s == "observation") { out = FeedbackMode::Observation; return true; }
    return false;
}

bool parse_init(const std::string& s, InitMode& out) {
    if (s == "seeded") { out = InitMode::Seeded; return true; }
    if (s == "zero") { out = InitMode::Zero; return true; }
    return false;
}

bool parse_refit(const std::string& s, bool& refit_each_step) {
    if (s == "every_step") { refit_each_step = true; return true; }
    if (s == "once") { refit_each_step = false; return true; }
    return false;
}

} // namespace

RunConfig RunConfig::from_flat_map(const FlatConfig& flat) {
    Problems problems;
    for (const auto& [key, value] : flat) {
        (void)value;
        if (!known_keys().count(key)) {
            problems.add("unknown key '" + key + "'");
        }
    }

    FlatReader read(flat, problems);
    RunConfig cfg;
    cfg.series_path = read.get_string("series", "");
    cfg.value_column = read.get_string("value_column", "1");
    cfg.timestamp_column = read.get_string("timestamp_column", "");
    cfg.train_len = read.get("T", std::size_t{0}, parse_size, "a non-negative integer");
    cfg.horizon = read.get("N", std::size_t{0}, parse_size, "a non-negative integer");
    if (read.has("seed")) {
        cfg.seed = read.get("seed", std::uint64_t{0}, parse_u64,
                            "an unsigned integer");
    }
    const char* env_out = std::getenv("SEQCAST_OUT_DIR");
    cfg.output_dir = read.get_string("output_dir", env_out ? env_out : ".");
    cfg.feedback = read.get("feedback", FeedbackMode::Prediction,
                            parse_feedback, "prediction|observation");
    cfg.include_timing = read.get("timing", false, parse_bool, "on|off");
    if (read.has("preset")) cfg.preset = read.get_string("preset", "");
    if (read.has("method")) cfg.method = read.get_string("method", "");

    cfg.lstm.enabled = read.get("lstm.enabled", false, parse_bool, "on|off");
    cfg.lstm.train.dims.hidden_dim =
        read.get("lstm.hidden_dim", std::size_t{8}, parse_size, "a positive integer");
    cfg.lstm.train.dims.num_layers =
        read.get("lstm.K", std::size_t{1}, parse_size, "a positive integer");
    cfg.lstm.train.epochs = read.get("lstm.L", 100, parse_int, "an integer");
    cfg.lstm.train.learning_rate =
        read.get("lstm.lr", 1e-3, parse_double_value, "a number");
    cfg.lstm.train.adam_beta1 =
        read.get("lstm.adam_beta1", 0.9, parse_double_value, "a number");
    cfg.lstm.train.adam_beta2 =
        read.get("lstm.adam_beta2", 0.999, parse_double_value, "a number");
    cfg.lstm.train.adam_epsilon =
        read.get("lstm.adam_epsilon", 1e-8, parse_double_value, "a number");
    cfg.lstm.train.adam_reset_per_iteration =
        read.get("lstm.adam_reset", false,
                 [](const std::string& s, bool& out) {
                     if (s == "per_iteration") { out = true; return true; }
                     if (s == "off") { out = false; return true; }
                     return false;
                 },
                 "off|per_iteration");
    cfg.lstm.train.init =
        read.get("lstm.init", InitMode::Seeded, parse_init, "seeded|zero");
    cfg.lstm.train.init_scale =
        read.get("lstm.init_scale", 0.1, parse_double_value, "a number");
    cfg.lstm.scaling = read.get("lstm.scaling", true, parse_bool, "on|off");

    cfg.ar.enabled = read.get("ar.enabled", false, parse_bool, "on|off");
    cfg.ar.p = read.get("ar.p", 1, parse_int, "an integer");
    cfg.ar.refit_each_step =
        read.get("ar.refit", true, parse_refit, "every_step|once");
    cfg.ar.scaling = read.get("ar.scaling", false, parse_bool, "on|off");

    cfg.arima.enabled = read.get("arima.enabled", false, parse_bool, "on|off");
    cfg.arima.spec.p = read.get("arima.p", 1, parse_int, "an integer");
    cfg.arima.spec.d = read.get("arima.d", 0, parse_int, "an integer");
    cfg.arima.spec.q = read.get("arima.q", 0, parse_int, "an integer");
    cfg.arima.refit_each_step =
        read.get("arima.refit", true, parse_refit, "every_step|once");
    cfg.arima.scaling = read.get("arima.scaling", false, parse_bool, "on|off");

    cfg.ekf.enabled = read.get("ekf.enabled", false, parse_bool, "on|off");
    if (read.has("ekf.q_level")) {
        cfg.ekf.options.q_level =
            read.get("ekf.q_level", 0.0, parse_double_value, "a number");
    }
    if (read.has("ekf.q_trend")) {
        cfg.ekf.options.q_trend =
            read.get("ekf.q_trend", 0.0, parse_double_value, "a number");
    }
    if (read.has("ekf.r")) {
        cfg.ekf.options.r = read.get("ekf.r", 0.0, parse_double_value, "a number");
    }
    if (read.has("ekf.init_level")) {
        cfg.ekf.options.init_level =
            read.get("ekf.init_level", 0.0, parse_double_value, "a number");
    }
    if (read.has("ekf.init_trend")) {
        cfg.ekf.options.init_trend =
            read.get("ekf.init_trend", 0.0, parse_double_value, "a number");
    }
    if (read.has("ekf.p0")) {
        cfg.ekf.options.p0 =
            read.get("ekf.p0", 0.0, parse_double_value, "a number");
    }
    cfg.ekf.scaling = read.get("ekf.scaling", false, parse_bool, "on|off");

    cfg.naive.enabled = read.get("naive.enabled", false, parse_bool, "on|off");
    cfg.naive.scaling = read.get("naive.scaling", false, parse_bool, "on|off");

    // structural constraints
    if (cfg.horizon < 1) problems.add("N must be >= 1");
    if (cfg.train_len <= cfg.horizon) problems.add("T must be > N");
    if (cfg.lstm.train.epochs < 1) problems.add("lstm.L must be >= 1");
    if (cfg.lstm.train.dims.hidden_dim < 1) problems.add("lstm.hidden_dim must be >= 1");
    if (cfg.lstm.train.dims.num_layers < 1) problems.add("lstm.K must be >= 1");
    if (cfg.ar.enabled && cfg.ar.p < 1) problems.add("ar.p must be >= 1");
    if (cfg.arima.spec.p < 0 || cfg.arima.spec.d < 0 || cfg.arima.spec.q < 0) {
        problems.add("arima orders must be >= 0");
    }
    if (cfg.arima.enabled && cfg.arima.spec.d == 0 &&
        cfg.arima.spec.p + cfg.arima.spec.q < 1) {
        problems.add("arima needs p+q >= 1 when d = 0");
    }
    if (cfg.method &&
        *cfg.method != "lstm" && *cfg.method != "ekf" && *cfg.method != "ar" &&
        *cfg.method != "arima" && *cfg.method != "naive") {
        problems.add("method must be one of lstm|ekf|ar|arima|naive");
    }
    if (cfg.preset && !presets().count(*cfg.preset)) {
        problems.add("unknown preset '" + *cfg.preset + "'");
    }

    problems.raise_if_any();
    return cfg;
}

FlatConfig RunConfig::to_flat_map() const {
    FlatConfig flat;
    flat["series"] = series_path;
    flat["value_column"] = value_column;
    flat["timestamp_column"] = timestamp_column;
    flat["T"] = std::to_string(train_len);
    flat["N"] = std::to_string(horizon);
    if (seed) flat["seed"] = std::to_string(*seed);
    flat["output_dir"] = output_dir;
    flat["feedback"] =
        feedback == FeedbackMode::Prediction ? "prediction" : "observation";
    flat["timing"] = include_timing ? "on" : "off";
    if (preset) flat["preset"] = *preset;
    if (method) flat["method"] = *method;

    flat["lstm.enabled"] = lstm.enabled ? "on" : "off";
    flat["lstm.hidden_dim"] = std::to_string(lstm.train.dims.hidden_dim);
    flat["lstm.K"] = std::to_string(lstm.train.dims.num_layers);
    flat["lstm.L"] = std::to_string(lstm.train.epochs);
    flat["lstm.lr"] = format_double(lstm.train.learning_rate);
    flat["lstm.adam_beta1"] = format_double(lstm.train.adam_beta1);
    flat["lstm.adam_beta2"] = format_double(lstm.train.adam_beta2);
    flat["lstm.adam_epsilon"] = format_double(lstm.train.adam_epsilon);
    flat["lstm.adam_reset"] =
        lstm.train.adam_reset_per_iteration ? "per_iteration" : "off";
    flat["lstm.init"] = lstm.train.init == InitMode::Zero ? "zero" : "seeded";
    flat["lstm.init_scale"] = format_double(lstm.train.init_scale);
    flat["lstm.scaling"] = lstm.scaling ? "on" : "off";

    flat["ar.enabled"] = ar.enabled ? "on" : "off";
    flat["ar.p"] = std::to_string(ar.p);
    flat["ar.refit"] = ar.refit_each_step ? "every_step" : "once";
    flat["ar.scaling"] = ar.scaling ? "on" : "off";

    flat["arima.enabled"] = arima.enabled ? "on" : "off";
    flat["arima.p"] = std::to_string(arima.spec.p);
    flat["arima.d"] = std::to_string(arima.spec.d);
    flat["arima.q"] = std::to_string(arima.spec.q);
    flat["arima.refit"] = arima.refit_each_step ? "every_step" : "once";
    flat["arima.scaling"] = arima.scaling ? "on" : "off";

    flat["ekf.enabled"] = ekf.enabled ? "on" : "off";
    if (ekf.options.q_level) flat["ekf.q_level"] = format_double(*ekf.options.q_level);
    if (ekf.options.q_trend) flat["ekf.q_trend"] = format_double(*ekf.options.q_trend);
    if (ekf.options.r) flat["ekf.r"] = format_double(*ekf.options.r);
    if (ekf.options.init_level) flat["ekf.init_level"] = format_double(*ekf.options.init_level);
    if (ekf.options.init_trend) flat["ekf.init_trend"] = format_double(*ekf.options.init_trend);
    if (ekf.options.p0) flat["ekf.p0"] = format_double(*ekf.options.p0);
    flat["ekf.scaling"] = ekf.scaling ? "on" : "off";

    flat["naive.enabled"] = naive.enabled ? "on" : "off";
    flat["naive.scaling"] = naive.scaling ? "on" : "off";
    return flat;
}

std::vector<MethodConfig> RunConfig::build_methods(
    const std::optional<std::string>& only) const {
    const auto selected = [&](const char* label, bool enabled) {
        if (only) return *only == label;
        return enabled;
    };
    std::vector<MethodConfig> methods;

    if (selected("lstm", lstm.enabled)) {
        TrainConfig train = lstm.train;
        train.feedback = feedback;
        if (seed) train.seed = *seed;
        methods.push_back(MethodConfig{
            "lstm",
            [train](std::uint64_t method_seed) mutable {
                train.seed = method_seed;
                return make_lstm_forecaster(train);
            },
            lstm.scaling ? ScalingMode::MinMax : ScalingMode::None,
            {}});
    }
    if (selected("ekf", ekf.enabled)) {
        const EkfOptions options = ekf.options;
        methods.push_back(MethodConfig{
            "ekf",
            [options](std::uint64_t) { return make_ekf_forecaster(options); },
            ekf.scaling ? ScalingMode::MinMax : ScalingMode::None,
            {}});
    }
    if (selected("ar", ar.enabled)) {
        const int p = ar.p;
        const bool refit = ar.refit_each_step;
        methods.push_back(MethodConfig{
            "ar",
            [p, refit](std::uint64_t) { return make_ar_forecaster(p, refit); },
            ar.scaling ? ScalingMode::MinMax : ScalingMode::None,
            {}});
    }
    if (selected("arima", arima.enabled)) {
        const ArimaSpec spec = arima.spec;
        const bool refit = arima.refit_each_step;
        methods.push_back(MethodConfig{
            "arima",
            [spec, refit](std::uint64_t) {
                return make_arima_forecaster(spec, refit);
            },
            arima.scaling ? ScalingMode::MinMax : ScalingMode::None,
            {}});
    }
    if (selected("naive", naive.enabled)) {
        methods.push_back(MethodConfig{
            "naive", [](std::uint64_t) { return make_naive_forecaster(); },
            naive.scaling ? ScalingMode::MinMax : ScalingMode::None,
            {}});
    }
    if (methods.empty()) {
        throw ConfigError(only ? "method '" + *only + "' requested but no such method"
                               : "no methods enabled (add a [lstm]/[ar]/... section)");
    }
    return methods;
}

void RunConfig::require_seed_for_lstm(bool lstm_selected) const {
    if (lstm_selected && !seed) {
        throw ConfigError(
            "LSTM runs require a seed (--seed flag or 'seed' config key)");
    }
}

FlatConfig parse_config_text(const std::string& text) {
    FlatConfig flat;
    Problems problems;
    std::string section;
    std::stringstream ss(text);
    std::string line;
    std::size_t line_no = 0;
    static const std::set<std::string> sections = {"lstm", "ar", "arima",
                                                   "ekf", "naive"};
    while (std::getline(ss, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') {
            continue;
        }
        if (stripped.front() == '[' && stripped.back() == ']') {
            section = trim(stripped.substr(1, stripped.size() - 2));
            if (!sections.count(section)) {
                problems.add("line " + std::to_string(line_no) +
                             ": unknown section '[" + section + "]'");
                section.clear();
                continue;
            }
            flat[section + ".enabled"] = "on";
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            problems.add("line " + std::to_string(line_no) +
                         ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            problems.add("line " + std::to_string(line_no) + ": empty key");
            continue;
        }
        flat[section.empty() ? key : section + "." + key] = value;
    }
    problems.raise_if_any();
    return flat;
}

FlatConfig parse_config_file(const std::string& path) {
    return parse_config_text(read_file(path));
}

std::string config_to_text(const FlatConfig& flat) {
    std::string out;
    // globals first
    for (const auto& [key, value] : flat) {
        if (key.find('.') == std::string::npos) {
            out += key + " = " + value + "\n";
        }
    }
    for (const std::string section : {"lstm", "ekf", "ar", "arima", "naive"}) {
        bool opened = false;
        for (const auto& [key, value] : flat) {
            if (key.rfind(section + ".", 0) != 0) continue;
            if (!opened) {
                out += "\n[" + section + "]\n";
                opened = true;
            }
            const std::string bare = key.substr(section.size() + 1);
            if (bare == "enabled") continue; // the header itself enables
            out += bare + " = " + value + "\n";
        }
        // a disabled section is simply omitted
        const auto enabled = flat.find(section + ".enabled");
        if (opened && enabled != flat.end() && enabled->second == "off") {
            // re-emit as explicit key so the round trip stays exact
            out += "enabled = off\n";
        }
    }
    return out;
}

const std::map<std::string, Preset>& presets() {
    static const std::map<std::string, Preset> table = {
        {"apple", {1228, 30, 300, ArimaSpec{10, 0, 2}}},
        {"microsoft", {1228, 30, 400, ArimaSpec{10, 2, 1}}},
        {"google", {1228, 30, 400, ArimaSpec{0, 1, 1}}},
        {"bitcoin", {1064, 30, 100, ArimaSpec{6, 0, 2}}},
        {"ethereum", {1064, 30, 100, ArimaSpec{6, 1, 1}}},
        {"cardano", {1064, 30, 300, ArimaSpec{8, 2, 1}}},
        {"oil", {8248, 200, 200, ArimaSpec{4, 1, 1}}},
        {"natural_gas", {5802, 150, 200, ArimaSpec{10, 1, 2}}},
        {"gold", {816, 30, 100, ArimaSpec{8, 2, 0}}},
    };
    return table;
}

void apply_preset(FlatConfig& flat, const std::string& name) {
    const auto it = presets().find(name);
    if (it == presets().end()) {
        throw ConfigError("unknown preset '" + name + "'");
    }
    const Preset& preset = it->second;
    const auto fill = [&](const std::string& key, const std::string& value) {
        if (!flat.count(key)) flat[key] = value;
    };
    flat["preset"] = name;
    fill("T", std::to_string(preset.train_len));
    fill("N", std::to_string(preset.horizon));
    fill("ar.p", std::to_string(preset.ar_p));
    fill("arima.p", std::to_string(preset.arima.p));
    fill("arima.d", std::to_string(preset.arima.d));
    fill("arima.q", std::to_string(preset.arima.q));
}

} // namespace seqcast
