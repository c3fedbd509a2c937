#include "seqcast/config.hpp"
#include "seqcast/csv.hpp"
#include "seqcast/errors.hpp"
#include "seqcast/report.hpp"
#include "seqcast/synth.hpp"
#include "seqcast/training.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace seqcast;

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::vector<double> parse_coeff_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

void print_resolved_config(const FlatConfig& flat) {
    std::cout << "resolved configuration:\n";
    for (const auto& [key, value] : flat) {
        std::cout << "  " << key << " = " << value << "\n";
    }
}

// Flag values collected as strings; empty means "not given". Validation with
// exhaustive error listing happens in RunConfig::from_flat_map.
struct RunFlags {
    std::string config_path, preset, series, value_column, timestamp_column;
    std::string t, n, seed, out_dir, feedback, timing;
    std::string hidden_dim, layers, epochs, lr, init, init_scale, adam_reset;
    std::string scaling;
    std::string ar_p, arima_p, arima_d, arima_q, refit;
    std::string ekf_q_level, ekf_q_trend, ekf_r;
    std::string ekf_init_level, ekf_init_trend, ekf_p0;

    void register_options(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config file (key = value with [method] sections)");
        cmd->add_option("--preset", preset, "per-series defaults: apple, microsoft, google, bitcoin, ethereum, cardano, oil, natural_gas, gold");
        cmd->add_option("--series", series, "input CSV path");
        cmd->add_option("--value-column", value_column, "value column name or 0-based index");
        cmd->add_option("--timestamp-column", timestamp_column, "timestamp column name or index");
        cmd->add_option("--T", t, "training length");
        cmd->add_option("--N", n, "prediction length");
        cmd->add_option("--seed", seed, "run seed (required for LSTM runs)");
        cmd->add_option("--out-dir", out_dir, "output directory (default $SEQCAST_OUT_DIR or .)");
        cmd->add_option("--feedback", feedback, "window feedback: prediction|observation");
        cmd->add_option("--timing", timing, "include wall time in reports: on|off");
        cmd->add_option("--hidden-dim", hidden_dim, "LSTM hidden units");
        cmd->add_option("--K", layers, "LSTM stacked layers");
        cmd->add_option("--L", epochs, "LSTM epochs per iteration");
        cmd->add_option("--lr", lr, "ADAM learning rate");
        cmd->add_option("--init", init, "LSTM init: seeded|zero");
        cmd->add_option("--init-scale", init_scale, "seeded init range");
        cmd->add_option("--adam-reset", adam_reset, "off|per_iteration");
        cmd->add_option("--scaling", scaling, "min-max scaling for the selected method: on|off");
        cmd->add_option("--p", ar_p, "AR order (method ar)");
        cmd->add_option("--arima-p", arima_p, "ARIMA AR order");
        cmd->add_option("--arima-d", arima_d, "ARIMA differencing order");
        cmd->add_option("--arima-q", arima_q, "ARIMA MA order");
        cmd->add_option("--refit", refit, "baseline refit policy: every_step|once");
        cmd->add_option("--ekf-q-level", ekf_q_level, "EKF level process noise");
        cmd->add_option("--ekf-q-trend", ekf_q_trend, "EKF trend process noise");
        cmd->add_option("--ekf-r", ekf_r, "EKF measurement noise");
        cmd->add_option("--ekf-init-level", ekf_init_level, "EKF initial level override");
        cmd->add_option("--ekf-init-trend", ekf_init_trend, "EKF initial trend override");
        cmd->add_option("--ekf-p0", ekf_p0, "EKF initial covariance diagonal");
    }

    FlatConfig resolve(const std::optional<std::string>& method) const {
        FlatConfig flat;
        if (!config_path.empty()) flat = parse_config_file(config_path);
        const auto overlay = [&](const std::string& key, const std::string& v) {
            if (!v.empty()) flat[key] = v;
        };
        overlay("series", series);
        overlay("value_column", value_column);
        overlay("timestamp_column", timestamp_column);
        overlay("T", t);
        overlay("N", n);
        overlay("seed", seed);
        overlay("output_dir", out_dir);
        overlay("feedback", feedback);
        overlay("timing", timing);
        overlay("lstm.hidden_dim", hidden_dim);
        overlay("lstm.K", layers);
        overlay("lstm.L", epochs);
        overlay("lstm.lr", lr);
        overlay("lstm.init", init);
        overlay("lstm.init_scale", init_scale);
        overlay("lstm.adam_reset", adam_reset);
        overlay("ar.p", ar_p);
        overlay("arima.p", arima_p);
        overlay("arima.d", arima_d);
        overlay("arima.q", arima_q);
        if (!refit.empty()) {
            flat["ar.refit"] = refit;
            flat["arima.refit"] = refit;
        }
        overlay("ekf.q_level", ekf_q_level);
        overlay("ekf.q_trend", ekf_q_trend);
        overlay("ekf.r", ekf_r);
        overlay("ekf.init_level", ekf_init_level);
        overlay("ekf.init_trend", ekf_init_trend);
        overlay("ekf.p0", ekf_p0);
        if (method) {
            flat["method"] = *method;
            flat[*method + ".enabled"] = "on";
            if (!scaling.empty()) flat[*method + ".scaling"] = scaling;
        }
        if (!preset.empty()) {
            apply_preset(flat, preset);
        } else if (flat.count("preset")) {
            apply_preset(flat, flat["preset"]);
        }
        return flat;
    }
};

TimeSeries load_series(const RunConfig& cfg, std::vector<std::string>* warnings) {
    if (cfg.series_path.empty()) {
        throw ConfigError("no input series (--series or 'series' config key)");
    }
    return load_csv(cfg.series_path, cfg.value_column, cfg.timestamp_column,
                    warnings);
}

std::string report_path(const RunConfig& cfg, const std::string& method) {
    return cfg.output_dir + "/report_" + method + ".json";
}

void write_train_log(const LstmForecaster& forecaster, const std::string& path) {
    std::string out = "t,l,loss\n";
    const auto& iterations = forecaster.iteration_records();
    for (std::size_t t = 0; t < iterations.size(); ++t) {
        for (const EpochRecord& record : iterations[t]) {
            out += std::to_string(t + 1) + "," +
                   std::to_string(record.epoch_index) + "," +
                   format_double(record.loss) + "\n";
        }
    }
    write_file_atomic(path, out);
}

int run_forecast(const RunFlags& flags, const std::string& method,
                 const std::string& train_log, const std::string& save_params) {
    const FlatConfig flat = flags.resolve(method);
    RunConfig cfg = RunConfig::from_flat_map(flat);
    cfg.method = method;
    cfg.require_seed_for_lstm(method == "lstm");
    const FlatConfig echo = cfg.to_flat_map();
    print_resolved_config(echo);

    std::vector<std::string> warnings;
    const TimeSeries series = load_series(cfg, &warnings);

    std::vector<MethodConfig> methods = cfg.build_methods(method);
    MethodConfig& m = methods.front();
    const std::uint64_t method_seed =
        SeededRng(cfg.seed.value_or(0)).derive(m.label).seed();
    auto forecaster = m.factory(method_seed);

    RollingOptions rolling{cfg.train_len, cfg.horizon, m.scaling, cfg.feedback,
                           cfg.include_timing};
    RunReport report = rolling_forecast(*forecaster, series, rolling);
    report.config_echo = echo;
    for (const std::string& w : warnings) report.warnings.push_back(w);

    const std::string path = report_path(cfg, method);
    write_file_atomic(path, report_to_json(report));
    std::cout << "report written to " << path << "\n";
    if (report.metric_e) {
        std::cout << "metric_e(" << method << ") = " << *report.metric_e << "\n";
    }

    if (const auto* lstm = dynamic_cast<const LstmForecaster*>(forecaster.get())) {
        if (!train_log.empty()) {
            write_train_log(*lstm, train_log);
            std::cout << "training log written to " << train_log << "\n";
        }
        if (!save_params.empty()) {
            write_file_atomic(save_params, params_to_json(lstm->params()) + "\n");
            std::cout << "parameters written to " << save_params << "\n";
        }
    } else if (!train_log.empty() || !save_params.empty()) {
        std::cerr << "--train-log/--save-params only apply to the lstm method\n";
    }

    if (report.aborted) {
        std::cerr << "run aborted after repeated prediction failures\n";
        return 1;
    }
    return 0;
}

int run_compare(const RunFlags& flags, const std::string& methods_csv) {
    FlatConfig flat = flags.resolve(std::nullopt);
    if (!methods_csv.empty()) {
        std::stringstream ss(methods_csv);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (!item.empty()) flat[item + ".enabled"] = "on";
        }
    }
    RunConfig cfg = RunConfig::from_flat_map(flat);
    const std::vector<MethodConfig> methods = cfg.build_methods();
    const bool has_lstm =
        std::any_of(methods.begin(), methods.end(),
                    [](const MethodConfig& m) { return m.label == "lstm"; });
    cfg.require_seed_for_lstm(has_lstm);
    const FlatConfig echo = cfg.to_flat_map();
    print_resolved_config(echo);

    std::vector<std::string> warnings;
    const TimeSeries series = load_series(cfg, &warnings);

    std::vector<MethodConfig> configured = methods;
    for (MethodConfig& m : configured) m.config_echo = echo;

    CompareOptions options{cfg.train_len, cfg.horizon, cfg.feedback,
                           cfg.seed.value_or(0), cfg.include_timing};
    std::vector<RunReport> reports = compare_methods(series, configured, options);
    for (RunReport& r : reports) {
        for (const std::string& w : warnings) r.warnings.push_back(w);
    }

    write_file_atomic(cfg.output_dir + "/compare.json", reports_to_json(reports));
    int succeeded = 0;
    std::cout << "\nmethod      metric_e\n";
    for (const RunReport& r : reports) {
        write_file_atomic(report_path(cfg, r.method), report_to_json(r));
        if (r.error) {
            std::cout << r.method << "  failed: " << *r.error << "\n";
        } else if (r.metric_e) {
            std::cout << r.method << "  " << format_double(*r.metric_e) << "\n";
            ++succeeded;
        } else {
            std::cout << r.method << "  no scored steps\n";
        }
    }
    std::cout << "reports written to " << cfg.output_dir << "\n";
    return succeeded > 0 ? 0 : 1;
}

int run_synth(const std::string& kind, std::size_t points, std::uint64_t seed,
              const std::string& out, double period, double amplitude,
              double offset, double noise, const std::string& alpha_csv,
              const std::string& beta_csv, double c, double sigma,
              std::size_t burn_in, double start, double drift) {
    TimeSeries series;
    if (kind == "sine") {
        series = synth_sine(SineSpec{points, period, amplitude, offset, noise},
                            seed);
    } else if (kind == "ar") {
        ArSynthSpec spec;
        spec.points = points;
        if (!alpha_csv.empty()) spec.alpha = parse_coeff_list(alpha_csv);
        spec.c = c;
        spec.sigma = sigma;
        spec.burn_in = burn_in;
        series = synth_ar(spec, seed);
    } else if (kind == "arma") {
        ArmaSynthSpec spec;
        spec.points = points;
        spec.alpha = alpha_csv.empty() ? std::vector<double>{0.6}
                                       : parse_coeff_list(alpha_csv);
        spec.beta = beta_csv.empty() ? std::vector<double>{0.3}
                                     : parse_coeff_list(beta_csv);
        spec.c = c;
        spec.sigma = sigma;
        spec.burn_in = burn_in;
        series = synth_arma(spec, seed);
    } else if (kind == "rw") {
        series = synth_random_walk(RandomWalkSpec{points, start, drift, sigma},
                                   seed);
    } else {
        throw ConfigError("synth: kind must be sine|ar|arma|rw");
    }
    std::cout << "synth kind=" << kind << " points=" << points
              << " seed=" << seed << "\n";
    write_file_atomic(out, series_to_csv(series));
    std::cout << "series written to " << out << "\n";
    return 0;
}

int run_gradcheck(int instances, std::uint64_t seed, double threshold) {
    std::cout << "gradcheck: instances=" << instances << " seed=" << seed
              << " threshold=" << threshold << "\n";
    const GradCheckResult result = run_gradient_check(instances, seed);
    std::cout << "max relative error = " << result.max_relative_error << "\n";
    if (result.max_relative_error >= threshold) {
        std::cerr << "gradcheck FAILED (>= " << threshold << ")\n";
        return 1;
    }
    std::cout << "gradcheck passed\n";
    return 0;
}

int run_emit_plot(const std::string& report_file, const std::string& out) {
    const RunReport report = report_from_json(read_file(report_file));
    write_file_atomic(out, plot_csv_from_report(report));
    std::cout << "plot data written to " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"seqcast: real-time one-step-ahead forecasting on financial time series"};
    app.require_subcommand(1);

    // forecast
    auto* forecast = app.add_subcommand("forecast", "run one method over a series");
    RunFlags forecast_flags;
    forecast_flags.register_options(forecast);
    std::string method, train_log, save_params;
    forecast->add_option("--method", method, "lstm|ekf|ar|arima|naive")
        ->required();
    forecast->add_option("--train-log", train_log, "per-epoch loss CSV (lstm)");
    forecast->add_option("--save-params", save_params, "final LSTM parameter snapshot path");

    // compare
    auto* compare = app.add_subcommand("compare", "run several methods and rank by metric");
    RunFlags compare_flags;
    compare_flags.register_options(compare);
    std::string methods_csv;
    compare->add_option("--methods", methods_csv, "comma list, e.g. lstm,ar,naive (default: config sections)");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a seeded synthetic series CSV");
    std::string kind = "sine", synth_out = "synth.csv";
    std::size_t points = 230, burn_in = 200;
    std::uint64_t synth_seed = 1;
    double period = 50.0, amplitude = 1.0, offset = 2.0, noise = 0.0;
    std::string alpha_csv, beta_csv;
    double c = 0.0, sigma = 1.0, start = 100.0, drift = 0.0;
    synth->add_option("--kind", kind, "sine|ar|arma|rw")->required();
    synth->add_option("--points", points, "series length");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--out", synth_out, "output CSV path");
    synth->add_option("--period", period, "sine period");
    synth->add_option("--amplitude", amplitude, "sine amplitude");
    synth->add_option("--offset", offset, "sine vertical offset");
    synth->add_option("--noise", noise, "sine additive noise sd");
    synth->add_option("--alpha", alpha_csv, "AR coefficients, comma separated");
    synth->add_option("--beta", beta_csv, "MA coefficients, comma separated");
    synth->add_option("--c", c, "AR/ARMA intercept");
    synth->add_option("--sigma", sigma, "innovation sd");
    synth->add_option("--burn-in", burn_in, "discarded warmup samples");
    synth->add_option("--start", start, "random walk start level");
    synth->add_option("--drift", drift, "random walk drift");

    // gradcheck
    auto* gradcheck = app.add_subcommand("gradcheck", "BPTT vs finite-difference oracle sweep");
    int gc_instances = 100;
    std::uint64_t gc_seed = 12345;
    double gc_threshold = 1e-4;
    gradcheck->add_option("--instances", gc_instances, "random instances");
    gradcheck->add_option("--seed", gc_seed, "sweep seed");
    gradcheck->add_option("--threshold", gc_threshold, "failure threshold on relative error");

    // emit-plot
    auto* emit_plot = app.add_subcommand("emit-plot", "report JSON -> plot CSV");
    std::string report_file, plot_out = "plot.csv";
    emit_plot->add_option("--report", report_file, "report JSON path")->required();
    emit_plot->add_option("--out", plot_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (forecast->parsed()) {
            return run_forecast(forecast_flags, method, train_log, save_params);
        }
        if (compare->parsed()) {
            return run_compare(compare_flags, methods_csv);
        }
        if (synth->parsed()) {
            return run_synth(kind, points, synth_seed, synth_out, period,
                             amplitude, offset, noise, alpha_csv, beta_csv, c,
                             sigma, burn_in, start, drift);
        }
        if (gradcheck->parsed()) {
            return run_gradcheck(gc_instances, gc_seed, gc_threshold);
        }
        if (emit_plot->parsed()) {
            return run_emit_plot(report_file, plot_out);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
