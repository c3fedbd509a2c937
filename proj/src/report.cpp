#include "seqcast/report.hpp"

#include "seqcast/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>

namespace seqcast {

namespace {

using Json = nlohmann::ordered_json;

Json record_to_json(const ForecastRecord& r) {
    Json j;
    j["t"] = r.time_index;
    j["predicted"] = r.predicted;
    j["observed"] = r.observed;
    j["relative_error"] = r.relative_error;
    return j;
}

Json report_to_json_value(const RunReport& report) {
    Json j;
    j["schema"] = "seqcast-report-v1";
    j["series_id"] = report.series_id;
    j["method"] = report.method;
    j["config"] = Json::object();
    for (const auto& [key, value] : report.config_echo) {
        j["config"][key] = value;
    }
    j["records"] = Json::array();
    for (const ForecastRecord& r : report.records) {
        j["records"].push_back(record_to_json(r));
    }
    if (report.metric_e) {
        j["metric_e"] = *report.metric_e;
    } else {
        j["metric_e"] = nullptr;
    }
    j["excluded_zero_observations"] = report.excluded_zero_observations;
    j["failures"] = Json::array();
    for (const StepFailure& f : report.failures) {
        j["failures"].push_back(Json{{"t", f.time_index}, {"message", f.message}});
    }
    j["aborted"] = report.aborted;
    j["warnings"] = report.warnings;
    if (report.wall_time_ms) {
        j["wall_time_ms"] = *report.wall_time_ms;
    } else {
        j["wall_time_ms"] = nullptr;
    }
    if (report.error) {
        j["error"] = *report.error;
    } else {
        j["error"] = nullptr;
    }
    return j;
}

RunReport report_from_json_value(const Json& j) {
    if (j.value("schema", "") != "seqcast-report-v1") {
        throw ConfigError("report_from_json: unknown schema");
    }
    RunReport report;
    report.series_id = j.at("series_id").get<std::string>();
    report.method = j.at("method").get<std::string>();
    for (const auto& [key, value] : j.at("config").items()) {
        report.config_echo[key] = value.get<std::string>();
    }
    for (const Json& r : j.at("records")) {
        report.records.push_back(ForecastRecord{
            r.at("t").get<long>(), r.at("predicted").get<double>(),
            r.at("observed").get<double>(),
            r.at("relative_error").get<double>()});
    }
    if (!j.at("metric_e").is_null()) {
        report.metric_e = j.at("metric_e").get<double>();
    }
    report.excluded_zero_observations =
        j.at("excluded_zero_observations").get<int>();
    for (const Json& f : j.at("failures")) {
        report.failures.push_back(StepFailure{
            f.at("t").get<long>(), f.at("message").get<std::string>()});
    }
    report.aborted = j.at("aborted").get<bool>();
    report.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (!j.at("wall_time_ms").is_null()) {
        report.wall_time_ms = j.at("wall_time_ms").get<double>();
    }
    if (!j.at("error").is_null()) {
        report.error = j.at("error").get<std::string>();
    }
    return report;
}

} // namespace

std::string report_to_json(const RunReport& report) {
    return report_to_json_value(report).dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
    return report_from_json_value(Json::parse(text));
}

std::string reports_to_json(const std::vector<RunReport>& reports) {
    Json arr = Json::array();
    for (const RunReport& r : reports) arr.push_back(report_to_json_value(r));
    return arr.dump(2) + "\n";
}

std::vector<RunReport> reports_from_json(const std::string& text) {
    const Json arr = Json::parse(text);
    std::vector<RunReport> reports;
    for (const Json& j : arr) reports.push_back(report_from_json_value(j));
    return reports;
}

std::string plot_csv_from_report(const RunReport& report) {
    std::string out = "t,observed,predicted,abs_diff\n";
    char buf[64];
    const auto append_double = [&](double v) {
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        out.append(buf, ptr);
    };
    for (const ForecastRecord& r : report.records) {
        out += std::to_string(r.time_index);
        out += ',';
        append_double(r.observed);
        out += ',';
        append_double(r.predicted);
        out += ',';
        append_double(std::abs(r.predicted - r.observed));
        out += '\n';
    }
    return out;
}

} // namespace seqcast
