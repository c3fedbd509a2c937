#include "seqcast/csv.hpp"

#include "seqcast/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace seqcast {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& text, double& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

// Header name wins; a purely numeric selector that names no header is a
// 0-based column index.
std::size_t resolve_column(const std::vector<std::string>& header,
                           const std::string& selector, const char* role) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == selector) return i;
    }
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(selector.data(),
                                     selector.data() + selector.size(), index);
    if (ec == std::errc() && ptr == selector.data() + selector.size() &&
        index < header.size()) {
        return index;
    }
    throw CsvError(std::string("load_csv: no ") + role + " column '" +
                   selector + "' in header");
}

} // namespace

TimeSeries load_csv(const std::string& path, const std::string& value_column,
                    const std::string& timestamp_column,
                    std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) {
        throw CsvError("load_csv: cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw CsvError("load_csv: '" + path + "' is empty (header row required)");
    }
    std::vector<std::string> header = split_line(line);
    for (std::string& h : header) h = trim(h);

    const std::size_t value_idx = resolve_column(header, value_column, "value");
    const std::size_t ts_idx =
        timestamp_column.empty()
            ? (value_idx == 0 && header.size() > 1 ? 1 : 0)
            : resolve_column(header, timestamp_column, "timestamp");

    TimeSeries series;
    series.id = std::filesystem::path(path).stem().string() + ":" +
                header[value_idx];

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_line(line);
        if (fields.size() <= std::max(value_idx, ts_idx)) {
            throw CsvError("load_csv: line " + std::to_string(line_no) +
                           " has too few columns");
        }
        const std::string raw_value = trim(fields[value_idx]);
        double value = 0.0;
        if (raw_value.empty() || !parse_double(raw_value, value)) {
            throw CsvError("load_csv: line " + std::to_string(line_no) +
                           " has unparseable value '" + raw_value + "'");
        }
        if (!std::isfinite(value)) {
            throw CsvError("load_csv: line " + std::to_string(line_no) +
                           " has non-finite value");
        }
        series.timestamps.push_back(trim(fields[ts_idx]));
        series.values.push_back(value);
    }
    if (series.values.empty()) {
        throw CsvError("load_csv: '" + path + "' holds no data rows");
    }

    // sort by timestamp when needed, then reject duplicates
    std::vector<std::size_t> order(series.values.size());
    std::iota(order.begin(), order.end(), 0);
    const bool sorted = std::is_sorted(
        order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return timestamp_less(series.timestamps[a], series.timestamps[b]);
        });
    if (!sorted) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                             return timestamp_less(series.timestamps[a],
                                                   series.timestamps[b]);
                         });
        TimeSeries reordered;
        reordered.id = series.id;
        for (const std::size_t i : order) {
            reordered.timestamps.push_back(series.timestamps[i]);
            reordered.values.push_back(series.values[i]);
        }
        series = std::move(reordered);
        if (warnings) {
            warnings->push_back("rows were not sorted by timestamp; sorted on load");
        }
    }
    for (std::size_t i = 1; i < series.timestamps.size(); ++i) {
        if (series.timestamps[i] == series.timestamps[i - 1]) {
            throw CsvError("load_csv: duplicate timestamp '" +
                           series.timestamps[i] + "'");
        }
    }
    series.validate();
    return series;
}

std::string series_to_csv(const TimeSeries& series) {
    std::string out = "t,value\n";
    char buf[64];
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        const auto [ptr, ec] =
            std::to_chars(buf, buf + sizeof(buf), series.values[i]);
        out += series.timestamps[i];
        out += ',';
        out.append(buf, ptr);
        out += '\n';
    }
    return out;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    const fs::path temp = target.string() + ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw CsvError("write_file_atomic: cannot open '" + temp.string() +
                           "'");
        }
        out << contents;
        if (!out.flush()) {
            throw CsvError("write_file_atomic: write failed for '" +
                           temp.string() + "'");
        }
    }
    fs::rename(temp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CsvError("read_file: cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace seqcast
