#pragma once

#include "seqcast/harness.hpp"

#include <string>
#include <vector>

namespace seqcast {

/**
 * Loads one series from a headered CSV file. Columns are selected by header
 * name, or by 0-based index when the selector is numeric and no header
 * matches it. Rows are sorted by timestamp when needed (with a warning);
 * duplicate timestamps, blank or unparseable values, and missing columns are
 * rejected with the offending line number where applicable.
 */
TimeSeries load_csv(const std::string& path, const std::string& value_column,
                    const std::string& timestamp_column = "",
                    std::vector<std::string>* warnings = nullptr);

/// Serializes a series as `t,value` CSV with a header row.
std::string series_to_csv(const TimeSeries& series);

/// Writes via a temp file + rename so interrupted runs never leave partial
/// output behind.
void write_file_atomic(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

} // namespace seqcast
