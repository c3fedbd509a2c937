#pragma once

#include "seqcast/harness.hpp"

#include <string>
#include <vector>

namespace seqcast {

/**
 * Report JSON schema (seqcast-report-v1): series id, method, config echo,
 * per-step records, metric, exclusion/failure bookkeeping, and timing
 * (null unless requested, so default reports are byte-stable for a given
 * seed and config).
 */
std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& text);

std::string reports_to_json(const std::vector<RunReport>& reports);
std::vector<RunReport> reports_from_json(const std::string& text);

/// Plot data: one `t,observed,predicted,abs_diff` line per recorded step.
std::string plot_csv_from_report(const RunReport& report);

} // namespace seqcast
