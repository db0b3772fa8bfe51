#pragma once

// Machine-readable check reports and the output mapping file.

#include "hedcheck/sec.hpp"

#include <map>
#include <string>

namespace hedcheck {

inline constexpr const char* kReportSchema = "hedcheck-report/1";

struct ReportContext {
    std::string spec_path;
    std::string impl_path;
    SecConfig config;
    double elapsed_ms = 0;
};

// Pretty-printed JSON, keys in a fixed order. Only elapsedMs varies between
// runs with the same inputs.
std::string report_json(const Verdict& v, const ReportContext& ctx);

// Two whitespace-separated columns per line: spec output, impl output.
// Blank lines and lines starting with '#' are skipped.
std::map<std::string, std::string> parse_output_map(const std::string& text);
std::map<std::string, std::string> load_output_map(const std::string& path);

} // namespace hedcheck
