#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "modlab/harness/sweeps.hpp"

namespace modlab::harness {

/// Writes into dir (created if needed):
///   config.txt                   canonical echo of the configuration, seed included
///   <label>_summary.csv          one row per eps (per dt for energy runs)
///   <label>_frames.csv           recorded time series
///   <label>_checks.csv           verify-ops checks
///   <label>_<quantity>.svg       log-log plot per fitted quantity
///   summary.txt                  fits and verdicts
///   manifest.txt                 inputs, seed, series and SHA-256 of every file above
/// Contents depend only on the result, never on wall-clock time. Throws std::runtime_error
/// naming the path on I/O failure.
void emit_report(const SweepResult& result, const std::filesystem::path& dir);

/// Rebuilds a result from a report directory (config.txt, manifest.txt and the CSVs) and
/// re-evaluates fits and verdicts from the stored series.
SweepResult load_report(const std::filesystem::path& dir);

/// Text of summary.txt.
std::string summary_text(const SweepResult& result);

/// Log-log SVG of values against eps with the fitted line and reference slopes 0.5 and 1.
std::string loglog_svg(const std::string& title, const RateFit& fit);

std::string csv_text(const Table& table);
Table parse_csv_table(const std::string& text);
std::string checks_csv_text(const std::vector<Check>& checks);
std::vector<Check> parse_checks_csv(const std::string& text);

std::string sha256_hex(const std::string& bytes);

/// Labels of verdicts that did not pass, as "<series>: <verdict> (<status>)".
std::vector<std::string> failing_verdicts(const SweepResult& result);

}  // namespace modlab::harness
