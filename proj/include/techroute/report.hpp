#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "techroute/evaluation.hpp"

namespace techroute {

/// Files written by emit_report, relative to the output directory.
inline constexpr const char* kInstanceRowsFile = "instances.csv";
inline constexpr const char* kSummaryFile = "summary.json";
inline constexpr const char* kGridFile = "grid.csv";
inline constexpr const char* kCumulativeFile = "cumulative.csv";
inline constexpr const char* kRoutesFile = "routes.csv";

/// Writes per-instance rows, the summary document, the spatial grid, the
/// cumulative series and the route dumps. Every file names the config hashes
/// and seeds it was computed from. Throws IoError before writing anything if
/// the directory cannot be written.
void emit_report(const Evaluation& evaluation, const std::filesystem::path& out_dir);

/// The summary document as text (what emit_report writes to summary.json).
std::string summary_json(const Evaluation& evaluation);

}  // namespace techroute
