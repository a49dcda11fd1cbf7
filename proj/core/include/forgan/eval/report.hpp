#pragma once

#include <filesystem>
#include <string>

#include "forgan/eval/evaluate.hpp"

namespace forgan::eval {

/// JSON document with metric summaries, counts, shared edges, P/Q counts and per-cluster
/// sub-reports. An undefined KLD is written as the string "undefined".
std::string report_to_json(const EvaluationReport& report);
void write_report(const EvaluationReport& report, const std::filesystem::path& path);

/// Overlay table: edge_low,edge_high,p_mass,q_mass (one row per bin).
void write_histogram_csv(const Histogram& truth, const Histogram& predicted, const std::filesystem::path& path);

}  // namespace forgan::eval
