#pragma once

#include <filesystem>
#include <string>

#include "ddlab/harness/experiments.hpp"

namespace ddlab::harness {

// Deterministic text renderings; these depend only on the rows, never on
// wall-clock data, so identical runs produce identical bytes.
std::string results_csv(ExperimentResult const &result);
std::string params_csv(ExperimentResult const &result);
std::string scan_csv(ExperimentResult const &result);
std::string plot_svg(ExperimentResult const &result);
nlohmann::json meta_json(ExperimentResult const &result);

/// Writes results.csv, params.csv, meta.json and plot.svg (plus scan.csv and
/// spsa.json when present) into out_dir, creating it if needed.
void emit_results(ExperimentResult const &result, std::filesystem::path const &out_dir);

} // namespace ddlab::harness
