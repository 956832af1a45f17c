#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ddlab/cost/cost.hpp"
#include "ddlab/harness/config.hpp"

namespace ddlab::harness {

inline constexpr char const *kToolVersion = "0.1.0";

struct ResultRow
{
  std::string sequence; // DD kind name, or a reference curve ("ref_t1", ...)
  double sweep_value = 0;
  opt::Quartiles fidelity;
  std::optional<seq::EulerAngles> learned = {};
  double wall_time_s = 0;
};

// One line of the noisy-MCM scan, ranked by gap = F_delay - F_mcm.
struct ScanRow
{
  int rank = 0;
  int label = 0;
  double fidelity_mcm = 0;
  double fidelity_delay = 0;
  double gap = 0;
  bool flagged = false;
};

struct ExperimentResult
{
  ExperimentKind kind = ExperimentKind::Mcm;
  std::string sweep_name; // "r", "intermediate_qubits", "candidate", "epsilon"
  std::vector<ResultRow> rows;
  std::vector<ScanRow> scan;
  std::vector<std::pair<double, opt::SpsaTrace>> traces; // per sweep value
  std::vector<std::string> diagnostics;
  ExperimentConfig config;
  std::string config_hash;
  std::string tool_version = kToolVersion;
};

/// Bell pair on (q0, q2) with r mid-circuit measurements on q1 in between.
/// The circuit is H, CX, barrier, then r measurements (or equal delays for
/// the Delay baseline), then a closing barrier.
seq::Circuit mcm_circuit(int r, long mcm_dt, seq::GateDurations const &dur, bool measure);

/// Bell pair between q0 and q_{i+1} via H, CX and two CX per hop.
seq::Circuit deep_circuit(int intermediate, seq::GateDurations const &dur);

ExperimentResult run_mcm_experiment(ExperimentConfig const &cfg);
ExperimentResult run_deep_circuit_experiment(ExperimentConfig const &cfg);
ExperimentResult run_noisy_mcm_scan(ExperimentConfig const &cfg);
ExperimentResult run_robustness_study(ExperimentConfig const &cfg);
ExperimentResult run_experiment(ExperimentConfig const &cfg);

nlohmann::json to_json(opt::SpsaTrace const &trace);

} // namespace ddlab::harness
