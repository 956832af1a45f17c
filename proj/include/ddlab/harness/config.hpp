#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ddlab/noise/noise.hpp"
#include "ddlab/opt/spsa.hpp"
#include "ddlab/seq/sequences.hpp"

namespace ddlab::harness {

enum class ExperimentKind { Mcm, Deep, Scan, Robustness };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment(std::string_view name);

// One candidate measured qubit of the noisy-MCM scan; missing fields inherit
// from the base noise model.
struct ScanCandidate
{
  int label = 0;
  noise::McmNoiseSpec mcm;
  std::optional<noise::QubitNoiseParams> neighbor_params = {};
};

struct ExperimentConfig
{
  ExperimentKind experiment = ExperimentKind::Mcm;
  noise::NoiseModel noise;
  seq::GateDurations durations;
  long shots = 400;
  bool exact = false;
  std::vector<int> r_values{1, 3, 5, 7, 9, 11, 13, 15};
  std::vector<int> chain_lengths{0, 1, 2, 3, 4, 5, 6, 7, 8}; // intermediate qubits
  std::vector<seq::DDKind> sequences{seq::DDKind::None, seq::DDKind::Delay, seq::DDKind::CPMG,
                                     seq::DDKind::XY4,  seq::DDKind::UR6,   seq::DDKind::LDD};
  std::map<seq::DDKind, int> repetitions{{seq::DDKind::CPMG, 2}, {seq::DDKind::XY4, 2}, {seq::DDKind::UR6, 1}, {seq::DDKind::LDD, 1}};
  int ldd_n_gates = 4;
  int replicas = 10;
  std::uint64_t seed = 0;
  opt::SpsaConfig spsa;
  int robustness_r = 1;
  std::vector<double> epsilons{0.0, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6};
  int samples_per_eps = opt::kDefaultRobustnessSamples;
  double spam = 0.987;
  std::vector<ScanCandidate> candidates;

  void validate() const;
  [[nodiscard]] seq::DDSequenceSpec sequence_spec(seq::DDKind kind, seq::EulerAngles const &ldd = {}) const;

  static ExperimentConfig defaults(ExperimentKind kind);
};

ExperimentConfig parse_config(nlohmann::json const &doc);
ExperimentConfig load_config(std::string const &path);
nlohmann::json to_json(ExperimentConfig const &cfg);

// FNV-1a over the canonical JSON dump.
std::string config_hash(ExperimentConfig const &cfg);

} // namespace ddlab::harness
