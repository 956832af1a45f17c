#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ddlab/cost/cost.hpp"
#include "ddlab/opt/stats.hpp"
#include "ddlab/seq/sequences.hpp"
#include "ddlab/sim/rng.hpp"

namespace ddlab::opt {

using seq::EulerAngles;
using cost::CostEstimate;

/// Objective over the three LDD angles. The stream is owned by the caller for
/// the duration of one evaluation and is the only source of shot noise.
using Objective = std::function<CostEstimate(EulerAngles const &, sim::RngStream &)>;

struct SpsaConfig
{
  int max_iterations = 100;
  double perturbation_c = 0.2;
  double alpha = 0.602;
  double gamma = 0.101;
  double stability_A = 0;
  int calibration_samples = 25;
  double target_first_step = 0.1; // rad per component
  std::optional<double> learning_rate = {}; // skips calibration when set

  void validate() const;
  [[nodiscard]] double perturbation(int k) const;           // c_k
  [[nodiscard]] double step(double a, int k) const;         // a_k
};

struct SpsaIteration
{
  int k = 0;
  EulerAngles params; // after the update
  double cost_plus = 0;
  double cost_minus = 0;
  double step_norm = 0;
};

struct SpsaTrace
{
  std::vector<SpsaIteration> iterations;
  EulerAngles initial_params;
  EulerAngles final_params;
  CostEstimate final_cost;
  double learning_rate = 0;
  long evaluations = 0;
  bool aborted = false;
  std::string diagnostic;
};

/// a = target_first_step · (A + 1)^α / mean |ĝ_i| over calibration_samples
/// two-sided estimates at x0; falls back to target_first_step when the mean
/// gradient magnitude is below 1e-12.
double calibrate_learning_rate(Objective const &objective, EulerAngles const &x0, SpsaConfig const &cfg, sim::RngStream &rng,
                               long *evaluations = nullptr);

/// x_{k+1} = x_k - a_k ĝ_k with Rademacher perturbations. Uses exactly
/// 2·max_iterations + 2·calibration_samples objective calls (no calibration
/// calls when cfg.learning_rate is set). final_cost summarizes the two
/// evaluations of the last iteration; no extra call is spent on it.
SpsaTrace spsa_minimize(Objective const &objective, EulerAngles const &x0, SpsaConfig const &cfg, sim::RngStream &rng);

/// x + Δ with Δ = ε δ/‖δ‖, δ uniform in [-2π, 2π]^3.
EulerAngles perturb_params(EulerAngles const &x, double epsilon, sim::RngStream &rng);

using FidelityFn = std::function<double(EulerAngles const &, sim::RngStream &)>;

struct RobustnessRow
{
  double epsilon = 0;
  Quartiles fidelity;
  std::vector<double> samples;
};

/// Sample s at every ε is evaluated on the same evaluation stream
/// rng.split({0, s}), so the ε = 0 row reproduces the unperturbed reference
/// evaluations exactly; perturbation directions come from rng.split({1, e, s}).
std::vector<RobustnessRow> robustness_sweep(FidelityFn const &fidelity, EulerAngles const &optimum, std::vector<double> const &epsilons,
                                            int samples_per_eps, sim::RngStream const &rng);

inline constexpr int kDefaultRobustnessSamples = 10;

} // namespace ddlab::opt
