#include "ddlab/opt/spsa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ddlab::opt {

double quantile(std::span<double const> values, double q)
{
  if (values.empty()) throw ValidationError("quantile of empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  double const pos = q * static_cast<double>(v.size() - 1);
  auto const lo = static_cast<std::size_t>(std::floor(pos));
  auto const hi = std::min(lo + 1, v.size() - 1);
  double const frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

Quartiles quartiles(std::span<double const> values) { return {quantile(values, 0.25), quantile(values, 0.5), quantile(values, 0.75)}; }

void SpsaConfig::validate() const
{
  if (max_iterations < 1) throw ValidationError("max_iterations must be positive");
  if (!(perturbation_c > 0)) throw ValidationError("perturbation must be positive");
  if (!(0 < gamma && gamma < alpha && alpha <= 1)) throw ValidationError("SPSA exponents must satisfy 0 < gamma < alpha <= 1");
  if (!(stability_A >= 0)) throw ValidationError("stability constant must be non-negative");
  if (calibration_samples < 1) throw ValidationError("calibration_samples must be positive");
  if (!(target_first_step > 0)) throw ValidationError("target_first_step must be positive");
  if (learning_rate && !(*learning_rate > 0)) throw ValidationError("learning rate must be positive");
}

double SpsaConfig::perturbation(int k) const { return perturbation_c / std::pow(k + 1.0, gamma); }

double SpsaConfig::step(double a, int k) const { return a / std::pow(k + 1.0 + stability_A, alpha); }

namespace {

Eigen::Vector3d rademacher(sim::RngStream &rng) { return {double(rng.rademacher()), double(rng.rademacher()), double(rng.rademacher())}; }

struct TwoSided
{
  double plus;
  double minus;
  CostEstimate plus_estimate;
  CostEstimate minus_estimate;
};

TwoSided evaluate_pair(Objective const &objective, Eigen::Vector3d const &x, Eigen::Vector3d const &delta, double c, sim::RngStream const &stream)
{
  auto s_plus = stream.split(0);
  auto s_minus = stream.split(1);
  auto const p = objective(EulerAngles::from(x + c * delta), s_plus);
  auto const m = objective(EulerAngles::from(x - c * delta), s_minus);
  return {p.value, m.value, p, m};
}

} // namespace

double calibrate_learning_rate(Objective const &objective, EulerAngles const &x0, SpsaConfig const &cfg, sim::RngStream &rng, long *evaluations)
{
  cfg.validate();
  double const c0 = cfg.perturbation(0);
  auto const streams = rng.fork();
  double magnitude = 0;
  for (int s = 0; s < cfg.calibration_samples; ++s) {
    Eigen::Vector3d const delta = rademacher(rng);
    auto const pair = evaluate_pair(objective, x0.vec(), delta, c0, streams.split(static_cast<std::uint64_t>(s)));
    if (evaluations) *evaluations += 2;
    // Every component of a Rademacher estimate has the same magnitude.
    magnitude += std::abs(pair.plus - pair.minus) / (2 * c0);
  }
  magnitude /= cfg.calibration_samples;
  if (!std::isfinite(magnitude)) throw ValidationError("non-finite objective during calibration");
  if (magnitude < 1e-12) return cfg.target_first_step;
  return cfg.target_first_step * std::pow(cfg.stability_A + 1.0, cfg.alpha) / magnitude;
}

SpsaTrace spsa_minimize(Objective const &objective, EulerAngles const &x0, SpsaConfig const &cfg, sim::RngStream &rng)
{
  cfg.validate();
  x0.validate();
  SpsaTrace trace;
  trace.initial_params = x0;
  trace.final_params = x0;
  trace.learning_rate = cfg.learning_rate ? *cfg.learning_rate : calibrate_learning_rate(objective, x0, cfg, rng, &trace.evaluations);

  auto const streams = rng.fork();
  Eigen::Vector3d x = x0.vec();
  for (int k = 0; k < cfg.max_iterations; ++k) {
    double const ck = cfg.perturbation(k);
    double const ak = cfg.step(trace.learning_rate, k);
    Eigen::Vector3d const delta = rademacher(rng);
    auto const pair = evaluate_pair(objective, x, delta, ck, streams.split(static_cast<std::uint64_t>(k)));
    trace.evaluations += 2;
    if (!std::isfinite(pair.plus) || !std::isfinite(pair.minus)) {
      trace.aborted = true;
      trace.diagnostic = "non-finite objective value at iteration " + std::to_string(k);
      break;
    }
    // Δ_i = ±1, so Δ_i^{-1} = Δ_i.
    Eigen::Vector3d const gradient = (pair.plus - pair.minus) / (2 * ck) * delta;
    Eigen::Vector3d const update = ak * gradient;
    x -= update;
    trace.iterations.push_back({k, EulerAngles::from(x), pair.plus, pair.minus, update.norm()});
    trace.final_params = EulerAngles::from(x);
    double const se = 0.5 * std::hypot(pair.plus_estimate.std_error, pair.minus_estimate.std_error);
    trace.final_cost = {0.5 * (pair.plus + pair.minus), pair.plus_estimate.shots_per_correlator, se};
  }
  return trace;
}

EulerAngles perturb_params(EulerAngles const &x, double epsilon, sim::RngStream &rng)
{
  if (!(epsilon >= 0)) throw ValidationError("perturbation strength must be non-negative");
  constexpr double span = 2 * std::numbers::pi;
  Eigen::Vector3d delta;
  do {
    delta = {rng.uniform(-span, span), rng.uniform(-span, span), rng.uniform(-span, span)};
  } while (delta.norm() == 0);
  return EulerAngles::from(x.vec() + epsilon * delta / delta.norm());
}

std::vector<RobustnessRow> robustness_sweep(FidelityFn const &fidelity, EulerAngles const &optimum, std::vector<double> const &epsilons,
                                            int samples_per_eps, sim::RngStream const &rng)
{
  if (samples_per_eps < 1) throw ValidationError("samples_per_eps must be positive");
  if (epsilons.empty() || epsilons.front() != 0.0) throw ValidationError("epsilon grid must start at 0");
  if (!std::is_sorted(epsilons.begin(), epsilons.end())) throw ValidationError("epsilon grid must be ascending");
  std::vector<RobustnessRow> rows;
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    RobustnessRow row;
    row.epsilon = epsilons[e];
    for (int s = 0; s < samples_per_eps; ++s) {
      auto direction = rng.split({1, e, static_cast<std::uint64_t>(s)});
      auto eval = rng.split({0, static_cast<std::uint64_t>(s)});
      auto const x = epsilons[e] == 0.0 ? optimum : perturb_params(optimum, epsilons[e], direction);
      row.samples.push_back(fidelity(x, eval));
    }
    row.fidelity = quartiles(row.samples);
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace ddlab::opt
