#include "ddlab/cost/cost.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace ddlab::cost {

namespace {

sim::PauliObservable correlator(int n, int i, int j, char p)
{
  if (i == j) throw ValidationError("Bell cost needs two distinct qubits");
  if (i < 0 || j < 0 || i >= n || j >= n) throw ShapeError("Bell cost qubit outside register");
  std::string s(static_cast<std::size_t>(n), 'I');
  s[static_cast<std::size_t>(i)] = p;
  s[static_cast<std::size_t>(j)] = p;
  return sim::PauliObservable{s};
}

} // namespace

Correlators exact_correlators(sim::DensityMatrixd const &rho, int i, int j)
{
  int const n = rho.n_qubits();
  return {sim::expectation(rho, correlator(n, i, j, 'X')), sim::expectation(rho, correlator(n, i, j, 'Y')),
          sim::expectation(rho, correlator(n, i, j, 'Z'))};
}

CostEstimate bell_cost_exact(sim::DensityMatrixd const &rho, int i, int j)
{
  double const v = bell_cost_from(exact_correlators(rho, i, j));
  return {std::clamp(v, 0.0, 1.0), 0, 0.0};
}

CostEstimate bell_cost_sampled(sim::DensityMatrixd const &rho, int i, int j, long shots, sim::RngStream &rng)
{
  if (shots < 1) throw ValidationError("shots must be positive");
  int const n = rho.n_qubits();
  std::array<double, 3> est{};
  std::array<char, 3> const bases{'X', 'Y', 'Z'};
  double var_sum = 0;
  auto const base = rng.fork();
  for (std::size_t k = 0; k < 3; ++k) {
    auto sub = base.split(k);
    est[k] = sim::sample_expectation(rho, correlator(n, i, j, bases[k]), shots, sub);
    var_sum += 1.0 - est[k] * est[k];
  }
  Correlators const c{est[0], est[1], est[2]};
  return {bell_cost_from(c), shots, 0.25 * std::sqrt(var_sum / static_cast<double>(shots))};
}

CostEstimate general_fidelity_cost(sim::DensityMatrixd const &rho, sim::CVectord const &target)
{
  return {1.0 - sim::state_fidelity(rho, target), 0, 0.0};
}

} // namespace ddlab::cost
