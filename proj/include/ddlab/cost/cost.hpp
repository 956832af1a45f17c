#pragma once

#include "ddlab/sim/ops.hpp"

namespace ddlab::cost {

inline constexpr long kDefaultShots = 400;

struct CostEstimate
{
  double value = 0;
  long shots_per_correlator = 0; // 0 marks an exact evaluation
  double std_error = 0;

  [[nodiscard]] bool exact() const { return shots_per_correlator == 0; }
  [[nodiscard]] double fidelity() const { return 1.0 - value; }
};

struct Correlators
{
  double xx = 0;
  double yy = 0;
  double zz = 0;
};

// 1 - (1 + <XX> - <YY> + <ZZ>) / 4
inline double bell_cost_from(Correlators const &c) { return 1.0 - 0.25 * (1.0 + c.xx - c.yy + c.zz); }

Correlators exact_correlators(sim::DensityMatrixd const &rho, int i, int j);

/// Bell-state fidelity error on qubits (i, j) from exact correlators.
CostEstimate bell_cost_exact(sim::DensityMatrixd const &rho, int i, int j);

/// Finite-shot version: each correlator is measured in its own basis
/// (noiseless basis change) with `shots` shots on an independent substream of
/// `rng`. The noisy circuit output is a deterministic density matrix here, so
/// the three correlator circuits share `rho`. Values outside [0, 1] caused by
/// shot noise are returned unclipped.
CostEstimate bell_cost_sampled(sim::DensityMatrixd const &rho, int i, int j, long shots, sim::RngStream &rng);

/// 1 - <ψ|ρ|ψ>.
CostEstimate general_fidelity_cost(sim::DensityMatrixd const &rho, sim::CVectord const &target);

} // namespace ddlab::cost
