#pragma once

#include <limits>
#include <vector>

#include "ddlab/sim/ops.hpp"

namespace ddlab::noise {

using sim::KrausChanneld;
using sim::UnitaryGated;
using Superoperatord = sim::Superoperator<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Per-qubit decoherence and coherent couplings. Times in ns, rates in rad/ns.
// Infinite T1/T2 switch the corresponding process off.
struct QubitNoiseParams
{
  double t1 = kInfinity;
  double t2 = kInfinity;
  double static_z_rate = 0;
  double static_x_rate = 0;

  void validate() const;
  [[nodiscard]] double pure_dephasing_rate() const; // 1/T_phi = 1/T2 - 1/(2 T1)
};

// Disturbance of idle neighbours during one mid-circuit measurement. The kick
// and the extra dephasing accrue uniformly over the measurement duration.
struct McmNoiseSpec
{
  long duration_dt = 5600;
  double neighbor_z_kick = 0;          // rad per measurement
  double neighbor_extra_dephasing = 0; // Z-flip probability per measurement

  void validate() const;
};

struct PulseErrorSpec
{
  double over_rotation = 0; // fractional angle error
  double phase_error = 0;   // rad, shift of the drive axis

  void validate() const;
  [[nodiscard]] bool ideal() const { return over_rotation == 0 && phase_error == 0; }
};

struct NoiseModel
{
  std::vector<QubitNoiseParams> qubits; // per-qubit overrides; falls back to default_qubit
  QubitNoiseParams default_qubit;
  McmNoiseSpec mcm;
  PulseErrorSpec pulse;
  double dt_ns = 0.22;
  int trotter_slices = 8;

  void validate() const;
  [[nodiscard]] QubitNoiseParams const &params(int qubit) const;
  [[nodiscard]] static NoiseModel noiseless(double dt_ns = 0.22);
};

// Generator of single-qubit idle evolution: amplitude damping rate, pure
// dephasing rate, and coherent Hamiltonian (z Z + x X)/2.
struct IdleGenerator
{
  double damping_rate = 0;
  double dephasing_rate = 0;
  double z_rate = 0;
  double x_rate = 0;

  static IdleGenerator from(QubitNoiseParams const &p);
  [[nodiscard]] IdleGenerator with_mcm(McmNoiseSpec const &spec, double dt_ns) const;
  [[nodiscard]] bool commuting() const { return x_rate == 0; }
  [[nodiscard]] bool trivial() const { return damping_rate == 0 && dephasing_rate == 0 && z_rate == 0 && x_rate == 0; }
};

// 4x4 Liouville form (row-major vectorization) of the idle evolution over t_ns.
Eigen::Matrix4cd idle_liouville(IdleGenerator const &gen, double t_ns, int slices = 8);

KrausChanneld amplitude_damping(int qubit, double p);
KrausChanneld dephasing(int qubit, double p);
KrausChanneld measurement_channel(int qubit);

/// Idle channel over duration_dt cycles on `qubit`. Commuting generators are
/// combined exactly; a transverse coupling switches to first-order Trotter
/// slicing with `slices` slices.
KrausChanneld idle_channel(QubitNoiseParams const &params, long duration_dt, double dt_ns, int qubit = 0, int slices = 8);

/// Channel on one idle neighbour for a single mid-circuit measurement.
KrausChanneld mcm_channel(McmNoiseSpec const &spec, QubitNoiseParams const &params, double dt_ns, int qubit = 0, int slices = 8);

/// Applies pulse imperfections to a physical X-type pulse; gates without
/// pulse data (virtual Z, composite gates) pass through unchanged.
UnitaryGated noisy_gate(UnitaryGated g, PulseErrorSpec const &spec);

/// spam · exp(-t/T1) · exp(-t/T2)
double reference_decay(double t_ns, double t1, double t2, double spam = 1.0);

} // namespace ddlab::noise
