#include "ddlab/noise/noise.hpp"

#include <cmath>

namespace ddlab::noise {

namespace {

double inverse(double t) { return std::isinf(t) ? 0.0 : 1.0 / t; }

Eigen::Matrix4cd liouville(sim::CMatrixd const &k) { return sim::gates::kron<double>(k, k.conjugate()); }

Eigen::Matrix4cd damping_liouville(double p)
{
  sim::CMatrixd k0 = sim::CMatrixd::Zero(2, 2), k1 = sim::CMatrixd::Zero(2, 2);
  k0(0, 0) = 1;
  k0(1, 1) = std::sqrt(1 - p);
  k1(0, 1) = std::sqrt(p);
  return liouville(k0) + liouville(k1);
}

Eigen::Matrix4cd dephasing_liouville(double p)
{
  return (1 - p) * liouville(sim::gates::identity()) + p * liouville(sim::gates::pauli('Z'));
}

sim::CMatrixd coherent_unitary(double z_rate, double x_rate, double t_ns)
{
  sim::CMatrixd h = 0.5 * (z_rate * sim::gates::pauli('Z') + x_rate * sim::gates::pauli('X'));
  return sim::gates::expm_hermitian<double>(h, t_ns);
}

double damping_probability(double rate, double t_ns) { return -std::expm1(-rate * t_ns); }

// Z-flip probability p with coherence factor 1 - 2p = exp(-rate t).
double dephasing_probability(double rate, double t_ns) { return 0.5 * damping_probability(rate, t_ns); }

Eigen::Matrix4cd step_liouville(IdleGenerator const &gen, double t_ns)
{
  return damping_liouville(damping_probability(gen.damping_rate, t_ns)) * dephasing_liouville(dephasing_probability(gen.dephasing_rate, t_ns))
    * liouville(coherent_unitary(gen.z_rate, gen.x_rate, t_ns));
}

} // namespace

void QubitNoiseParams::validate() const
{
  if (!(t1 > 0) || !(t2 > 0)) throw ValidationError("T1 and T2 must be positive");
  if (t2 > 2 * t1) throw PhysicalityError("T2 exceeds 2*T1");
  if (!std::isfinite(static_z_rate) || !std::isfinite(static_x_rate)) throw ValidationError("coupling rates must be finite");
}

double QubitNoiseParams::pure_dephasing_rate() const { return std::max(0.0, inverse(t2) - 0.5 * inverse(t1)); }

void McmNoiseSpec::validate() const
{
  if (duration_dt <= 0) throw ValidationError("MCM duration must be positive");
  if (!std::isfinite(neighbor_z_kick)) throw ValidationError("MCM kick must be finite");
  if (!(neighbor_extra_dephasing >= 0 && neighbor_extra_dephasing < 0.5))
    throw ValidationError("MCM extra dephasing must lie in [0, 0.5)");
}

void PulseErrorSpec::validate() const
{
  if (!(std::abs(over_rotation) < 1)) throw ValidationError("|over_rotation| must be < 1");
  if (!std::isfinite(phase_error)) throw ValidationError("phase error must be finite");
}

void NoiseModel::validate() const
{
  if (!(dt_ns > 0)) throw ValidationError("dt_ns must be positive");
  if (trotter_slices < 1) throw ValidationError("trotter_slices must be positive");
  default_qubit.validate();
  for (auto const &q : qubits) q.validate();
  mcm.validate();
  pulse.validate();
}

QubitNoiseParams const &NoiseModel::params(int qubit) const
{
  if (qubit >= 0 && static_cast<std::size_t>(qubit) < qubits.size()) return qubits[static_cast<std::size_t>(qubit)];
  return default_qubit;
}

NoiseModel NoiseModel::noiseless(double dt_ns)
{
  NoiseModel m;
  m.dt_ns = dt_ns;
  return m;
}

IdleGenerator IdleGenerator::from(QubitNoiseParams const &p)
{
  p.validate();
  return {inverse(p.t1), p.pure_dephasing_rate(), p.static_z_rate, p.static_x_rate};
}

IdleGenerator IdleGenerator::with_mcm(McmNoiseSpec const &spec, double dt_ns) const
{
  spec.validate();
  double const t = static_cast<double>(spec.duration_dt) * dt_ns;
  IdleGenerator g = *this;
  g.z_rate += spec.neighbor_z_kick / t;
  g.dephasing_rate += -std::log1p(-2 * spec.neighbor_extra_dephasing) / t;
  return g;
}

Eigen::Matrix4cd idle_liouville(IdleGenerator const &gen, double t_ns, int slices)
{
  if (t_ns <= 0 || gen.trivial()) return Eigen::Matrix4cd::Identity();
  if (gen.commuting()) return step_liouville(gen, t_ns);
  if (slices < 1) throw ValidationError("slice count must be positive");
  Eigen::Matrix4cd const step = step_liouville(gen, t_ns / slices);
  Eigen::Matrix4cd out = Eigen::Matrix4cd::Identity();
  for (int s = 0; s < slices; ++s) out = step * out;
  return out;
}

KrausChanneld amplitude_damping(int qubit, double p)
{
  if (!(p >= 0 && p <= 1)) throw ValidationError("damping probability outside [0, 1]");
  sim::CMatrixd k0 = sim::CMatrixd::Zero(2, 2), k1 = sim::CMatrixd::Zero(2, 2);
  k0(0, 0) = 1;
  k0(1, 1) = std::sqrt(1 - p);
  k1(0, 1) = std::sqrt(p);
  return {{qubit}, {k0, k1}, 0};
}

KrausChanneld dephasing(int qubit, double p)
{
  if (!(p >= 0 && p <= 1)) throw ValidationError("dephasing probability outside [0, 1]");
  return {{qubit}, {std::sqrt(1 - p) * sim::gates::identity(), std::sqrt(p) * sim::gates::pauli('Z')}, 0};
}

KrausChanneld measurement_channel(int qubit)
{
  sim::CMatrixd p0 = sim::CMatrixd::Zero(2, 2), p1 = sim::CMatrixd::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  return {{qubit}, {p0, p1}, 0};
}

namespace {

KrausChanneld channel_from_generator(IdleGenerator const &gen, long duration_dt, double dt_ns, int qubit, int slices)
{
  if (duration_dt < 0) throw ValidationError("duration must be non-negative");
  double const t = static_cast<double>(duration_dt) * dt_ns;
  if (duration_dt == 0 || gen.trivial()) return sim::identity_channel<double>({qubit}, duration_dt);
  if (gen.commuting()) {
    // Exact: all three processes commute with Z rotations.
    auto const u = coherent_unitary(gen.z_rate, 0, t);
    auto const ad = amplitude_damping(qubit, damping_probability(gen.damping_rate, t));
    auto const dp = dephasing(qubit, dephasing_probability(gen.dephasing_rate, t));
    KrausChanneld out{{qubit}, {}, duration_dt};
    for (auto const &a : ad.operators)
      for (auto const &d : dp.operators) {
        sim::CMatrixd k = a * d * u;
        if (k.cwiseAbs().maxCoeff() > 0) out.operators.push_back(std::move(k));
      }
    return out;
  }
  sim::Superoperator<double> s{{qubit}, idle_liouville(gen, t, slices)};
  return sim::to_kraus(s, duration_dt);
}

} // namespace

KrausChanneld idle_channel(QubitNoiseParams const &params, long duration_dt, double dt_ns, int qubit, int slices)
{
  if (!(dt_ns > 0)) throw ValidationError("dt_ns must be positive");
  return channel_from_generator(IdleGenerator::from(params), duration_dt, dt_ns, qubit, slices);
}

KrausChanneld mcm_channel(McmNoiseSpec const &spec, QubitNoiseParams const &params, double dt_ns, int qubit, int slices)
{
  if (!(dt_ns > 0)) throw ValidationError("dt_ns must be positive");
  return channel_from_generator(IdleGenerator::from(params).with_mcm(spec, dt_ns), spec.duration_dt, dt_ns, qubit, slices);
}

UnitaryGated noisy_gate(UnitaryGated g, PulseErrorSpec const &spec)
{
  if (!g.pulse || spec.ideal()) return g;
  g.pulse->angle *= 1 + spec.over_rotation;
  g.pulse->axis_phase += spec.phase_error;
  g.matrix = sim::gates::xy_rotation(g.pulse->angle, g.pulse->axis_phase);
  return g;
}

double reference_decay(double t_ns, double t1, double t2, double spam)
{
  if (t_ns < 0) throw ValidationError("time must be non-negative");
  return spam * std::exp(-t_ns * inverse(t1)) * std::exp(-t_ns * inverse(t2));
}

} // namespace ddlab::noise
