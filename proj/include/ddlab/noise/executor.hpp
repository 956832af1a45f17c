#pragma once

#include "ddlab/noise/noise.hpp"
#include "ddlab/seq/sequences.hpp"

namespace ddlab::noise {

struct ExecutionOptions
{
  bool pulse_errors = true; // apply NoiseModel::pulse to physical X-type pulses
};

/// Noisy evolution of a timed schedule. Every qubit idles under its
/// IdleGenerator whenever time passes (including during its own gates, which
/// act instantaneously at their start); measurements disturb the qubits they
/// list in `disturbs` for their whole duration. Consecutive single-qubit
/// evolution is accumulated per qubit and applied lazily, which is exact
/// because operations on distinct qubits commute.
sim::DensityMatrixd execute(seq::TimedSchedule const &schedule, NoiseModel const &model, sim::DensityMatrixd const &initial,
                            ExecutionOptions const &opts = {});

sim::DensityMatrixd execute(seq::TimedSchedule const &schedule, NoiseModel const &model, ExecutionOptions const &opts = {});

} // namespace ddlab::noise
