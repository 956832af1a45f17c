#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ddlab/sim/gates.hpp"

namespace ddlab::seq {

using sim::UnitaryGated;

/// R(θ, φ, λ) = exp(-iθZ/2) exp(-iφY/2) exp(-iλZ/2). Angles are unbounded.
struct EulerAngles
{
  double theta = 0;
  double phi = 0;
  double lambda = 0;

  [[nodiscard]] Eigen::Vector3d vec() const { return {theta, phi, lambda}; }
  static EulerAngles from(Eigen::Vector3d const &v) { return {v(0), v(1), v(2)}; }
  [[nodiscard]] EulerAngles inverse() const { return {-lambda, -phi, -theta}; }
  [[nodiscard]] sim::CMatrixd matrix() const;
  void validate() const;

  friend bool operator==(EulerAngles const &, EulerAngles const &) = default;
};

enum class DDKind { None, Delay, CPMG, XY4, UR6, LDD };

std::string_view to_string(DDKind kind);
DDKind parse_kind(std::string_view name);

struct DDSequenceSpec
{
  DDKind kind = DDKind::None;
  int repetitions = 1;
  std::optional<EulerAngles> ldd_params = {};
  int n_gates = 4;

  void validate() const;
  [[nodiscard]] bool fills_windows() const { return kind != DDKind::None && kind != DDKind::Delay; }
};

// Cycle-time durations. Virtual Z rotations always take zero time.
struct GateDurations
{
  long x_dt = 256;
  long sx_dt = 256;
  long h_dt = 256;
  long cx_dt = 2400;
  double dt_ns = 0.22;

  void validate() const;
};

inline constexpr long kVirtualZDuration = 0;

struct Instruction
{
  enum class Kind { Gate, Delay, Measure, Barrier };

  Kind kind = Kind::Gate;
  sim::Targets qubits;
  long duration_dt = 0;
  std::string label;
  std::optional<UnitaryGated> gate = {};
  sim::Targets disturbs = {}; // idle neighbours affected by a measurement

  static Instruction from_gate(UnitaryGated g);
  static Instruction delay(int qubit, long duration_dt);
  static Instruction measure(int qubit, long duration_dt, sim::Targets disturbs = {});
  static Instruction barrier(sim::Targets qubits);

  [[nodiscard]] bool is_physical_pulse() const { return gate && gate->pulse.has_value(); }
  [[nodiscard]] bool is_virtual_z() const { return kind == Kind::Gate && label == "rz" && duration_dt == 0; }
};

using Circuit = std::vector<Instruction>;

struct TimedInstruction
{
  Instruction instr;
  long start_dt = 0;

  [[nodiscard]] long end_dt() const { return start_dt + instr.duration_dt; }
};

struct IdleWindow
{
  int qubit = 0;
  long start_dt = 0;
  long length_dt = 0;

  friend bool operator==(IdleWindow const &, IdleWindow const &) = default;
};

/// Instructions with integer start times. `ops` is kept sorted by start time
/// (stable, so zero-duration gates keep their emission order).
struct TimedSchedule
{
  int n_qubits = 0;
  long total_dt = 0;
  std::vector<TimedInstruction> ops;

  [[nodiscard]] std::vector<TimedInstruction> lane(int qubit) const;
  void validate() const;
};

/// Single-qubit instruction sequence laid out back to back from time 0.
struct Layout
{
  std::vector<Instruction> items;

  [[nodiscard]] long length_dt() const;
  [[nodiscard]] std::vector<long> delays() const;
  [[nodiscard]] int physical_pulses() const;
  [[nodiscard]] int virtual_gates() const;
};

Layout build_cpmg(long window_dt, GateDurations const &dur, int reps = 1, int qubit = 0);
Layout build_xy4(long window_dt, GateDurations const &dur, int reps = 1, int qubit = 0);
Layout build_ur6(long window_dt, GateDurations const &dur, int reps = 1, int qubit = 0);
Layout build_ldd(long window_dt, GateDurations const &dur, EulerAngles const &params, int reps = 1, int n_gates = 4, int qubit = 0);
Layout build_layout(DDSequenceSpec const &spec, long window_dt, GateDurations const &dur, int qubit = 0);

/// Native realization [Rz, √X, Rz, √X, Rz] (time order) of R(θ, φ, λ).
std::vector<UnitaryGated> euler_to_native(EulerAngles const &params, GateDurations const &dur, int qubit = 0);

/// Phased X: Rz(-2π/3) · X · Rz(2π/3), emitted as [rz, x, rz] in time order.
std::vector<UnitaryGated> phased_x(GateDurations const &dur, int qubit = 0);

// Product of a time-ordered single-qubit gate list (later gates on the left).
sim::CMatrixd compose_unitary(std::vector<UnitaryGated> const &gates);
sim::CMatrixd compose_unitary(Layout const &layout);

struct ScheduledCircuit
{
  TimedSchedule schedule;
  std::vector<IdleWindow> windows;
};

/// As-late-as-possible schedule of `circuit`. Windows are the maximal gaps on
/// each qubit after its first instruction, including the gap up to the end of
/// the schedule. Barriers synchronize but never split a window.
ScheduledCircuit alap_schedule(Circuit const &circuit, int n_qubits);

/// Replaces each window with the layout for `spec`. Windows too short for the
/// sequence stay idle and get a line in `diagnostics`.
TimedSchedule insert_dd(TimedSchedule const &schedule, std::vector<IdleWindow> const &windows, DDSequenceSpec const &spec,
                        GateDurations const &dur, std::vector<std::string> *diagnostics = nullptr);

/// Line-oriented timeline: "q<qubit> <start_dt> <duration_dt> <label>", ordered
/// by qubit, then start time, then emission order.
std::string to_timeline(TimedSchedule const &schedule);

} // namespace ddlab::seq
