#include "ddlab/seq/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ddlab::seq {

namespace gates = sim::gates;
using std::numbers::pi;

sim::CMatrixd EulerAngles::matrix() const { return gates::rz(theta) * gates::ry(phi) * gates::rz(lambda); }

void EulerAngles::validate() const
{
  if (!std::isfinite(theta) || !std::isfinite(phi) || !std::isfinite(lambda)) throw ValidationError("Euler angles must be finite");
}

std::string_view to_string(DDKind kind)
{
  switch (kind) {
  case DDKind::None: return "none";
  case DDKind::Delay: return "delay";
  case DDKind::CPMG: return "cpmg";
  case DDKind::XY4: return "xy4";
  case DDKind::UR6: return "ur6";
  case DDKind::LDD: return "ldd";
  }
  return "?";
}

DDKind parse_kind(std::string_view name)
{
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto k : {DDKind::None, DDKind::Delay, DDKind::CPMG, DDKind::XY4, DDKind::UR6, DDKind::LDD})
    if (to_string(k) == lower) return k;
  throw ValidationError("unknown sequence kind '" + std::string(name) + "'");
}

void DDSequenceSpec::validate() const
{
  if (repetitions < 1) throw ValidationError("repetitions must be positive");
  if (kind == DDKind::LDD) {
    if (!ldd_params) throw ValidationError("LDD sequence requires parameters");
    ldd_params->validate();
    if (n_gates < 2 || n_gates % 2 != 0) throw ValidationError("LDD gate count must be even and positive");
  }
}

void GateDurations::validate() const
{
  if (x_dt <= 0 || sx_dt <= 0 || h_dt < 0 || cx_dt < 0) throw ValidationError("gate durations must be positive");
  if (!(dt_ns > 0)) throw ValidationError("dt_ns must be positive");
}

Instruction Instruction::from_gate(UnitaryGated g)
{
  Instruction i;
  i.kind = Kind::Gate;
  i.qubits = g.targets;
  i.duration_dt = g.duration_dt;
  i.label = g.label;
  i.gate = std::move(g);
  return i;
}

Instruction Instruction::delay(int qubit, long duration_dt)
{
  Instruction i;
  i.kind = Kind::Delay;
  i.qubits = {qubit};
  i.duration_dt = duration_dt;
  i.label = "delay";
  return i;
}

Instruction Instruction::measure(int qubit, long duration_dt, sim::Targets disturbs)
{
  Instruction i;
  i.kind = Kind::Measure;
  i.qubits = {qubit};
  i.duration_dt = duration_dt;
  i.label = "measure";
  i.disturbs = std::move(disturbs);
  return i;
}

Instruction Instruction::barrier(sim::Targets qubits)
{
  Instruction i;
  i.kind = Kind::Barrier;
  i.qubits = std::move(qubits);
  i.label = "barrier";
  return i;
}

std::vector<TimedInstruction> TimedSchedule::lane(int qubit) const
{
  std::vector<TimedInstruction> out;
  for (auto const &op : ops)
    if (std::find(op.instr.qubits.begin(), op.instr.qubits.end(), qubit) != op.instr.qubits.end()) out.push_back(op);
  return out;
}

void TimedSchedule::validate() const
{
  for (std::size_t i = 1; i < ops.size(); ++i)
    if (ops[i].start_dt < ops[i - 1].start_dt) throw ValidationError("schedule is not sorted by start time");
  for (int q = 0; q < n_qubits; ++q) {
    long cursor = 0;
    for (auto const &op : lane(q)) {
      if (op.instr.kind == Instruction::Kind::Barrier) continue;
      if (op.start_dt < cursor) throw ValidationError("overlapping instructions on qubit " + std::to_string(q));
      cursor = op.end_dt();
    }
    if (cursor > total_dt) throw ValidationError("instruction extends past schedule end");
  }
  for (auto const &op : ops)
    for (int q : op.instr.qubits)
      if (q < 0 || q >= n_qubits) throw ValidationError("instruction references qubit outside register");
}

long Layout::length_dt() const
{
  long t = 0;
  for (auto const &i : items) t += i.duration_dt;
  return t;
}

std::vector<long> Layout::delays() const
{
  std::vector<long> out;
  for (auto const &i : items)
    if (i.kind == Instruction::Kind::Delay) out.push_back(i.duration_dt);
  return out;
}

int Layout::physical_pulses() const
{
  return static_cast<int>(std::count_if(items.begin(), items.end(), [](auto const &i) { return i.is_physical_pulse(); }));
}

int Layout::virtual_gates() const
{
  return static_cast<int>(std::count_if(items.begin(), items.end(), [](auto const &i) { return i.is_virtual_z(); }));
}

namespace {

void append_gates(Layout &layout, std::vector<UnitaryGated> const &gs)
{
  for (auto const &g : gs) layout.items.push_back(Instruction::from_gate(g));
}

void append_delay(Layout &layout, int qubit, long d)
{
  // Zero-length delays are kept so every block has the same shape.
  layout.items.push_back(Instruction::delay(qubit, d));
}

// Splits a window into `reps` blocks; the last block absorbs the remainder.
std::vector<long> block_lengths(long window_dt, int reps)
{
  if (reps < 1) throw ValidationError("repetitions must be positive");
  std::vector<long> out(static_cast<std::size_t>(reps), window_dt / reps);
  out.back() += window_dt % reps;
  return out;
}

void require_window(long window_dt, long needed, std::string_view what)
{
  if (window_dt < needed)
    throw InsufficientWindowError(std::string(what) + " needs " + std::to_string(needed) + " dt, window has " + std::to_string(window_dt));
}

long gates_length(std::vector<UnitaryGated> const &gs)
{
  long t = 0;
  for (auto const &g : gs) t += g.duration_dt;
  return t;
}

// gate, delay, gate, delay, ... with equal delays; residue to the last delay.
Layout gate_then_delay(long window_dt, int reps, int qubit, std::vector<std::vector<UnitaryGated>> const &block_gates)
{
  long per_block = 0;
  for (auto const &g : block_gates) per_block += gates_length(g);
  Layout out;
  auto const n = static_cast<long>(block_gates.size());
  for (long block : block_lengths(window_dt, reps)) {
    long const slack = block - per_block;
    long const each = slack / n;
    for (long k = 0; k < n; ++k) {
      append_gates(out, block_gates[static_cast<std::size_t>(k)]);
      append_delay(out, qubit, k + 1 == n ? slack - (n - 1) * each : each);
    }
  }
  return out;
}

} // namespace

std::vector<UnitaryGated> euler_to_native(EulerAngles const &params, GateDurations const &dur, int qubit)
{
  // Rz(θ)Ry(φ)Rz(λ) ∝ Rz(θ+π) √X Rz(φ+π) √X Rz(λ)
  return {gates::make_rz(qubit, params.lambda), gates::make_sx(qubit, dur.sx_dt), gates::make_rz(qubit, params.phi + pi),
          gates::make_sx(qubit, dur.sx_dt), gates::make_rz(qubit, params.theta + pi)};
}

std::vector<UnitaryGated> phased_x(GateDurations const &dur, int qubit)
{
  return {gates::make_rz(qubit, 2 * pi / 3), gates::make_x(qubit, dur.x_dt), gates::make_rz(qubit, -2 * pi / 3)};
}

sim::CMatrixd compose_unitary(std::vector<UnitaryGated> const &gs)
{
  sim::CMatrixd u = gates::identity();
  for (auto const &g : gs) u = g.matrix * u;
  return u;
}

sim::CMatrixd compose_unitary(Layout const &layout)
{
  sim::CMatrixd u = gates::identity();
  for (auto const &i : layout.items)
    if (i.gate) u = i.gate->matrix * u;
  return u;
}

Layout build_cpmg(long window_dt, GateDurations const &dur, int reps, int qubit)
{
  require_window(window_dt, static_cast<long>(reps) * 2 * dur.x_dt, "CPMG");
  Layout out;
  for (long block : block_lengths(window_dt, reps)) {
    long const slack = block - 2 * dur.x_dt;
    long const quarter = slack / 4;
    append_delay(out, qubit, quarter);
    append_gates(out, {gates::make_x(qubit, dur.x_dt)});
    append_delay(out, qubit, 2 * quarter);
    append_gates(out, {gates::make_x(qubit, dur.x_dt)});
    append_delay(out, qubit, slack - 3 * quarter);
  }
  return out;
}

Layout build_xy4(long window_dt, GateDurations const &dur, int reps, int qubit)
{
  require_window(window_dt, static_cast<long>(reps) * 4 * dur.x_dt, "XY4");
  auto const y = std::vector{gates::make_y(qubit, dur.x_dt)};
  auto const x = std::vector{gates::make_x(qubit, dur.x_dt)};
  return gate_then_delay(window_dt, reps, qubit, {y, x, y, x});
}

Layout build_ur6(long window_dt, GateDurations const &dur, int reps, int qubit)
{
  require_window(window_dt, static_cast<long>(reps) * 6 * dur.x_dt, "UR6");
  auto const x = std::vector{gates::make_x(qubit, dur.x_dt)};
  auto const xp = phased_x(dur, qubit);
  std::vector<std::vector<UnitaryGated>> const pulses{x, xp, x, x, xp, x};
  Layout out;
  for (long block : block_lengths(window_dt, reps)) {
    long const slack = block - 6 * dur.x_dt;
    long const each = slack / 7;
    for (auto const &p : pulses) {
      append_delay(out, qubit, each);
      append_gates(out, p);
    }
    append_delay(out, qubit, slack - 6 * each);
  }
  return out;
}

Layout build_ldd(long window_dt, GateDurations const &dur, EulerAngles const &params, int reps, int n_gates, int qubit)
{
  params.validate();
  if (n_gates < 2 || n_gates % 2 != 0) throw ValidationError("LDD gate count must be even and positive");
  auto const r = euler_to_native(params, dur, qubit);
  auto const r_dg = euler_to_native(params.inverse(), dur, qubit);
  require_window(window_dt, static_cast<long>(reps) * n_gates * gates_length(r), "LDD");
  std::vector<std::vector<UnitaryGated>> block(static_cast<std::size_t>(n_gates / 2), r);
  block.insert(block.end(), static_cast<std::size_t>(n_gates / 2), r_dg);
  return gate_then_delay(window_dt, reps, qubit, block);
}

Layout build_layout(DDSequenceSpec const &spec, long window_dt, GateDurations const &dur, int qubit)
{
  spec.validate();
  switch (spec.kind) {
  case DDKind::None:
  case DDKind::Delay: {
    Layout out;
    append_delay(out, qubit, window_dt);
    return out;
  }
  case DDKind::CPMG: return build_cpmg(window_dt, dur, spec.repetitions, qubit);
  case DDKind::XY4: return build_xy4(window_dt, dur, spec.repetitions, qubit);
  case DDKind::UR6: return build_ur6(window_dt, dur, spec.repetitions, qubit);
  case DDKind::LDD: return build_ldd(window_dt, dur, *spec.ldd_params, spec.repetitions, spec.n_gates, qubit);
  }
  throw ValidationError("unhandled sequence kind");
}

ScheduledCircuit alap_schedule(Circuit const &circuit, int n_qubits)
{
  // Reverse-time ASAP: `tail[q]` is the time already committed after q's
  // current position, measured back from the end of the schedule.
  std::vector<long> tail(static_cast<std::size_t>(n_qubits), 0);
  std::vector<long> rev_start(circuit.size());
  for (std::size_t k = circuit.size(); k-- > 0;) {
    auto const &ins = circuit[k];
    if (ins.qubits.empty()) throw ValidationError("instruction without qubits");
    long t = 0;
    for (int q : ins.qubits) {
      if (q < 0 || q >= n_qubits) throw ValidationError("instruction references qubit outside register");
      t = std::max(t, tail[static_cast<std::size_t>(q)]);
    }
    rev_start[k] = t;
    for (int q : ins.qubits) tail[static_cast<std::size_t>(q)] = t + ins.duration_dt;
  }
  long const total = tail.empty() ? 0 : *std::max_element(tail.begin(), tail.end());

  ScheduledCircuit out;
  out.schedule.n_qubits = n_qubits;
  out.schedule.total_dt = total;
  for (std::size_t k = 0; k < circuit.size(); ++k)
    out.schedule.ops.push_back({circuit[k], total - rev_start[k] - circuit[k].duration_dt});
  std::stable_sort(out.schedule.ops.begin(), out.schedule.ops.end(),
                   [](auto const &a, auto const &b) { return a.start_dt < b.start_dt; });

  for (int q = 0; q < n_qubits; ++q) {
    std::optional<long> cursor;
    for (auto const &op : out.schedule.lane(q)) {
      if (op.instr.kind == Instruction::Kind::Barrier) continue;
      if (cursor && op.start_dt > *cursor) out.windows.push_back({q, *cursor, op.start_dt - *cursor});
      cursor = op.end_dt();
    }
    if (cursor && total > *cursor) out.windows.push_back({q, *cursor, total - *cursor});
  }
  return out;
}

TimedSchedule insert_dd(TimedSchedule const &schedule, std::vector<IdleWindow> const &windows, DDSequenceSpec const &spec,
                        GateDurations const &dur, std::vector<std::string> *diagnostics)
{
  spec.validate();
  for (std::size_t i = 0; i < windows.size(); ++i) {
    auto const &w = windows[i];
    if (w.qubit < 0 || w.qubit >= schedule.n_qubits) throw ValidationError("window references qubit outside register");
    if (w.length_dt < 0 || w.start_dt < 0 || w.start_dt + w.length_dt > schedule.total_dt) throw ValidationError("window outside schedule");
    for (std::size_t j = 0; j < i; ++j) {
      auto const &v = windows[j];
      if (v.qubit == w.qubit && w.start_dt < v.start_dt + v.length_dt && v.start_dt < w.start_dt + w.length_dt)
        throw ValidationError("overlapping windows on qubit " + std::to_string(w.qubit));
    }
  }
  if (!spec.fills_windows()) return schedule;

  auto inside = [](TimedInstruction const &op, IdleWindow const &w) {
    return op.start_dt >= w.start_dt && op.end_dt() <= w.start_dt + w.length_dt && op.instr.qubits.size() == 1 && op.instr.qubits[0] == w.qubit;
  };

  TimedSchedule out{schedule.n_qubits, schedule.total_dt, {}};
  std::vector<TimedInstruction> added;
  std::vector<bool> filled(windows.size(), false);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    auto const &w = windows[i];
    try {
      auto const layout = build_layout(spec, w.length_dt, dur, w.qubit);
      long t = w.start_dt;
      for (auto const &item : layout.items) {
        added.push_back({item, t});
        t += item.duration_dt;
      }
      filled[i] = true;
    } catch (InsufficientWindowError const &e) {
      if (diagnostics)
        diagnostics->push_back("q" + std::to_string(w.qubit) + " window at " + std::to_string(w.start_dt) + " left idle: " + e.what());
    }
  }
  for (auto const &op : schedule.ops) {
    bool replaced = false;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      if (!filled[i] || !inside(op, windows[i])) continue;
      if (op.instr.kind != Instruction::Kind::Delay) throw ValidationError("window contains a non-delay instruction");
      replaced = true;
    }
    if (!replaced) out.ops.push_back(op);
  }
  out.ops.insert(out.ops.end(), added.begin(), added.end());
  std::stable_sort(out.ops.begin(), out.ops.end(), [](auto const &a, auto const &b) { return a.start_dt < b.start_dt; });
  out.validate();
  return out;
}

std::string to_timeline(TimedSchedule const &schedule)
{
  std::ostringstream os;
  for (int q = 0; q < schedule.n_qubits; ++q)
    for (auto const &op : schedule.lane(q)) os << 'q' << q << ' ' << op.start_dt << ' ' << op.instr.duration_dt << ' ' << op.instr.label << '\n';
  return os.str();
}

} // namespace ddlab::seq
