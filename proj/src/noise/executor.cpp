#include "ddlab/noise/executor.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace ddlab::noise {

namespace {

using Liouville = Eigen::Matrix4cd;

struct Interval
{
  long begin;
  long end;
};

class LaneEvolution
{
public:
  LaneEvolution(seq::TimedSchedule const &schedule, NoiseModel const &model, sim::DensityMatrixd state)
    : model_{model}
    , state_{std::move(state)}
    , n_{schedule.n_qubits}
    , pending_(static_cast<std::size_t>(n_), Liouville::Identity())
    , dirty_(static_cast<std::size_t>(n_), false)
    , clock_(static_cast<std::size_t>(n_), 0)
    , disturbed_(static_cast<std::size_t>(n_))
  {
    for (int q = 0; q < n_; ++q) generators_.push_back(IdleGenerator::from(model.params(q)));
    for (auto const &op : schedule.ops) {
      if (op.instr.kind != seq::Instruction::Kind::Measure) continue;
      for (int q : op.instr.disturbs) {
        if (q < 0 || q >= n_) throw ValidationError("measurement disturbs qubit outside register");
        disturbed_[static_cast<std::size_t>(q)].push_back({op.start_dt, op.end_dt()});
      }
    }
  }

  void idle_until(int q, long t)
  {
    auto &clock = clock_[static_cast<std::size_t>(q)];
    if (t < clock) throw ValidationError("instructions overlap on qubit " + std::to_string(q));
    // Split [clock, t) at measurement boundaries affecting q.
    std::vector<long> cuts{clock, t};
    for (auto const &iv : disturbed_[static_cast<std::size_t>(q)]) {
      if (iv.begin > clock && iv.begin < t) cuts.push_back(iv.begin);
      if (iv.end > clock && iv.end < t) cuts.push_back(iv.end);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      long const a = cuts[k], b = cuts[k + 1];
      if (b <= a) continue;
      int overlapping = 0;
      for (auto const &iv : disturbed_[static_cast<std::size_t>(q)])
        if (iv.begin <= a && b <= iv.end) ++overlapping;
      push(q, idle(q, overlapping, b - a));
    }
    clock = t;
  }

  void push(int q, Liouville const &l)
  {
    pending_[static_cast<std::size_t>(q)] = l * pending_[static_cast<std::size_t>(q)];
    dirty_[static_cast<std::size_t>(q)] = true;
  }

  void flush(int q)
  {
    if (!dirty_[static_cast<std::size_t>(q)]) return;
    sim::Superoperator<double> s{{q}, pending_[static_cast<std::size_t>(q)]};
    state_ = sim::apply_superoperator(std::move(state_), s);
    pending_[static_cast<std::size_t>(q)] = Liouville::Identity();
    dirty_[static_cast<std::size_t>(q)] = false;
  }

  void apply_multi(sim::UnitaryGated const &g)
  {
    for (int q : g.targets) flush(q);
    state_ = sim::apply_unitary(std::move(state_), g);
  }

  sim::DensityMatrixd finish(long total)
  {
    for (int q = 0; q < n_; ++q) {
      idle_until(q, total);
      flush(q);
    }
    return std::move(state_);
  }

private:
  Liouville const &idle(int q, int overlapping, long length)
  {
    auto const key = std::make_tuple(q, overlapping, length);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    IdleGenerator gen = generators_[static_cast<std::size_t>(q)];
    for (int k = 0; k < overlapping; ++k) gen = gen.with_mcm(model_.mcm, model_.dt_ns);
    Liouville l = idle_liouville(gen, static_cast<double>(length) * model_.dt_ns, model_.trotter_slices);
    return cache_.emplace(key, std::move(l)).first->second;
  }

  NoiseModel const &model_;
  sim::DensityMatrixd state_;
  int n_;
  std::vector<Liouville> pending_;
  std::vector<bool> dirty_;
  std::vector<long> clock_;
  std::vector<std::vector<Interval>> disturbed_;
  std::vector<IdleGenerator> generators_;
  std::map<std::tuple<int, int, long>, Liouville> cache_;
};

Liouville liouville_of(sim::CMatrixd const &u) { return sim::gates::kron<double>(u, u.conjugate()); }

} // namespace

sim::DensityMatrixd execute(seq::TimedSchedule const &schedule, NoiseModel const &model, sim::DensityMatrixd const &initial,
                            ExecutionOptions const &opts)
{
  model.validate();
  if (initial.n_qubits() != schedule.n_qubits) throw ShapeError("initial state size does not match schedule");
  LaneEvolution lanes(schedule, model, initial);
  auto const measure = to_superoperator(measurement_channel(0)).matrix;

  for (auto const &op : schedule.ops) {
    auto const &ins = op.instr;
    for (int q : ins.qubits) lanes.idle_until(q, op.start_dt);
    switch (ins.kind) {
    case seq::Instruction::Kind::Barrier: continue;
    case seq::Instruction::Kind::Delay: break;
    case seq::Instruction::Kind::Measure: lanes.push(ins.qubits.front(), measure); break;
    case seq::Instruction::Kind::Gate: {
      if (!ins.gate) throw ValidationError("gate instruction without a unitary");
      auto const g = opts.pulse_errors ? noisy_gate(*ins.gate, model.pulse) : *ins.gate;
      if (g.targets.size() == 1)
        lanes.push(g.targets.front(), liouville_of(g.matrix));
      else
        lanes.apply_multi(g);
      break;
    }
    }
    for (int q : ins.qubits) lanes.idle_until(q, op.end_dt());
  }
  return lanes.finish(schedule.total_dt);
}

sim::DensityMatrixd execute(seq::TimedSchedule const &schedule, NoiseModel const &model, ExecutionOptions const &opts)
{
  return execute(schedule, model, sim::ground_state(schedule.n_qubits), opts);
}

} // namespace ddlab::noise
