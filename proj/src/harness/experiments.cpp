#include "ddlab/harness/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "ddlab/noise/executor.hpp"

namespace ddlab::harness {

namespace gates = sim::gates;
using seq::DDKind;
using seq::EulerAngles;
using nlohmann::json;

seq::Circuit mcm_circuit(int r, long mcm_dt, seq::GateDurations const &dur, bool measure)
{
  if (r < 0) throw ValidationError("negative MCM count");
  using seq::Instruction;
  seq::Circuit c;
  c.push_back(Instruction::from_gate(gates::make_h(0, dur.h_dt)));
  c.push_back(Instruction::from_gate(gates::make_cx(0, 2, dur.cx_dt)));
  c.push_back(Instruction::barrier({0, 1, 2}));
  for (int k = 0; k < r; ++k) c.push_back(measure ? Instruction::measure(1, mcm_dt, {0, 2}) : Instruction::delay(1, mcm_dt));
  c.push_back(Instruction::barrier({0, 1, 2}));
  return c;
}

seq::Circuit deep_circuit(int intermediate, seq::GateDurations const &dur)
{
  if (intermediate < 0) throw ValidationError("negative intermediate qubit count");
  using seq::Instruction;
  seq::Circuit c;
  c.push_back(Instruction::from_gate(gates::make_h(0, dur.h_dt)));
  c.push_back(Instruction::from_gate(gates::make_cx(0, 1, dur.cx_dt)));
  // The target of each hop starts in |0>, so a swap needs only two CX.
  for (int h = 1; h <= intermediate; ++h) {
    c.push_back(Instruction::from_gate(gates::make_cx(h, h + 1, dur.cx_dt)));
    c.push_back(Instruction::from_gate(gates::make_cx(h + 1, h, dur.cx_dt)));
  }
  return c;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// A scheduled circuit plus the noise it runs under and the Bell pair it targets.
struct Scenario
{
  seq::ScheduledCircuit circuit;
  noise::NoiseModel model;
  int qa = 0;
  int qb = 0;
  int block_scale = 1; // DD blocks per configured repetition
};

seq::TimedSchedule realize(Scenario const &sc, ExperimentConfig const &cfg, DDKind kind, EulerAngles const &ldd, std::vector<std::string> *diag)
{
  auto spec = cfg.sequence_spec(kind, ldd);
  spec.repetitions *= sc.block_scale;
  return seq::insert_dd(sc.circuit.schedule, sc.circuit.windows, spec, cfg.durations, diag);
}

sim::DensityMatrixd run(Scenario const &sc, seq::TimedSchedule const &schedule) { return noise::execute(schedule, sc.model); }

cost::CostEstimate estimate(Scenario const &sc, ExperimentConfig const &cfg, sim::DensityMatrixd const &rho, sim::RngStream &rng)
{
  return cfg.exact ? cost::bell_cost_exact(rho, sc.qa, sc.qb) : cost::bell_cost_sampled(rho, sc.qa, sc.qb, cfg.shots, rng);
}

// Replica r draws its shots from root.split(r).
opt::Quartiles replicate(Scenario const &sc, ExperimentConfig const &cfg, sim::DensityMatrixd const &rho, sim::RngStream const &root)
{
  std::vector<double> f;
  for (int r = 0; r < cfg.replicas; ++r) {
    auto rng = root.split(static_cast<std::uint64_t>(r));
    f.push_back(estimate(sc, cfg, rho, rng).fidelity());
  }
  return opt::quartiles(f);
}

opt::Objective ldd_objective(Scenario const &sc, ExperimentConfig const &cfg)
{
  return [&sc, &cfg](EulerAngles const &x, sim::RngStream &rng) {
    auto const rho = run(sc, realize(sc, cfg, DDKind::LDD, x, nullptr));
    return estimate(sc, cfg, rho, rng);
  };
}

Scenario mcm_scenario(ExperimentConfig const &cfg, noise::NoiseModel const &model, int r, bool measure)
{
  Scenario sc;
  sc.model = model;
  sc.circuit = seq::alap_schedule(mcm_circuit(r, model.mcm.duration_dt, cfg.durations, measure), 3);
  std::erase_if(sc.circuit.windows, [](seq::IdleWindow const &w) { return w.qubit == 1; });
  sc.qa = 0;
  sc.qb = 2;
  // One DD block per measurement interval.
  sc.block_scale = std::max(r, 1);
  return sc;
}

Scenario deep_scenario(ExperimentConfig const &cfg, int intermediate)
{
  Scenario sc;
  sc.model = cfg.noise;
  sc.circuit = seq::alap_schedule(deep_circuit(intermediate, cfg.durations), intermediate + 2);
  sc.qa = 0;
  sc.qb = intermediate + 1;
  return sc;
}

ExperimentResult make_result(ExperimentConfig const &cfg, std::string sweep_name)
{
  cfg.validate();
  ExperimentResult res;
  res.kind = cfg.experiment;
  res.sweep_name = std::move(sweep_name);
  res.config = cfg;
  res.config_hash = config_hash(cfg);
  return res;
}

// Evaluates every configured sequence at one sweep point. `delay_variant`
// provides the scenario used for the Delay baseline.
void sweep_point(ExperimentResult &res, ExperimentConfig const &cfg, Scenario const &sc, Scenario const *delay_variant, double sweep_value,
                 std::uint64_t sweep_idx, sim::RngStream const &root)
{
  for (DDKind kind : cfg.sequences) {
    auto const t0 = Clock::now();
    ResultRow row;
    row.sequence = std::string(seq::to_string(kind));
    row.sweep_value = sweep_value;
    Scenario const &active = (kind == DDKind::Delay && delay_variant) ? *delay_variant : sc;
    EulerAngles x{};
    if (kind == DDKind::LDD) {
      auto spsa_rng = root.split({2, sweep_idx});
      auto trace = opt::spsa_minimize(ldd_objective(active, cfg), EulerAngles{}, cfg.spsa, spsa_rng);
      if (trace.aborted) res.diagnostics.push_back("spsa at " + std::to_string(sweep_value) + ": " + trace.diagnostic);
      x = trace.final_params;
      row.learned = x;
      res.traces.emplace_back(sweep_value, std::move(trace));
    }
    std::vector<std::string> diag;
    auto const rho = run(active, realize(active, cfg, kind, x, &diag));
    for (auto &d : diag) res.diagnostics.push_back(row.sequence + " at " + std::to_string(sweep_value) + ": " + d);
    row.fidelity = replicate(active, cfg, rho, root.split({1, sweep_idx, static_cast<std::uint64_t>(kind)}));
    row.wall_time_s = seconds_since(t0);
    res.rows.push_back(std::move(row));
  }
}

double mean_of(std::vector<noise::QubitNoiseParams> const &ps, double noise::QubitNoiseParams::*field)
{
  double s = 0;
  for (auto const &p : ps) s += p.*field;
  return s / static_cast<double>(ps.size());
}

} // namespace

ExperimentResult run_mcm_experiment(ExperimentConfig const &cfg)
{
  auto res = make_result(cfg, "r");
  sim::RngStream const root(cfg.seed);
  for (std::size_t i = 0; i < cfg.r_values.size(); ++i) {
    int const r = cfg.r_values[i];
    auto const sc = mcm_scenario(cfg, cfg.noise, r, true);
    auto const delayed = mcm_scenario(cfg, cfg.noise, r, false);
    sweep_point(res, cfg, sc, &delayed, r, i, root);
  }
  // Closed-form decay of the idle neighbours over the MCM interval.
  std::vector<noise::QubitNoiseParams> const pair{cfg.noise.params(0), cfg.noise.params(2)};
  double const t1 = mean_of(pair, &noise::QubitNoiseParams::t1);
  double const t2 = mean_of(pair, &noise::QubitNoiseParams::t2);
  for (int r : cfg.r_values) {
    double const t = r * static_cast<double>(cfg.noise.mcm.duration_dt) * cfg.noise.dt_ns;
    auto ref = [&](std::string name, double value) {
      res.rows.push_back({std::move(name), static_cast<double>(r), {value, value, value}, std::nullopt, 0.0});
    };
    ref("ref_t1", noise::reference_decay(t, t1, noise::kInfinity));
    ref("ref_t2", noise::reference_decay(t, noise::kInfinity, t2));
    ref("ref_spam", noise::reference_decay(t, t1, t2, cfg.spam));
  }
  return res;
}

ExperimentResult run_deep_circuit_experiment(ExperimentConfig const &cfg)
{
  auto res = make_result(cfg, "intermediate_qubits");
  sim::RngStream const root(cfg.seed);
  for (std::size_t i = 0; i < cfg.chain_lengths.size(); ++i) {
    int const n = cfg.chain_lengths[i];
    auto const sc = deep_scenario(cfg, n);
    sweep_point(res, cfg, sc, nullptr, n, i, root);
  }
  return res;
}

ExperimentResult run_noisy_mcm_scan(ExperimentConfig const &cfg)
{
  auto res = make_result(cfg, "candidate");
  sim::RngStream const root(cfg.seed);
  std::vector<ScanRow> table;
  for (std::size_t i = 0; i < cfg.candidates.size(); ++i) {
    auto const &cand = cfg.candidates[i];
    noise::NoiseModel model = cfg.noise;
    model.mcm = cand.mcm;
    if (cand.neighbor_params) {
      model.qubits.assign(3, model.default_qubit);
      model.qubits[0] = model.qubits[2] = *cand.neighbor_params;
    }
    ScanRow row;
    row.label = cand.label;
    for (bool measure : {true, false}) {
      auto const t0 = Clock::now();
      auto const sc = mcm_scenario(cfg, model, 1, measure);
      auto const rho = run(sc, sc.circuit.schedule);
      auto const q = replicate(sc, cfg, rho, root.split({1, i, measure ? 0u : 1u}));
      (measure ? row.fidelity_mcm : row.fidelity_delay) = q.median;
      res.rows.push_back({measure ? "mcm" : "delay", static_cast<double>(cand.label), q, std::nullopt, seconds_since(t0)});
    }
    row.gap = row.fidelity_delay - row.fidelity_mcm;
    table.push_back(row);
  }
  std::stable_sort(table.begin(), table.end(), [](ScanRow const &a, ScanRow const &b) { return a.gap > b.gap; });
  for (std::size_t k = 0; k < table.size(); ++k) table[k].rank = static_cast<int>(k) + 1;
  if (!table.empty()) table.front().flagged = true;
  res.scan = std::move(table);
  return res;
}

ExperimentResult run_robustness_study(ExperimentConfig const &cfg)
{
  auto res = make_result(cfg, "epsilon");
  sim::RngStream const root(cfg.seed);
  auto const sc = mcm_scenario(cfg, cfg.noise, cfg.robustness_r, true);

  auto const t0 = Clock::now();
  auto spsa_rng = root.split({2, 0});
  auto trace = opt::spsa_minimize(ldd_objective(sc, cfg), EulerAngles{}, cfg.spsa, spsa_rng);
  auto const optimum = trace.final_params;
  res.traces.emplace_back(cfg.robustness_r, std::move(trace));

  opt::FidelityFn const fidelity = [&sc, &cfg](EulerAngles const &x, sim::RngStream &rng) {
    auto const rho = run(sc, realize(sc, cfg, DDKind::LDD, x, nullptr));
    return estimate(sc, cfg, rho, rng).fidelity();
  };
  auto const rows = opt::robustness_sweep(fidelity, optimum, cfg.epsilons, cfg.samples_per_eps, root.split(3));
  double const elapsed = seconds_since(t0) / static_cast<double>(rows.size());
  for (auto const &r : rows) res.rows.push_back({"ldd", r.epsilon, r.fidelity, optimum, elapsed});
  return res;
}

ExperimentResult run_experiment(ExperimentConfig const &cfg)
{
  switch (cfg.experiment) {
  case ExperimentKind::Mcm: return run_mcm_experiment(cfg);
  case ExperimentKind::Deep: return run_deep_circuit_experiment(cfg);
  case ExperimentKind::Scan: return run_noisy_mcm_scan(cfg);
  case ExperimentKind::Robustness: return run_robustness_study(cfg);
  }
  throw ValidationError("unhandled experiment kind");
}

json to_json(opt::SpsaTrace const &trace)
{
  auto angles = [](EulerAngles const &e) { return json::array({e.theta, e.phi, e.lambda}); };
  json iters = json::array();
  for (auto const &it : trace.iterations)
    iters.push_back({{"k", it.k}, {"params", angles(it.params)}, {"cost_plus", it.cost_plus}, {"cost_minus", it.cost_minus}, {"step_norm", it.step_norm}});
  return {{"initial_params", angles(trace.initial_params)},
          {"final_params", angles(trace.final_params)},
          {"final_cost", trace.final_cost.value},
          {"final_cost_std_error", trace.final_cost.std_error},
          {"learning_rate", trace.learning_rate},
          {"evaluations", trace.evaluations},
          {"aborted", trace.aborted},
          {"diagnostic", trace.diagnostic},
          {"iterations", iters}};
}

} // namespace ddlab::harness
