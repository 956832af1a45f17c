// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "ddlab/harness/emit.hpp"
#include "ddlab/noise/executor.hpp"
#include "support/oracles.hpp"

using namespace ddlab;
using seq::DDKind;
using seq::DDSequenceSpec;
using seq::EulerAngles;
using seq::GateDurations;
using seq::Instruction;
using seq::TimedSchedule;
using sim::DensityMatrixd;
using sim::RngStream;
using std::numbers::pi;

namespace {

struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::string fmt(char const *f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) { return opt::quartiles(v).median; }

constexpr long kWindow = 5600;

// One idle window of kWindow on each of `n` qubits.
TimedSchedule idle_register(int n, long length = kWindow)
{
  TimedSchedule s{n, length, {}};
  for (int q = 0; q < n; ++q) s.ops.push_back({Instruction::delay(q, length), 0});
  return s;
}

TimedSchedule filled(int n, DDSequenceSpec const &spec, long length = kWindow)
{
  std::vector<seq::IdleWindow> windows;
  for (int q = 0; q < n; ++q) windows.push_back({q, 0, length});
  return seq::insert_dd(idle_register(n, length), windows, spec, GateDurations{});
}

// Mean fidelity over the six cardinal single-qubit states.
double cardinal_fidelity(TimedSchedule const &s, noise::NoiseModel const &m)
{
  double const h = 1 / std::sqrt(2.0);
  std::vector<oracle::Vec> states;
  for (auto [a, b] : std::vector<std::pair<oracle::cd, oracle::cd>>{
           {1, 0}, {0, 1}, {h, h}, {h, -h}, {h, oracle::cd(0, h)}, {h, oracle::cd(0, -h)}}) {
    oracle::Vec v(2);
    v << a, b;
    states.push_back(v);
  }
  double sum = 0;
  for (auto const &psi : states) sum += sim::state_fidelity(noise::execute(s, m, DensityMatrixd::from_pure(1, psi)), psi);
  return sum / static_cast<double>(states.size());
}

double window_ns() { return kWindow * GateDurations{}.dt_ns; }

Outcome ac1()
{
  auto const t0 = std::chrono::steady_clock::now();
  RngStream rng(101);
  double worst = 1;
  for (auto kind : {DDKind::CPMG, DDKind::XY4, DDKind::UR6, DDKind::LDD}) {
    DDSequenceSpec const spec{kind, 1, EulerAngles{rng.uniform(-pi, pi), rng.uniform(-pi, pi), rng.uniform(-pi, pi)}};
    auto const s = filled(2, spec);
    for (int k = 0; k < 100; ++k) {
      oracle::Vec const psi = oracle::random_pure(2, rng);
      worst = std::min(worst, sim::state_fidelity(noise::execute(s, noise::NoiseModel::noiseless(), DensityMatrixd::from_pure(2, psi)), psi));
    }
  }
  double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst >= 1 - 1e-9 && secs < 10, fmt("min fidelity %.15f over 4x100 states in %.2f s", worst, secs)};
}

Outcome ac2()
{
  RngStream rng(202);
  double worst = 0;
  for (int k = 0; k < 1000; ++k) {
    DensityMatrixd const rho(2, oracle::random_density(2, rng, 1 + k % 4));
    worst = std::max(worst, std::abs(cost::bell_cost_exact(rho, 0, 1).value - cost::general_fidelity_cost(rho, sim::bell_phi_plus()).value));
  }
  return {worst <= 1e-10, fmt("max |dJ| = %.3e over 1000 states", worst)};
}

Outcome ac3()
{
  oracle::Vec plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  auto const rho = DensityMatrixd::from_pure(1, plus);
  double worst_cpmg = 1, worst_gap = 0;
  bool none_ok = true;
  for (double angle : {0.05, 0.3, 1.0, 2.0, 2.8, pi}) {
    auto m = noise::NoiseModel::noiseless();
    m.default_qubit.static_z_rate = angle / window_ns();
    double const cpmg = sim::state_fidelity(noise::execute(filled(1, {DDKind::CPMG}), m, rho), plus);
    double const none = sim::state_fidelity(noise::execute(idle_register(1), m, rho), plus);
    worst_cpmg = std::min(worst_cpmg, cpmg);
    worst_gap = std::max(worst_gap, none);
    none_ok = none_ok && none < 1;
  }
  return {worst_cpmg >= 1 - 1e-9 && none_ok, fmt("min CPMG fidelity %.15f, max no-DD fidelity %.6f", worst_cpmg, worst_gap)};
}

Outcome ac4()
{
  RngStream rng(404);
  std::vector<double> fx, fc, fn;
  for (int draw = 0; draw < 20; ++draw) {
    auto m = noise::NoiseModel::noiseless();
    m.default_qubit.static_z_rate = rng.uniform(-0.1, 0.1) / window_ns();
    m.default_qubit.static_x_rate = rng.uniform(-0.1, 0.1) / window_ns();
    fx.push_back(cardinal_fidelity(filled(1, {DDKind::XY4}), m));
    fc.push_back(cardinal_fidelity(filled(1, {DDKind::CPMG}), m));
    fn.push_back(cardinal_fidelity(idle_register(1), m));
  }
  double const x = median(fx), c = median(fc), n = median(fn);
  return {x > c && c > n, fmt("median fidelity XY4 %.9f > CPMG %.9f > none %.9f", x, c, n)};
}

Outcome ac5()
{
  RngStream rng(505);
  int wins = 0;
  double worst_ratio = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto m = noise::NoiseModel::noiseless();
    m.pulse.over_rotation = 0.05;
    m.default_qubit.static_z_rate = rng.uniform(-0.5, 0.5) / window_ns();
    double const ur6 = 1 - cardinal_fidelity(filled(1, {DDKind::UR6}), m);
    double const cpmg = 1 - cardinal_fidelity(filled(1, {DDKind::CPMG}), m);
    wins += ur6 < cpmg;
    worst_ratio = std::max(worst_ratio, ur6 / cpmg);
  }
  return {wins >= 18, fmt("UR6 error below CPMG in %d/20 trials (worst UR6/CPMG error ratio %.3g)", wins, worst_ratio)};
}

Outcome ac6()
{
  auto const t0 = std::chrono::steady_clock::now();
  auto cfg = harness::ExperimentConfig::defaults(harness::ExperimentKind::Mcm);
  cfg.r_values = {5, 15};
  cfg.sequences = {DDKind::CPMG, DDKind::XY4, DDKind::UR6, DDKind::LDD};
  std::vector<int> wins(cfg.r_values.size(), 0);
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cfg.seed = seed;
    auto const res = harness::run_mcm_experiment(cfg);
    for (std::size_t i = 0; i < cfg.r_values.size(); ++i) {
      double const r = cfg.r_values[i];
      double best_fixed = 0, ldd = 0;
      for (auto const &row : res.rows) {
        if (row.sweep_value != r) continue;
        if (row.sequence == "ldd")
          ldd = row.fidelity.median;
        else if (row.sequence == "cpmg" || row.sequence == "xy4" || row.sequence == "ur6")
          best_fixed = std::max(best_fixed, row.fidelity.median);
      }
      wins[i] += ldd >= best_fixed - 0.01;
      detail += fmt(" s%llu/r%g: ldd %.4f vs best %.4f;", static_cast<unsigned long long>(seed), r, ldd, best_fixed);
    }
  }
  double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool pass = secs < 300;
  for (int w : wins) pass = pass && w >= 4;
  return {pass, fmt("seeds passing r=5: %d/5, r=15: %d/5, %.1f s;", wins[0], wins[1], secs) + detail};
}

Outcome ac7()
{
  struct Golden
  {
    DDSequenceSpec spec;
    std::vector<long> delays;
    int pulses;
    int virtual_z;
  };
  std::vector<Golden> const golden{
      {{DDKind::CPMG}, {1272, 2544, 1272}, 2, 0},
      {{DDKind::XY4}, {1144, 1144, 1144, 1144}, 4, 0},
      {{DDKind::UR6}, {580, 580, 580, 580, 580, 580, 584}, 6, 4},
      {{DDKind::LDD, 1, EulerAngles{0.4, -1.1, 2.3}}, {888, 888, 888, 888}, 8, 12},
  };
  bool ok = true;
  std::string detail;
  for (auto const &g : golden) {
    auto const s = filled(1, g.spec);
    std::vector<long> delays;
    long sum = 0;
    int pulses = 0, vz = 0;
    for (auto const &op : s.ops) {
      sum += op.instr.duration_dt;
      if (op.instr.kind == Instruction::Kind::Delay) delays.push_back(op.instr.duration_dt);
      if (op.instr.is_virtual_z()) ++vz;
      else if (op.instr.kind == Instruction::Kind::Gate) ++pulses;
    }
    bool const good = s.total_dt == kWindow && sum == kWindow && delays == g.delays && pulses == g.pulses && vz == g.virtual_z;
    ok = ok && good;
    detail += fmt(" %s:%s", std::string(seq::to_string(g.spec.kind)).c_str(), good ? "ok" : "MISMATCH");
  }
  return {ok, "5600-dt timelines" + detail};
}

Outcome ac8()
{
  long calls = 0;
  opt::Objective const objective = [&calls](EulerAngles const &x, RngStream &rng) {
    ++calls;
    return cost::CostEstimate{x.vec().squaredNorm() + 0.01 * rng.normal(), 400, 0.01};
  };
  RngStream a(808);
  auto const trace = opt::spsa_minimize(objective, {}, opt::SpsaConfig{}, a);
  bool const budget = calls == 250 && trace.evaluations == 250;

  auto cfg = harness::ExperimentConfig::defaults(harness::ExperimentKind::Mcm);
  cfg.r_values = {1, 3};
  cfg.sequences = {DDKind::CPMG, DDKind::LDD};
  cfg.seed = 8;
  auto const r1 = harness::run_experiment(cfg);
  auto const r2 = harness::run_experiment(cfg);
  bool same = harness::results_csv(r1) == harness::results_csv(r2) && harness::params_csv(r1) == harness::params_csv(r2);
  for (std::size_t i = 0; i < r1.traces.size(); ++i) same = same && harness::to_json(r1.traces[i].second).dump() == harness::to_json(r2.traces[i].second).dump();
  return {budget && same, fmt("%ld objective calls (expected 250); replay %s", calls, same ? "bit-identical" : "DIFFERS")};
}

Outcome ac9()
{
  RngStream rng(909);
  double worst = 0;
  EulerAngles const x{0.3, -0.7, 1.9};
  for (int k = 0; k < 10000; ++k) {
    double const eps = 0.01 + 0.2 * (k % 10);
    worst = std::max(worst, std::abs((opt::perturb_params(x, eps, rng).vec() - x.vec()).norm() - eps));
  }

  // ε = 0 row against direct evaluation of the unperturbed LDD schedule.
  auto const cfg = harness::ExperimentConfig::defaults(harness::ExperimentKind::Robustness);
  auto sched = seq::alap_schedule(harness::mcm_circuit(1, cfg.noise.mcm.duration_dt, cfg.durations, true), 3);
  std::erase_if(sched.windows, [](seq::IdleWindow const &w) { return w.qubit == 1; });
  opt::FidelityFn const fidelity = [&](EulerAngles const &p, RngStream &r) {
    auto const s = seq::insert_dd(sched.schedule, sched.windows, cfg.sequence_spec(DDKind::LDD, p), cfg.durations);
    return cost::bell_cost_sampled(noise::execute(s, cfg.noise), 0, 2, cfg.shots, r).fidelity();
  };
  RngStream const root(99);
  auto const rows = opt::robustness_sweep(fidelity, x, {0.0, 0.1, 0.4}, 10, root);
  bool exact = true;
  for (int s = 0; s < 10; ++s) {
    auto eval = root.split({0, static_cast<std::uint64_t>(s)});
    exact = exact && rows[0].samples[static_cast<std::size_t>(s)] == fidelity(x, eval);
  }
  return {worst <= 1e-12 && exact, fmt("max | |D| - eps | = %.3e over 10000 draws; eps=0 row %s", worst, exact ? "reproduces reference" : "DIFFERS")};
}

Outcome ac10()
{
  RngStream rng(1010);
  auto const bell = DensityMatrixd::from_pure(2, sim::bell_phi_plus()).data();
  std::vector<oracle::Mat> const states{
      0.9 * bell + 0.1 * oracle::Mat::Identity(4, 4) / 4.0,
      0.6 * bell + 0.4 * oracle::random_density(2, rng),
      oracle::random_density(2, rng),
  };
  bool ok = true;
  std::string detail;
  for (auto const &m : states) {
    DensityMatrixd const rho(2, m);
    double const exact = cost::bell_cost_exact(rho, 0, 1).value;
    std::vector<double> v;
    for (int k = 0; k < 1000; ++k) v.push_back(cost::bell_cost_sampled(rho, 0, 1, 400, rng).value);
    double mean = 0, var = 0;
    for (double x : v) mean += x;
    mean /= 1000;
    for (double x : v) var += (x - mean) * (x - mean);
    double const se = std::sqrt(var / 999 / 1000);
    double const z = std::abs(mean - exact) / se;
    ok = ok && z <= 4;
    detail += fmt(" %.1f SE;", z);
  }
  return {ok, "bias in standard errors:" + detail};
}

Outcome ac11()
{
  double const got = noise::reference_decay(12'260, 245'000, noise::kInfinity);
  double const want = std::exp(-12.26 / 245);
  return {std::abs(got - want) <= 1e-12, fmt("%.15f vs %.15f", got, want)};
}

} // namespace

int main()
{
  std::vector<std::pair<char const *, std::function<Outcome()>>> const criteria{
      {"AC1 identity composition", ac1}, {"AC2 cost identity", ac2},       {"AC3 echo refocusing", ac3},
      {"AC4 universality ordering", ac4}, {"AC5 UR6 pulse robustness", ac5}, {"AC6 LDD learning", ac6},
      {"AC7 scheduling arithmetic", ac7}, {"AC8 SPSA budget and replay", ac8}, {"AC9 perturbation norm", ac9},
      {"AC10 estimator bias", ac10},      {"AC11 reference curves", ac11},
  };
  int failed = 0;
  for (auto const &[name, check] : criteria) {
    Outcome out;
    try {
      out = check();
    } catch (std::exception const &e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failed += !out.pass;
    std::printf("%s %s: %s\n", out.pass ? "PASS" : "FAIL", name, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
