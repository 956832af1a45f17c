#include "ddlab/harness/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ddlab::harness {

using nlohmann::json;

std::string_view to_string(ExperimentKind kind)
{
  switch (kind) {
  case ExperimentKind::Mcm: return "mcm";
  case ExperimentKind::Deep: return "deep";
  case ExperimentKind::Scan: return "scan";
  case ExperimentKind::Robustness: return "robustness";
  }
  return "?";
}

ExperimentKind parse_experiment(std::string_view name)
{
  for (auto k : {ExperimentKind::Mcm, ExperimentKind::Deep, ExperimentKind::Scan, ExperimentKind::Robustness})
    if (to_string(k) == name) return k;
  throw ValidationError("unknown experiment '" + std::string(name) + "'");
}

namespace {

noise::McmNoiseSpec default_mcm()
{
  noise::McmNoiseSpec m;
  m.duration_dt = 5600;
  m.neighbor_z_kick = 0.3;
  m.neighbor_extra_dephasing = 0.02;
  return m;
}

noise::QubitNoiseParams eagle_qubit()
{
  noise::QubitNoiseParams p;
  p.t1 = 245'000;
  p.t2 = 175'000;
  return p;
}

// 30 measured-qubit candidates; one strongly disturbing measurement (121).
std::vector<ScanCandidate> default_candidates()
{
  std::vector<int> const labels{1,  4,  7,  10, 19, 22, 25, 28, 31,  40,  43,  46,  49,  58,  61,
                                64, 67, 76, 79, 82, 85, 88, 97, 100, 103, 106, 115, 118, 121, 124};
  std::vector<ScanCandidate> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ScanCandidate c;
    c.label = labels[i];
    c.mcm.duration_dt = 5600;
    c.mcm.neighbor_z_kick = 0.02 * static_cast<double>(i % 5);
    c.mcm.neighbor_extra_dephasing = 0.002 * static_cast<double>(i % 3);
    if (c.label == 121) {
      c.mcm.neighbor_z_kick = 0.9;
      c.mcm.neighbor_extra_dephasing = 0.05;
    }
    out.push_back(c);
  }
  return out;
}

double time_from_json(json const &j, char const *key, double fallback)
{
  if (!j.contains(key)) return fallback;
  if (j.at(key).is_null()) return noise::kInfinity;
  return j.at(key).get<double>();
}

json time_to_json(double t) { return std::isinf(t) ? json(nullptr) : json(t); }

noise::QubitNoiseParams parse_qubit(json const &j, noise::QubitNoiseParams p)
{
  p.t1 = time_from_json(j, "t1_ns", p.t1);
  p.t2 = time_from_json(j, "t2_ns", p.t2);
  p.static_z_rate = j.value("static_z_rate", p.static_z_rate);
  p.static_x_rate = j.value("static_x_rate", p.static_x_rate);
  return p;
}

json qubit_json(noise::QubitNoiseParams const &p)
{
  return {{"t1_ns", time_to_json(p.t1)}, {"t2_ns", time_to_json(p.t2)}, {"static_z_rate", p.static_z_rate}, {"static_x_rate", p.static_x_rate}};
}

noise::McmNoiseSpec parse_mcm(json const &j, noise::McmNoiseSpec m)
{
  m.duration_dt = j.value("duration_dt", m.duration_dt);
  m.neighbor_z_kick = j.value("neighbor_z_kick", m.neighbor_z_kick);
  m.neighbor_extra_dephasing = j.value("neighbor_extra_dephasing", m.neighbor_extra_dephasing);
  return m;
}

json mcm_json(noise::McmNoiseSpec const &m)
{
  return {{"duration_dt", m.duration_dt}, {"neighbor_z_kick", m.neighbor_z_kick}, {"neighbor_extra_dephasing", m.neighbor_extra_dephasing}};
}

template <typename T> std::vector<T> list_or(json const &j, char const *key, std::vector<T> fallback)
{
  return j.contains(key) ? j.at(key).get<std::vector<T>>() : fallback;
}

} // namespace

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind)
{
  using seq::DDKind;
  ExperimentConfig cfg;
  cfg.experiment = kind;
  cfg.noise.default_qubit = eagle_qubit();
  cfg.noise.mcm = default_mcm();
  switch (kind) {
  case ExperimentKind::Mcm:
  case ExperimentKind::Robustness: break;
  case ExperimentKind::Deep:
    // Weak residual detuning plus a small drive miscalibration.
    cfg.noise.default_qubit.static_z_rate = 2.0e-4;
    cfg.noise.pulse.over_rotation = 0.01;
    cfg.sequences = {DDKind::None, DDKind::CPMG, DDKind::XY4, DDKind::UR6, DDKind::LDD};
    break;
  case ExperimentKind::Scan:
    cfg.sequences = {DDKind::None, DDKind::Delay};
    cfg.r_values = {1};
    cfg.candidates = default_candidates();
    break;
  }
  return cfg;
}

seq::DDSequenceSpec ExperimentConfig::sequence_spec(seq::DDKind kind, seq::EulerAngles const &ldd) const
{
  seq::DDSequenceSpec spec;
  spec.kind = kind;
  auto const it = repetitions.find(kind);
  spec.repetitions = it == repetitions.end() ? 1 : it->second;
  if (kind == seq::DDKind::LDD) {
    spec.ldd_params = ldd;
    spec.n_gates = ldd_n_gates;
  }
  return spec;
}

void ExperimentConfig::validate() const
{
  noise.validate();
  durations.validate();
  spsa.validate();
  if (std::abs(noise.dt_ns - durations.dt_ns) > 1e-15) throw ValidationError("noise and durations disagree on dt_ns");
  if (shots < 1) throw ValidationError("shots must be positive");
  if (replicas < 1) throw ValidationError("replicas must be positive");
  if (sequences.empty()) throw ValidationError("sequence list is empty");
  if (ldd_n_gates < 2 || ldd_n_gates % 2 != 0) throw ValidationError("ldd_n_gates must be even and positive");
  for (auto const &[kind, reps] : repetitions)
    if (reps < 1) throw ValidationError("repetitions must be positive");
  switch (experiment) {
  case ExperimentKind::Mcm:
    if (r_values.empty()) throw ValidationError("r_values is empty");
    for (int r : r_values)
      if (r < 1) throw ValidationError("r values must be positive");
    break;
  case ExperimentKind::Deep:
    if (chain_lengths.empty()) throw ValidationError("chain_lengths is empty");
    for (int i : chain_lengths)
      if (i < 0 || i + 2 > sim::kMaxQubits) throw ValidationError("intermediate qubit count outside [0, 10]");
    break;
  case ExperimentKind::Scan:
    if (candidates.empty()) throw ValidationError("scan needs at least one candidate");
    for (auto const &c : candidates) {
      c.mcm.validate();
      if (c.neighbor_params) c.neighbor_params->validate();
    }
    break;
  case ExperimentKind::Robustness:
    if (robustness_r < 1) throw ValidationError("robustness r must be positive");
    if (epsilons.empty() || epsilons.front() != 0.0) throw ValidationError("epsilon grid must start at 0");
    for (std::size_t i = 1; i < epsilons.size(); ++i)
      if (epsilons[i] < epsilons[i - 1]) throw ValidationError("epsilon grid must be ascending");
    if (samples_per_eps < 1) throw ValidationError("samples_per_eps must be positive");
    break;
  }
}

ExperimentConfig parse_config(json const &doc)
{
  json const exp = doc.value("experiment", json::object());
  auto const kind = parse_experiment(exp.value("kind", std::string("mcm")));
  ExperimentConfig cfg = ExperimentConfig::defaults(kind);

  cfg.seed = exp.value("seed", cfg.seed);
  cfg.shots = exp.value("shots", cfg.shots);
  cfg.exact = exp.value("exact", cfg.exact);
  cfg.replicas = exp.value("replicas", cfg.replicas);
  cfg.r_values = list_or(exp, "r_values", cfg.r_values);
  cfg.chain_lengths = list_or(exp, "chain_lengths", cfg.chain_lengths);
  if (exp.contains("sequences")) {
    cfg.sequences.clear();
    for (auto const &s : exp.at("sequences")) cfg.sequences.push_back(seq::parse_kind(s.get<std::string>()));
  }
  if (exp.contains("repetitions"))
    for (auto const &[name, reps] : exp.at("repetitions").items()) cfg.repetitions[seq::parse_kind(name)] = reps.get<int>();
  cfg.ldd_n_gates = exp.value("ldd_n_gates", cfg.ldd_n_gates);
  cfg.spam = exp.value("spam", cfg.spam);
  if (exp.contains("spsa")) {
    auto const &s = exp.at("spsa");
    cfg.spsa.max_iterations = s.value("max_iterations", cfg.spsa.max_iterations);
    cfg.spsa.perturbation_c = s.value("perturbation_c", cfg.spsa.perturbation_c);
    cfg.spsa.alpha = s.value("alpha", cfg.spsa.alpha);
    cfg.spsa.gamma = s.value("gamma", cfg.spsa.gamma);
    cfg.spsa.stability_A = s.value("stability_A", cfg.spsa.stability_A);
    cfg.spsa.calibration_samples = s.value("calibration_samples", cfg.spsa.calibration_samples);
    cfg.spsa.target_first_step = s.value("target_first_step", cfg.spsa.target_first_step);
    if (s.contains("learning_rate") && !s.at("learning_rate").is_null()) cfg.spsa.learning_rate = s.at("learning_rate").get<double>();
  }
  if (exp.contains("robustness")) {
    auto const &r = exp.at("robustness");
    cfg.robustness_r = r.value("r", cfg.robustness_r);
    cfg.epsilons = list_or(r, "epsilons", cfg.epsilons);
    cfg.samples_per_eps = r.value("samples_per_eps", cfg.samples_per_eps);
  }

  json const dur = doc.value("durations", json::object());
  cfg.durations.dt_ns = dur.value("dt_ns", cfg.durations.dt_ns);
  cfg.durations.x_dt = dur.value("x_dt", cfg.durations.x_dt);
  cfg.durations.sx_dt = dur.value("sx_dt", cfg.durations.sx_dt);
  cfg.durations.h_dt = dur.value("h_dt", cfg.durations.h_dt);
  cfg.durations.cx_dt = dur.value("cx_dt", cfg.durations.cx_dt);
  cfg.noise.dt_ns = cfg.durations.dt_ns;

  json const nz = doc.value("noise", json::object());
  cfg.noise.trotter_slices = nz.value("trotter_slices", cfg.noise.trotter_slices);
  if (nz.contains("default_qubit")) cfg.noise.default_qubit = parse_qubit(nz.at("default_qubit"), cfg.noise.default_qubit);
  if (nz.contains("qubits")) {
    cfg.noise.qubits.clear();
    for (auto const &q : nz.at("qubits")) cfg.noise.qubits.push_back(parse_qubit(q, cfg.noise.default_qubit));
  }
  if (nz.contains("mcm")) cfg.noise.mcm = parse_mcm(nz.at("mcm"), cfg.noise.mcm);
  if (nz.contains("pulse")) {
    cfg.noise.pulse.over_rotation = nz.at("pulse").value("over_rotation", cfg.noise.pulse.over_rotation);
    cfg.noise.pulse.phase_error = nz.at("pulse").value("phase_error", cfg.noise.pulse.phase_error);
  }

  if (exp.contains("candidates")) {
    cfg.candidates.clear();
    for (auto const &c : exp.at("candidates")) {
      ScanCandidate sc;
      sc.label = c.at("label").get<int>();
      sc.mcm = parse_mcm(c.value("mcm", json::object()), cfg.noise.mcm);
      if (c.contains("neighbor")) sc.neighbor_params = parse_qubit(c.at("neighbor"), cfg.noise.default_qubit);
      cfg.candidates.push_back(sc);
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(std::string const &path)
{
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (json::exception const &e) {
    throw ValidationError("malformed config '" + path + "': " + e.what());
  }
  try {
    return parse_config(doc);
  } catch (json::exception const &e) {
    throw ValidationError("invalid config '" + path + "': " + e.what());
  }
}

json to_json(ExperimentConfig const &cfg)
{
  json exp;
  exp["kind"] = std::string(to_string(cfg.experiment));
  exp["seed"] = cfg.seed;
  exp["shots"] = cfg.shots;
  exp["exact"] = cfg.exact;
  exp["replicas"] = cfg.replicas;
  exp["r_values"] = cfg.r_values;
  exp["chain_lengths"] = cfg.chain_lengths;
  exp["sequences"] = json::array();
  for (auto k : cfg.sequences) exp["sequences"].push_back(std::string(seq::to_string(k)));
  exp["repetitions"] = json::object();
  for (auto const &[k, r] : cfg.repetitions) exp["repetitions"][std::string(seq::to_string(k))] = r;
  exp["ldd_n_gates"] = cfg.ldd_n_gates;
  exp["spam"] = cfg.spam;
  exp["spsa"] = {{"max_iterations", cfg.spsa.max_iterations},       {"perturbation_c", cfg.spsa.perturbation_c},
                 {"alpha", cfg.spsa.alpha},                         {"gamma", cfg.spsa.gamma},
                 {"stability_A", cfg.spsa.stability_A},             {"calibration_samples", cfg.spsa.calibration_samples},
                 {"target_first_step", cfg.spsa.target_first_step}, {"learning_rate", cfg.spsa.learning_rate ? json(*cfg.spsa.learning_rate) : json(nullptr)}};
  exp["robustness"] = {{"r", cfg.robustness_r}, {"epsilons", cfg.epsilons}, {"samples_per_eps", cfg.samples_per_eps}};
  if (!cfg.candidates.empty()) {
    exp["candidates"] = json::array();
    for (auto const &c : cfg.candidates) {
      json jc{{"label", c.label}, {"mcm", mcm_json(c.mcm)}};
      if (c.neighbor_params) jc["neighbor"] = qubit_json(*c.neighbor_params);
      exp["candidates"].push_back(jc);
    }
  }

  json nz;
  nz["trotter_slices"] = cfg.noise.trotter_slices;
  nz["default_qubit"] = qubit_json(cfg.noise.default_qubit);
  nz["qubits"] = json::array();
  for (auto const &q : cfg.noise.qubits) nz["qubits"].push_back(qubit_json(q));
  nz["mcm"] = mcm_json(cfg.noise.mcm);
  nz["pulse"] = {{"over_rotation", cfg.noise.pulse.over_rotation}, {"phase_error", cfg.noise.pulse.phase_error}};

  json dur{{"dt_ns", cfg.durations.dt_ns}, {"x_dt", cfg.durations.x_dt}, {"sx_dt", cfg.durations.sx_dt},
           {"h_dt", cfg.durations.h_dt},   {"cx_dt", cfg.durations.cx_dt}};
  return {{"experiment", exp}, {"noise", nz}, {"durations", dur}};
}

std::string config_hash(ExperimentConfig const &cfg)
{
  std::string const text = to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

} // namespace ddlab::harness
