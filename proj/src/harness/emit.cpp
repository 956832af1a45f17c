#include "ddlab/harness/emit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>

namespace ddlab::harness {

using nlohmann::json;

namespace {

std::string num(double v, char const *fmt = "%.10g")
{
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), fmt, v);
  return buf.data();
}

void write_file(std::filesystem::path const &path, std::string const &text)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string xml_escape(std::string const &s)
{
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

} // namespace

std::string results_csv(ExperimentResult const &result)
{
  std::string out = "sequence,sweep_value,median,lower_quartile,upper_quartile\n";
  for (auto const &r : result.rows)
    out += r.sequence + ',' + num(r.sweep_value) + ',' + num(r.fidelity.median) + ',' + num(r.fidelity.lower) + ',' + num(r.fidelity.upper) + '\n';
  return out;
}

std::string params_csv(ExperimentResult const &result)
{
  constexpr double pi = std::numbers::pi;
  std::string out = "sweep_value,theta_over_pi,phi_over_pi,lambda_over_pi\n";
  for (auto const &[sweep, trace] : result.traces) {
    auto const &x = trace.final_params;
    out += num(sweep) + ',' + num(x.theta / pi) + ',' + num(x.phi / pi) + ',' + num(x.lambda / pi) + '\n';
  }
  return out;
}

std::string scan_csv(ExperimentResult const &result)
{
  std::string out = "rank,label,fidelity_mcm,fidelity_delay,gap,flagged\n";
  for (auto const &s : result.scan)
    out += std::to_string(s.rank) + ',' + std::to_string(s.label) + ',' + num(s.fidelity_mcm) + ',' + num(s.fidelity_delay) + ',' + num(s.gap) + ',' +
           (s.flagged ? "1" : "0") + '\n';
  return out;
}

json meta_json(ExperimentResult const &result)
{
  json rows = json::array();
  double total = 0;
  for (auto const &r : result.rows) {
    rows.push_back({{"sequence", r.sequence}, {"sweep_value", r.sweep_value}, {"wall_time_s", r.wall_time_s}});
    total += r.wall_time_s;
  }
  return {{"tool", "ddlab"},
          {"tool_version", result.tool_version},
          {"experiment", std::string(to_string(result.kind))},
          {"sweep", result.sweep_name},
          {"seed", result.config.seed},
          {"config_hash", result.config_hash},
          {"config", to_json(result.config)},
          {"diagnostics", result.diagnostics},
          {"wall_time_s", total},
          {"row_wall_times", rows}};
}

std::string plot_svg(ExperimentResult const &result)
{
  constexpr double W = 720, H = 440, left = 70, right = 150, top = 30, bottom = 50;
  constexpr double pw = W - left - right, ph = H - top - bottom;
  static constexpr std::array<char const *, 10> palette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                                         "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

  // Series keep first-appearance order.
  std::vector<std::string> names;
  std::map<std::string, std::vector<ResultRow const *>> series;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (auto const &r : result.rows) {
    if (!series.count(r.sequence)) names.push_back(r.sequence);
    series[r.sequence].push_back(&r);
    if (first) {
      xmin = xmax = r.sweep_value;
      ymin = r.fidelity.lower;
      ymax = r.fidelity.upper;
      first = false;
    }
    xmin = std::min(xmin, r.sweep_value);
    xmax = std::max(xmax, r.sweep_value);
    ymin = std::min(ymin, r.fidelity.lower);
    ymax = std::max(ymax, r.fidelity.upper);
  }
  if (xmax - xmin < 1e-12) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin < 1e-6) ymin -= 0.05, ymax += 0.05;
  double const pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto X = [&](double v) { return left + pw * (v - xmin) / (xmax - xmin); };
  auto Y = [&](double v) { return top + ph * (1.0 - (v - ymin) / (ymax - ymin)); };
  auto f2 = [](double v) { return num(v, "%.2f"); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f2(W) + "\" height=\"" + f2(H) + "\" viewBox=\"0 0 " + f2(W) + ' ' + f2(H) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<rect x=\"" + f2(left) + "\" y=\"" + f2(top) + "\" width=\"" + f2(pw) + "\" height=\"" + f2(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double const xv = xmin + (xmax - xmin) * k / 4.0, yv = ymin + (ymax - ymin) * k / 4.0;
    s += "<text x=\"" + f2(X(xv)) + "\" y=\"" + f2(top + ph + 18) + "\" font-size=\"11\" text-anchor=\"middle\">" + num(xv, "%.3g") + "</text>\n";
    s += "<text x=\"" + f2(left - 6) + "\" y=\"" + f2(Y(yv) + 4) + "\" font-size=\"11\" text-anchor=\"end\">" + num(yv, "%.3f") + "</text>\n";
  }
  s += "<text x=\"" + f2(left + pw / 2) + "\" y=\"" + f2(H - 10) + "\" font-size=\"13\" text-anchor=\"middle\">" + xml_escape(result.sweep_name) + "</text>\n";
  s += "<text x=\"16\" y=\"" + f2(top + ph / 2) + "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + f2(top + ph / 2) +
       ")\">fidelity</text>\n";

  for (std::size_t i = 0; i < names.size(); ++i) {
    auto const &name = names[i];
    std::string const color = palette[i % palette.size()];
    auto pts = series[name];
    std::stable_sort(pts.begin(), pts.end(), [](auto const *a, auto const *b) { return a->sweep_value < b->sweep_value; });
    s += "<g stroke=\"" + color + "\" fill=\"" + color + "\">\n";
    std::string poly;
    for (auto const *r : pts) {
      double const x = X(r->sweep_value);
      poly += f2(x) + ',' + f2(Y(r->fidelity.median)) + ' ';
      s += "<line x1=\"" + f2(x) + "\" y1=\"" + f2(Y(r->fidelity.lower)) + "\" x2=\"" + f2(x) + "\" y2=\"" + f2(Y(r->fidelity.upper)) + "\"/>\n";
      s += "<circle cx=\"" + f2(x) + "\" cy=\"" + f2(Y(r->fidelity.median)) + "\" r=\"3\"/>\n";
    }
    if (!poly.empty()) poly.pop_back();
    s += "<polyline fill=\"none\" points=\"" + poly + "\"/>\n";
    double const ly = top + 14 + 18 * static_cast<double>(i);
    s += "<line x1=\"" + f2(left + pw + 12) + "\" y1=\"" + f2(ly) + "\" x2=\"" + f2(left + pw + 32) + "\" y2=\"" + f2(ly) + "\"/>\n";
    s += "<text x=\"" + f2(left + pw + 38) + "\" y=\"" + f2(ly + 4) + "\" font-size=\"12\" stroke=\"none\">" + xml_escape(name) + "</text>\n";
    s += "</g>\n";
  }
  s += "</svg>\n";
  return s;
}

void emit_results(ExperimentResult const &result, std::filesystem::path const &out_dir)
{
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) throw IoError("cannot create output directory '" + out_dir.string() + "'");
  write_file(out_dir / "results.csv", results_csv(result));
  write_file(out_dir / "params.csv", params_csv(result));
  write_file(out_dir / "meta.json", meta_json(result).dump(2) + '\n');
  write_file(out_dir / "plot.svg", plot_svg(result));
  if (!result.scan.empty()) write_file(out_dir / "scan.csv", scan_csv(result));
  if (!result.traces.empty()) {
    json traces = json::array();
    for (auto const &[sweep, trace] : result.traces) traces.push_back({{"sweep_value", sweep}, {"trace", to_json(trace)}});
    write_file(out_dir / "spsa.json", traces.dump(2) + '\n');
  }
}

} // namespace ddlab::harness
