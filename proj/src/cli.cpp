#include "puamo/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "puamo/error.hpp"
#include "puamo/sweep.hpp"
#include "puamo/winding.hpp"

namespace puamo {

namespace {

using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  double l1 = 0.5, l2 = 0.25, phi = kGoldenPhi, theta = 0.0, eps = 0.0, eta = 0.0;
  long N = 0;
  std::string bc = "periodic";
  std::string out, format = "csv", svg, config;
  int jobs = default_jobs();
  std::uint64_t seed = 1;
  std::vector<std::string> warnings;
};

// config key -> option, so that file values only fill options not given on the command line
using Bindings = std::map<std::string, CLI::Option*>;

void add_common(CLI::App* sub, Common& c, Bindings& b, long default_n) {
  c.N = default_n;
  b["l1"] = sub->add_option("--l1", c.l1, "shift coupling lambda1 in (0,1]");
  b["l2"] = sub->add_option("--l2", c.l2, "coin coupling lambda2 in (0,1]");
  b["phi"] = sub->add_option("--phi", c.phi, "frequency in [0,1]");
  b["theta"] = sub->add_option("--theta", c.theta, "phase");
  b["eps"] = sub->add_option("--eps", c.eps, "imaginary phase part");
  b["eta"] = sub->add_option("--eta", c.eta, "non-reciprocity");
  b["N"] = sub->add_option("--N", c.N, "cells on the ring");
  b["bc"] = sub->add_option("--bc", c.bc, "periodic or open")
                ->check(CLI::IsMember({"periodic", "open"}));
  b["out.path"] = sub->add_option("--out", c.out, "output file (default stdout)");
  b["out.format"] = sub->add_option("--format", c.format, "csv or json")
                        ->check(CLI::IsMember({"csv", "json"}));
  b["out.svg"] = sub->add_option("--svg", c.svg, "SVG output file");
  b["jobs"] = sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--config", c.config, "flat key = value config file");
  b["seed"] = sub->add_option("--seed", c.seed, "seed for randomized validation draws");
}

void apply_config(const std::string& path, const Bindings& b) {
  if (path.empty()) return;
  for (const auto& [key, value] : read_config(path)) {
    auto it = b.find(key);
    if (it == b.end()) throw UsageError("unknown config key '" + key + "'");
    if (it->second->count() == 0) {
      it->second->add_result(value);
      it->second->run_callback();
    }
  }
}

WalkParams params_of(const Common& c) {
  return WalkParams::make(c.l1, c.l2, c.phi, c.theta, c.eps, c.eta);
}

// snap N to a convergent denominator when the frequency is incommensurate with it
void resolve_n(Common& c) {
  if (c.N < 2) throw UsageError("--N must be at least 2");
  FrequencySpec f(c.phi);
  if (!f.ring_frequency(c.N).commensurate) {
    const long q = f.nearest_denominator(c.N);
    if (q < 2) throw UsageError("no usable convergent denominator near N");
    c.warnings.push_back("N=" + std::to_string(c.N) + " snapped to convergent denominator " +
                         std::to_string(q));
    c.N = q;
  }
}

json meta_of(const std::string& command, const Common& c) {
  json m;
  m["command"] = command;
  m["l1"] = c.l1;
  m["l2"] = c.l2;
  m["phi"] = c.phi;
  m["theta"] = c.theta;
  m["eps"] = c.eps;
  m["eta"] = c.eta;
  m["N"] = c.N;
  m["bc"] = c.bc;
  m["jobs"] = c.jobs;
  m["seed"] = c.seed;
  m["warnings"] = c.warnings;
  return m;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<json>> rows;
};

std::string cell_text(const json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string render(const Table& t, const std::string& format, json meta) {
  std::ostringstream os;
  if (format == "json") {
    json doc;
    doc["meta"] = std::move(meta);
    json res = json::array();
    for (const auto& r : t.rows) {
      json o;
      for (std::size_t k = 0; k < t.header.size(); ++k) o[t.header[k]] = r[k];
      res.push_back(std::move(o));
    }
    doc["results"] = std::move(res);
    os << doc.dump(2) << '\n';
    return os.str();
  }
  for (std::size_t k = 0; k < t.header.size(); ++k) os << (k ? "," : "") << t.header[k];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << cell_text(r[k]);
    os << '\n';
  }
  return os.str();
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path);
  f << text;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("bad number '" + item + "' in list");
    }
  }
  return v;
}

// ---- subcommands ----

int cmd_spectrum(Common& c, double tol, std::ostream& out) {
  resolve_n(c);
  if (c.N > 2048) throw UsageError("--N above 2048");
  WalkParams p = params_of(c);
  SpectrumResult s = eigendecompose(build_walk(p, c.N, parse_boundary(c.bc)), true, tol);
  Table t{{"re", "im", "abs", "arg", "fractal_dim", "on_circle"}, {}};
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
    const cplx z = s.eigenvalues[k];
    t.rows.push_back({z.real(), z.imag(), std::abs(z), std::arg(z), s.fractal_dims[k],
                      static_cast<bool>(s.on_circle[k])});
  }
  emit(render(t, c.format, meta_of("spectrum", c)), c.out, out);
  if (!c.svg.empty())
    emit(svg_scatter(s.eigenvalues, s.fractal_dims, "spectrum N=" + std::to_string(c.N)), c.svg, out);
  return 0;
}

struct GridFlags {
  double eta_min = -0.5, eta_max = 0.5, eps_min = -0.5, eps_max = 0.5;
  long eta_n = 21, eps_n = 21;
};

int cmd_phase_diagram(Common& c, const GridFlags& g, std::ostream& out) {
  resolve_n(c);
  if (g.eta_n < 1 || g.eps_n < 1 || g.eta_n > 128 || g.eps_n > 128)
    throw UsageError("grid sizes must lie in [1,128]");
  WalkParams p = params_of(c);
  SweepGrid grid = phase_diagram(p, linspace(g.eta_min, g.eta_max, g.eta_n),
                                 linspace(g.eps_min, g.eps_max, g.eps_n), c.N,
                                 parse_boundary(c.bc), c.jobs);
  Table t{{"eta", "eps", "mean_fractal_dim", "frac_on_circle", "lyap_left", "lyap_right"}, {}};
  for (std::size_t i = 0; i < grid.axis1.values.size(); ++i)
    for (std::size_t j = 0; j < grid.axis2.values.size(); ++j) {
      const CellResult& r = grid.at(i, j);
      t.rows.push_back({grid.axis1.values[i], grid.axis2.values[j], r.mean_fractal_dim,
                        r.frac_on_circle, r.lyap_left, r.lyap_right});
    }
  emit(render(t, c.format, meta_of("phase-diagram", c)), c.out, out);
  if (!c.svg.empty()) emit(svg_heatmap(grid, "mean fractal dimension"), c.svg, out);
  return 0;
}

int cmd_spectrum_sweep(Common& c, const std::string& axis, const std::string& values,
                       std::ostream& out) {
  resolve_n(c);
  const std::vector<double> sweep = parse_list(values);
  if (sweep.empty()) throw UsageError("empty sweep list");
  WalkParams base = params_of(c);
  const DerivedConstants d = derived_constants(base);
  std::vector<SpectrumResult> specs(sweep.size());
  parallel_for(static_cast<long>(sweep.size()), c.jobs, [&](long k) {
    WalkParams p = base;
    (axis == "eta" ? p.eta : p.eps) = sweep[k];
    specs[k] = eigendecompose(build_walk(p, c.N, parse_boundary(c.bc)), true);
  });
  Table t{{"sweep_value", "re", "im", "abs", "fractal_dim", "L_sharp_over_2pi", "eps0", "eta0"}, {}};
  for (std::size_t k = 0; k < sweep.size(); ++k)
    for (std::size_t e = 0; e < specs[k].eigenvalues.size(); ++e) {
      const cplx z = specs[k].eigenvalues[e];
      t.rows.push_back({sweep[k], z.real(), z.imag(), std::abs(z), specs[k].fractal_dims[e],
                        d.L_sharp / kTwoPi, d.eps0, d.eta0});
    }
  emit(render(t, c.format, meta_of("spectrum-sweep", c)), c.out, out);
  return 0;
}

struct WindingFlags {
  std::string eps_list = "0,0.05,0.13,0.15,0.18,0.25";
  long M = 2048;
  long gap_rank = 0;
  double z_arg = std::nan("");
  double select_eps = std::nan("");
};

int cmd_winding(Common& c, const WindingFlags& w, std::ostream& out) {
  resolve_n(c);
  const std::vector<double> grid = parse_list(w.eps_list);
  if (grid.empty()) throw UsageError("empty eps list");
  WalkParams p = params_of(c);
  cplx z;
  if (!std::isnan(w.z_arg)) {
    z = std::polar(1.0, w.z_arg);
  } else {
    WalkParams p0 = p;
    p0.eps = 0.0;
    SpectrumResult s = eigendecompose(build_walk(p0, c.N), false);
    GapPoints gp = gap_points(s, 2 * c.N);
    if (gp.points.empty()) throw NumericError("no spectral gap found");
    if (!std::isnan(w.select_eps)) {
      // first gap (widest first) whose winding at select_eps is nonzero
      z = gp.points.front();
      for (const cplx& cand : gp.points) {
        WindingResult r = winding_number(cand, w.select_eps, p, c.N, w.M);
        if (r.trusted() && r.value != 0) {
          z = cand;
          break;
        }
      }
    } else {
      if (w.gap_rank < 0 || w.gap_rank >= static_cast<long>(gp.points.size()))
        throw UsageError("--gap-rank out of range");
      z = gp.points[w.gap_rank];
    }
  }
  std::vector<WindingResult> res(grid.size());
  parallel_for(static_cast<long>(grid.size()), c.jobs,
               [&](long k) { res[k] = winding_number(z, grid[k], p, c.N, w.M); });
  Table t{{"eps", "z_re", "z_im", "winding_raw", "winding_int", "residual"}, {}};
  for (const auto& r : res)
    t.rows.push_back({r.eps, r.z.real(), r.z.imag(), r.raw, r.value, r.residual});
  emit(render(t, c.format, meta_of("winding", c)), c.out, out);
  return 0;
}

struct LyapFlags {
  double z_re = std::nan(""), z_im = 0.0;
  long steps = 100000, phases = 32;
};

int cmd_lyapunov(Common& c, const LyapFlags& f, std::ostream& out) {
  resolve_n(c);
  WalkParams p = params_of(c);
  cplx z;
  if (!std::isnan(f.z_re)) {
    z = cplx(f.z_re, f.z_im);
  } else {
    WalkParams p0 = p;
    p0.eta = 0.0;
    z = eigenvalues(build_walk(p0, c.N).matrix).front();
  }
  LyapunovOptions o;
  o.n_steps = f.steps;
  o.n_phases = f.phases;
  const ClosedFormLyapunov cf = lyapunov_closed_form(p);
  Table t{{"direction", "z_re", "z_im", "numeric", "std_error", "closed_form"}, {}};
  for (Direction d : {Direction::left, Direction::right}) {
    o.direction = d;
    LyapunovEstimate e = lyapunov_numeric(z, p, o);
    t.rows.push_back({d == Direction::left ? "left" : "right", z.real(), z.imag(), e.value,
                      e.std_error, d == Direction::left ? cf.left : cf.right});
  }
  emit(render(t, c.format, meta_of("lyapunov", c)), c.out, out);
  return 0;
}

int cmd_duality(Common& c, const std::string& sizes, std::ostream& out) {
  WalkParams p = params_of(c);
  Table t{{"N", "spectral_distance", "pass"}, {}};
  bool ok = true;
  for (double nd : parse_list(sizes)) {
    const long n = std::lround(nd);
    const double d = spectral_distance(eigenvalues(build_walk(p, n).matrix),
                                       eigenvalues(build_dual_walk(p, n).matrix));
    ok = ok && d < 1e-8;
    t.rows.push_back({n, d, d < 1e-8});
  }
  emit(render(t, c.format, meta_of("duality-check", c)), c.out, out);
  return ok ? 0 : 1;
}

int cmd_evolve(Common& c, long steps, long record, std::ostream& out) {
  resolve_n(c);
  WalkParams p = params_of(c);
  Evolution ev = evolve(p, StateVector::delta(c.N, c.N / 2, +1), steps, parse_boundary(c.bc), record);
  for (const auto& w : ev.warnings) c.warnings.push_back(w);
  Table t{{"step", "second_moment", "participation"}, {}};
  for (const auto& s : ev.samples) t.rows.push_back({s.step, s.second_moment, s.participation});
  emit(render(t, c.format, meta_of("evolve", c)), c.out, out);
  return 0;
}

int cmd_validate(Common& c, bool quick, double perturb, std::ostream& out) {
  ValidationConfig cfg;
  cfg.quick = quick;
  cfg.perturb = perturb;
  cfg.seed = c.seed;
  const auto entries = run_validation(cfg);
  json doc;
  doc["meta"] = meta_of("validate", c);
  doc["meta"]["quick"] = quick;
  doc["meta"]["perturb"] = perturb;
  json res = json::array();
  bool all = true;
  for (const auto& e : entries) {
    all = all && e.pass;
    json o;
    o["name"] = e.name;
    o["measured"] = std::isfinite(e.measured) ? json(e.measured) : json("inf");
    o["threshold"] = e.threshold;
    o["pass"] = e.pass;
    res.push_back(std::move(o));
  }
  doc["results"] = std::move(res);
  emit(doc.dump(2) + "\n", c.out, out);
  return all ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"pseudo-unitary almost-Mathieu walk toolkit"};
  app.require_subcommand(1);

  Common c;
  Bindings b;
  double tol = 1e-6;
  GridFlags grid;
  std::string sweep_axis = "eps", sweep_values;
  WindingFlags wf;
  LyapFlags lf;
  std::string sizes = "8,13,21,34";
  long ev_steps = 200, ev_record = 1;
  bool quick = false;
  double perturb = 0.0;

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of one ring");
  auto* phase = app.add_subcommand("phase-diagram", "(eta, eps) grid of cell observables");
  auto* sweep = app.add_subcommand("spectrum-sweep", "spectra along eps or eta");
  auto* winding = app.add_subcommand("winding", "spectral winding numbers");
  auto* lyap = app.add_subcommand("lyapunov", "numeric and closed-form Lyapunov exponents");
  auto* dual = app.add_subcommand("duality-check", "compare spectra of W and its dual");
  auto* evo = app.add_subcommand("evolve", "time evolution diagnostics");
  auto* val = app.add_subcommand("validate", "run the invariant suite");

  // each subcommand gets its own copy of the common flags; only one runs
  std::map<CLI::App*, Bindings> binds;
  const std::pair<CLI::App*, long> defaults[] = {{spectrum, 610}, {phase, 89}, {sweep, 233},
                                                 {winding, 89},   {lyap, 233}, {dual, 21},
                                                 {evo, 1024},     {val, 21}};
  std::map<CLI::App*, Common> commons;
  for (const auto& [sub, n] : defaults) add_common(sub, commons[sub], binds[sub], n);

  spectrum->add_option("--tol", tol, "unit-circle tolerance")->check(CLI::PositiveNumber);
  binds[phase]["grid.eta_min"] = phase->add_option("--eta-min", grid.eta_min);
  binds[phase]["grid.eta_max"] = phase->add_option("--eta-max", grid.eta_max);
  binds[phase]["grid.eta_n"] = phase->add_option("--eta-n", grid.eta_n);
  binds[phase]["grid.eps_min"] = phase->add_option("--eps-min", grid.eps_min);
  binds[phase]["grid.eps_max"] = phase->add_option("--eps-max", grid.eps_max);
  binds[phase]["grid.eps_n"] = phase->add_option("--eps-n", grid.eps_n);
  sweep->add_option("--sweep", sweep_axis, "eps or eta")->check(CLI::IsMember({"eps", "eta"}));
  sweep->add_option("--values", sweep_values, "comma-separated sweep values")->required();
  winding->add_option("--eps-list", wf.eps_list, "comma-separated eps values");
  winding->add_option("--M", wf.M, "theta samples")->check(CLI::PositiveNumber);
  winding->add_option("--gap-rank", wf.gap_rank, "gap index, widest first");
  winding->add_option("--z-arg", wf.z_arg, "explicit z = exp(i arg)");
  winding->add_option("--select-eps", wf.select_eps,
                      "pick the widest gap with nonzero winding at this eps");
  lyap->add_option("--z-re", lf.z_re);
  lyap->add_option("--z-im", lf.z_im);
  lyap->add_option("--steps", lf.steps)->check(CLI::PositiveNumber);
  lyap->add_option("--phases", lf.phases)->check(CLI::PositiveNumber);
  dual->add_option("--sizes", sizes, "comma-separated ring sizes");
  evo->add_option("--steps", ev_steps)->check(CLI::NonNegativeNumber);
  evo->add_option("--record", ev_record)->check(CLI::PositiveNumber);
  val->add_flag("--quick", quick, "sizes {8,13,21}");
  val->add_option("--perturb", perturb, "noise amplitude injected into W_N");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  Common& cc = commons[sub];
  auto dispatch = [&]() -> int {
    apply_config(cc.config, binds[sub]);
    if (sub == spectrum) return cmd_spectrum(cc, tol, out);
    if (sub == phase) return cmd_phase_diagram(cc, grid, out);
    if (sub == sweep) return cmd_spectrum_sweep(cc, sweep_axis, sweep_values, out);
    if (sub == winding) return cmd_winding(cc, wf, out);
    if (sub == lyap) return cmd_lyapunov(cc, lf, out);
    if (sub == dual) return cmd_duality(cc, sizes, out);
    if (sub == evo) return cmd_evolve(cc, ev_steps, ev_record, out);
    return cmd_validate(cc, quick, perturb, out);
  };
  try {
    const int rc = dispatch();
    for (const auto& w : cc.warnings) err << "warning: " << w << '\n';
    return rc;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace puamo
