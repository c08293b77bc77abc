#include "puamo/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "puamo/error.hpp"

namespace puamo {

std::vector<double> linspace(double a, double b, long n) {
  if (n < 1) throw DomainError("linspace: need at least one point");
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (long k = 0; k < n; ++k)
    v[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  return v;
}

int default_jobs() {
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : static_cast<int>(h);
}

void parallel_for(long n, int jobs, const std::function<void(long)>& fn) {
  if (n <= 0) return;
  const int workers = static_cast<int>(std::max<long>(1, std::min<long>(jobs, n)));
  if (workers == 1) {
    for (long k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (long k = next++; k < n && !failed; k = next++) {
        try {
          fn(k);
        } catch (...) {
          if (!failed.exchange(true)) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

CellResult evaluate_cell(const WalkParams& params, long n_cells, Boundary bc, double tol_circle) {
  SpectrumResult s = eigendecompose(build_walk(params, n_cells, bc), true, tol_circle);
  CellResult c;
  c.n_eigen = static_cast<long>(s.eigenvalues.size());
  double sum = 0.0;
  for (double g : s.fractal_dims) sum += g;
  c.mean_fractal_dim = sum / static_cast<double>(c.n_eigen);
  long on = 0;
  for (bool b : s.on_circle) on += b ? 1 : 0;
  c.frac_on_circle = static_cast<double>(on) / static_cast<double>(c.n_eigen);
  const ClosedFormLyapunov cf = lyapunov_closed_form(params);
  c.lyap_left = cf.left;
  c.lyap_right = cf.right;
  return c;
}

SweepGrid phase_diagram(const WalkParams& base, const std::vector<double>& etas,
                        const std::vector<double>& epss, long n_cells, Boundary bc, int jobs) {
  if (etas.empty() || epss.empty()) throw DomainError("phase_diagram: empty axis");
  SweepGrid g;
  g.axis1 = {"eta", etas};
  g.axis2 = {"eps", epss};
  g.cells.resize(etas.size() * epss.size());
  const long ne = static_cast<long>(epss.size());
  parallel_for(static_cast<long>(g.cells.size()), jobs, [&](long k) {
    WalkParams p = base;
    p.eta = etas[k / ne];
    p.eps = epss[k % ne];
    g.cells[k] = evaluate_cell(p, n_cells, bc);
  });
  return g;
}

bool closed_form_delocalized(const CellResult& c) {
  return std::min(c.lyap_left, c.lyap_right) <= 0.0;
}

MaskComparison compare_delocalized_mask(const SweepGrid& grid) {
  MaskComparison m;
  const long n1 = static_cast<long>(grid.axis1.values.size());
  const long n2 = static_cast<long>(grid.axis2.values.size());
  std::vector<double> vals;
  for (const auto& c : grid.cells) vals.push_back(c.mean_fractal_dim);
  std::vector<double> sorted = vals;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t h = sorted.size() / 2;
  m.median = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
  for (const auto& c : grid.cells) {
    m.empirical.push_back(c.mean_fractal_dim > m.median);
    m.closed.push_back(closed_form_delocalized(c));
  }
  // cells adjacent to a change of the closed-form mask
  std::vector<std::pair<long, long>> boundary;
  for (long i = 0; i < n1; ++i)
    for (long j = 0; j < n2; ++j) {
      const bool v = m.closed[i * n2 + j];
      const bool edge = (i + 1 < n1 && m.closed[(i + 1) * n2 + j] != v) ||
                        (i > 0 && m.closed[(i - 1) * n2 + j] != v) ||
                        (j + 1 < n2 && m.closed[i * n2 + j + 1] != v) ||
                        (j > 0 && m.closed[i * n2 + j - 1] != v);
      if (edge) boundary.emplace_back(i, j);
    }
  for (long i = 0; i < n1; ++i)
    for (long j = 0; j < n2; ++j) {
      if (m.empirical[i * n2 + j] == m.closed[i * n2 + j]) continue;
      ++m.mismatches;
      long best = std::max(n1, n2);
      for (const auto& [bi, bj] : boundary)
        best = std::min(best, std::max(std::labs(bi - i), std::labs(bj - j)));
      m.max_boundary_distance = std::max(m.max_boundary_distance, best);
    }
  return m;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

namespace {

// viridis-like ramp
std::string color_of(double t) {
  static const double anchors[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  if (!std::isfinite(t)) t = 0.0;
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int k = std::min(3, static_cast<int>(t));
  const double f = t - k;
  char buf[16];
  int rgb[3];
  for (int c = 0; c < 3; ++c)
    rgb[c] = static_cast<int>(std::lround(anchors[k][c] + f * (anchors[k + 1][c] - anchors[k][c])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

}  // namespace

std::string svg_scatter(const std::vector<cplx>& z, const std::vector<double>& color,
                        const std::string& title) {
  const double size = 480, pad = 40;
  double r = 1.2;
  for (const cplx& w : z) r = std::max(r, 1.05 * std::abs(w));
  auto sx = [&](double x) { return pad + (x + r) / (2 * r) * (size - 2 * pad); };
  auto sy = [&](double y) { return size - pad - (y + r) / (2 * r) * (size - 2 * pad); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << pad << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title
     << "</text>\n";
  os << "<line x1=\"" << sx(-r) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(r) << "\" y2=\"" << sy(0)
     << "\" stroke=\"#999\"/>\n";
  os << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(-r) << "\" x2=\"" << sx(0) << "\" y2=\"" << sy(r)
     << "\" stroke=\"#999\"/>\n";
  os << "<circle cx=\"" << sx(0) << "\" cy=\"" << sy(0) << "\" r=\"" << fixed(sx(1) - sx(0))
     << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double c = k < color.size() ? color[k] : 0.0;
    os << "<circle cx=\"" << fixed(sx(z[k].real())) << "\" cy=\"" << fixed(sy(z[k].imag()))
       << "\" r=\"2\" fill=\"" << color_of(c) << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_heatmap(const SweepGrid& grid, const std::string& title) {
  const long n1 = static_cast<long>(grid.axis1.values.size());
  const long n2 = static_cast<long>(grid.axis2.values.size());
  const double pad = 50, w = 480, h = 480;
  const double cw = w / static_cast<double>(n2), ch = h / static_cast<double>(n1);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w + 2 * pad << "\" height=\""
     << h + 2 * pad << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << pad << "\" y=\"30\" font-family=\"sans-serif\" font-size=\"14\">" << title
     << "</text>\n";
  // axis2 runs left to right, axis1 bottom to top
  auto x0 = [&](long j) { return pad + static_cast<double>(j) * cw; };
  auto y0 = [&](long i) { return pad + h - static_cast<double>(i + 1) * ch; };
  for (long i = 0; i < n1; ++i)
    for (long j = 0; j < n2; ++j)
      os << "<rect x=\"" << fixed(x0(j)) << "\" y=\"" << fixed(y0(i)) << "\" width=\"" << fixed(cw)
         << "\" height=\"" << fixed(ch) << "\" fill=\"" << color_of(grid.at(i, j).mean_fractal_dim)
         << "\"/>\n";
  // closed-form boundary: edges between cells of different closed-form mask
  for (long i = 0; i < n1; ++i)
    for (long j = 0; j < n2; ++j) {
      const bool v = closed_form_delocalized(grid.at(i, j));
      if (j + 1 < n2 && closed_form_delocalized(grid.at(i, j + 1)) != v)
        os << "<line x1=\"" << fixed(x0(j + 1)) << "\" y1=\"" << fixed(y0(i)) << "\" x2=\""
           << fixed(x0(j + 1)) << "\" y2=\"" << fixed(y0(i) + ch)
           << "\" stroke=\"red\" stroke-width=\"2\"/>\n";
      if (i + 1 < n1 && closed_form_delocalized(grid.at(i + 1, j)) != v)
        os << "<line x1=\"" << fixed(x0(j)) << "\" y1=\"" << fixed(y0(i)) << "\" x2=\""
           << fixed(x0(j) + cw) << "\" y2=\"" << fixed(y0(i))
           << "\" stroke=\"red\" stroke-width=\"2\"/>\n";
    }
  os << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << w << "\" height=\"" << h
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << pad + w / 2 << "\" y=\"" << h + pad + 30
     << "\" font-family=\"sans-serif\" font-size=\"12\">" << grid.axis2.name << " ["
     << fixed(grid.axis2.values.front()) << ", " << fixed(grid.axis2.values.back()) << "]</text>\n";
  os << "<text x=\"10\" y=\"" << pad + h / 2 << "\" font-family=\"sans-serif\" font-size=\"12\">"
     << grid.axis1.name << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

Config read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file " + path);
  Config c;
  std::string line;
  long lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError(path + ":" + std::to_string(lineno) + ": expected key = value");
    c[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return c;
}

namespace {

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform(double a, double b) {
    return a < b ? std::uniform_real_distribution<double>(a, b)(gen) : a;
  }
};

Eigen::MatrixXcd noisy(Eigen::MatrixXcd m, double amp, Rng& rng) {
  if (amp <= 0.0) return m;
  for (long j = 0; j < m.cols(); ++j)
    for (long i = 0; i < m.rows(); ++i) m(i, j) += amp * cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  return m;
}

}  // namespace

std::vector<ValidationEntry> run_validation(const ValidationConfig& cfg) {
  std::vector<ValidationEntry> out;
  Rng rng(cfg.seed);
  const std::vector<long> sizes =
      cfg.quick ? std::vector<long>{8, 13, 21} : std::vector<long>{8, 13, 21, 34, 55};
  auto add = [&](std::string name, double measured, double threshold) {
    out.push_back({std::move(name), measured, threshold, measured < threshold});
  };
  auto guarded = [&](const std::string& name, double threshold, const std::function<double()>& f) {
    double v;
    try {
      v = f();
    } catch (const std::exception&) {
      v = std::numeric_limits<double>::infinity();
    }
    add(name, v, threshold);
  };
  auto random_params = [&](double max_shift) {
    return WalkParams::make(rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0), kGoldenPhi,
                            rng.uniform(0.0, 1.0), rng.uniform(-max_shift, max_shift),
                            rng.uniform(-max_shift, max_shift));
  };

  for (long N : sizes) {
    const std::string sfx = "_N" + std::to_string(N);

    guarded("unitarity" + sfx, 1e-12, [&] {
      WalkParams p = random_params(0.0);
      const Eigen::MatrixXcd w = build_walk(p, N).matrix;
      return (w.adjoint() * w - Eigen::MatrixXcd::Identity(2 * N, 2 * N)).cwiseAbs().maxCoeff();
    });

    guarded("matrix_free" + sfx, 1e-12, [&] {
      WalkParams p = random_params(0.1);
      Eigen::VectorXcd v(2 * N);
      for (long k = 0; k < 2 * N; ++k) v[k] = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
      const Eigen::VectorXcd a = build_walk(p, N).matrix * v;
      const Eigen::VectorXcd b = apply_walk(p, StateVector(v)).amplitudes();
      return (a - b).cwiseAbs().maxCoeff();
    });

    guarded("duality" + sfx, 1e-8, [&] {
      WalkParams p = random_params(0.1);
      const auto a = eigenvalues(noisy(build_walk(p, N).matrix, cfg.perturb, rng));
      const auto b = eigenvalues(build_dual_walk(p, N).matrix);
      return spectral_distance(a, b);
    });

    guarded("skin_similarity" + sfx, 1e-8, [&] {
      WalkParams p = random_params(0.0);
      p.eta = 1.5 / (kTwoPi * static_cast<double>(N));
      const RingOperator w = build_walk(p, N);
      return spectral_distance(eigenvalues(w.matrix), eigenvalues(skin_conjugate(w).matrix));
    });

    guarded("pseudo_pairing_realified" + sfx, 1e-6, [&] {
      WalkParams p = random_params(0.15);
      p.theta = 0.25;
      const auto z = eigenvalues(
          noisy(build_walk(p, N, Boundary::periodic, CoinGauge::realified).matrix, cfg.perturb, rng));
      return pairing_residual(z, PairingMode::pseudo);
    });

    guarded("chiral_pairing_timeframe" + sfx, 1e-6, [&] {
      WalkParams p = random_params(0.15);
      p.theta = 0.25;
      const auto z = eigenvalues(noisy(timeframe(p, N).matrix, cfg.perturb, rng));
      return pairing_residual(z, PairingMode::chiral);
    });

    guarded("pt_residual" + sfx, 1e-8, [&] {
      WalkParams p = random_params(0.1);
      p.theta = 0.25;
      p.eta = 0.0;
      return symmetry_residuals(build_walk(p, N, Boundary::periodic, CoinGauge::realified)).pt;
    });

    guarded("cmv_reassembly" + sfx, 1e-12, [&] {
      WalkParams p = random_params(0.1);
      const BlockFactorization f = cmv_factorize(p, N);
      return (f.assemble_l() * f.assemble_m() - build_walk(p, N).matrix).cwiseAbs().maxCoeff();
    });
  }

  guarded("transfer_det_identity", 1e-12, [&] {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      WalkParams p = random_params(0.1);
      const long n = static_cast<long>(rng.uniform(-50, 50));
      const cplx z = std::polar(rng.uniform(0.5, 2.0), rng.uniform(-kPi, kPi));
      const Mat2 q = coin_matrix(n, p);
      const cplx expect = std::exp(2.0 * kTwoPi * p.eta) * q(0, 0) / q(1, 1);
      worst = std::max(worst, std::abs(transfer_matrix(n, z, p).determinant() - expect) /
                                  std::max(1.0, std::abs(expect)));
    }
    return worst;
  });

  guarded("closed_form_duality", 1e-12, [&] {
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      WalkParams p = random_params(0.4);
      WalkParams s = p;
      s.coupling1 = p.coupling2;
      s.coupling2 = p.coupling1;
      s.eta = p.eps;
      s.eps = p.eta;
      worst = std::max(worst, std::abs(lyapunov_closed_form(p).dual_overall -
                                       lyapunov_closed_form(s).overall));
    }
    return worst;
  });
  return out;
}

}  // namespace puamo
