#include "puamo/winding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "puamo/error.hpp"

namespace puamo {

namespace {

constexpr int kMaxRefine = 4;

double fold(double d) {
  // to (-pi, pi]
  d = std::remainder(d, kTwoPi);
  if (d <= -kPi) d += kTwoPi;
  return d;
}

struct PhaseEval {
  const WalkParams& params;
  cplx z;
  double eps;
  long n_cells;
  double min_pivot = std::numeric_limits<double>::infinity();

  // arg det(W_N(theta + i eps) - z) from LU pivots and the permutation sign
  double operator()(double theta) {
    WalkParams p = params;
    p.theta = theta;
    p.eps = eps;
    Eigen::MatrixXcd a = build_walk(p, n_cells).matrix;
    a.diagonal().array() -= z;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    const Eigen::MatrixXcd& u = lu.matrixLU();
    double ph = lu.permutationP().determinant() < 0 ? kPi : 0.0;
    double scale = 0.0, smallest = std::numeric_limits<double>::infinity();
    for (long k = 0; k < u.rows(); ++k) {
      const double m = std::abs(u(k, k));
      scale = std::max(scale, m);
      smallest = std::min(smallest, m);
      ph += std::arg(u(k, k));
    }
    min_pivot = std::min(min_pivot, smallest);
    if (!(smallest > 1e-12 * std::max(1.0, scale)))
      throw NumericError("winding: z too close to spectrum");
    return ph;
  }
};

// Accumulated folded increments over [t0, t1]; bisects while any step exceeds pi/2.
double accumulate(PhaseEval& f, double t0, double f0, double t1, double f1, int depth,
                  long& refinements) {
  const double d = fold(f1 - f0);
  if (std::abs(d) <= kPi / 2) return d;
  if (depth >= kMaxRefine) throw NumericError("winding: insufficient theta resolution");
  ++refinements;
  const double tm = 0.5 * (t0 + t1);
  const double fm = f(tm);
  return accumulate(f, t0, f0, tm, fm, depth + 1, refinements) +
         accumulate(f, tm, fm, t1, f1, depth + 1, refinements);
}

}  // namespace

WindingResult winding_number(cplx z, double eps, const WalkParams& params, long n_cells,
                             long M_theta) {
  if (M_theta < 4) throw DomainError("winding: M_theta must be at least 4");
  if (!params.freq.ring_frequency(n_cells).commensurate)
    throw DomainError("winding: N must be a convergent denominator");
  PhaseEval f{params, z, eps, n_cells};
  WindingResult r;
  r.M_theta = M_theta;
  r.n_cells = n_cells;
  r.z = z;
  r.eps = eps;

  std::vector<double> ph(M_theta);
  for (long j = 0; j < M_theta; ++j) ph[j] = f(static_cast<double>(j) / static_cast<double>(M_theta));

  double total = 0.0;
  for (long j = 0; j < M_theta; ++j) {
    const double t0 = static_cast<double>(j) / static_cast<double>(M_theta);
    const double t1 = static_cast<double>(j + 1) / static_cast<double>(M_theta);
    // theta = 1 is the same operator as theta = 0
    const double f1 = j + 1 < M_theta ? ph[j + 1] : ph[0];
    total += accumulate(f, t0, ph[j], t1, f1, 0, r.refinements);
  }
  r.raw = total / (kTwoPi * static_cast<double>(n_cells));
  r.value = static_cast<int>(std::lround(r.raw));
  r.residual = std::abs(r.raw - r.value);
  r.min_pivot = f.min_pivot;
  return r;
}

GapPoints gap_points(const SpectrumResult& spec, long count, double min_width) {
  GapPoints g;
  std::vector<double> ang;
  for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k) {
    const cplx w = spec.eigenvalues[k];
    const bool on = spec.on_circle.size() == spec.eigenvalues.size()
                        ? static_cast<bool>(spec.on_circle[k])
                        : std::abs(std::abs(w) - 1.0) <= spec.tol_circle;
    if (on) ang.push_back(std::arg(w));
  }
  if (ang.empty()) {
    g.warnings.push_back("no on-circle eigenvalues");
    return g;
  }
  std::sort(ang.begin(), ang.end());
  const std::size_t m = ang.size();
  std::vector<double> width(m), mid(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double a = ang[k];
    const double b = k + 1 < m ? ang[k + 1] : ang[0] + kTwoPi;
    width[k] = b - a;
    mid[k] = 0.5 * (a + b);
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return width[a] > width[b]; });
  for (std::size_t k : order) {
    if (static_cast<long>(g.points.size()) >= count) break;
    if (width[k] < min_width) break;
    g.points.push_back(std::polar(1.0, mid[k]));
    g.widths.push_back(width[k]);
  }
  if (static_cast<long>(g.points.size()) < count)
    g.warnings.push_back("only " + std::to_string(g.points.size()) + " gaps wider than " +
                         std::to_string(min_width) + " rad");
  return g;
}

WindingProfile winding_profile(cplx z, const WalkParams& params, long n_cells,
                               const std::vector<double>& eps_grid, long M_theta) {
  WindingProfile p;
  for (double e : eps_grid) p.results.push_back(winding_number(z, e, params, n_cells, M_theta));
  for (std::size_t k = 1; k < p.results.size(); ++k) {
    if (p.results[k - 1].value == 0 && p.results[k].value != 0) {
      p.jump_location = 0.5 * (p.results[k - 1].eps + p.results[k].eps);
      break;
    }
  }
  return p;
}

}  // namespace puamo
