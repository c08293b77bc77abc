#include "puamo/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "puamo/error.hpp"

namespace puamo {

namespace {

bool spectral_less(const cplx& a, const cplx& b) {
  const double aa = std::arg(a), ab = std::arg(b);
  if (aa != ab) return aa < ab;
  return std::abs(a) < std::abs(b);
}

double op_norm(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

void sort_spectrum(std::vector<cplx>& z) { std::sort(z.begin(), z.end(), spectral_less); }

namespace {

struct Geev {
  std::vector<cplx> w;
  Eigen::MatrixXcd vr;
};

Geev run_geev(const Eigen::MatrixXcd& m, bool want_vectors) {
  if (m.rows() != m.cols()) throw DomainError("eigensolver: matrix must be square");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  Eigen::MatrixXcd a = m;  // column-major copy, overwritten by zgeev
  Geev g;
  g.w.resize(n);
  if (want_vectors) g.vr.resize(n, n);
  cplx dummy;
  lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n, a.data(), n,
                                  g.w.data(), &dummy, 1, want_vectors ? g.vr.data() : &dummy, n);
  if (info != 0)
    throw NumericError("zgeev failed, info = " + std::to_string(info) +
                       (info > 0 ? " (QR iteration did not converge)" : " (illegal argument)"));
  return g;
}

}  // namespace

std::vector<cplx> eigenvalues(const Eigen::MatrixXcd& m) {
  std::vector<cplx> w = run_geev(m, false).w;
  sort_spectrum(w);
  return w;
}

SpectrumResult eigendecompose(const RingOperator& op, bool want_vectors, double tol_circle) {
  if (op.dim() > 4096) throw DomainError("eigendecompose: dimension above 4096");
  Geev g = run_geev(op.matrix, want_vectors);
  const long n = static_cast<long>(g.w.size());
  std::vector<long> idx(n);
  std::iota(idx.begin(), idx.end(), 0L);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](long a, long b) { return spectral_less(g.w[a], g.w[b]); });

  SpectrumResult r;
  r.params = op.params;
  r.n_cells = op.n_cells;
  r.tol_circle = tol_circle;
  r.eigenvalues.resize(n);
  for (long k = 0; k < n; ++k) r.eigenvalues[k] = g.w[idx[k]];
  if (want_vectors) {
    Eigen::MatrixXcd v(n, n);
    r.fractal_dims.resize(n);
    for (long k = 0; k < n; ++k) {
      v.col(k) = g.vr.col(idx[k]);
      v.col(k).normalize();
      r.fractal_dims[k] = fractal_dimension(v.col(k));
    }
    r.eigenvectors = std::move(v);
  }
  classify_circle(r, tol_circle);
  return r;
}

double fractal_dimension(const Eigen::VectorXcd& v) {
  const double total = v.squaredNorm();
  if (!(total > 0.0)) throw DomainError("fractal_dimension: zero vector");
  const long d = v.size();
  if (d < 2) return 0.0;
  double ipr = 0.0;
  for (long k = 0; k < d; ++k) {
    const double p = std::norm(v[k]) / total;
    ipr += p * p;
  }
  const double g = -std::log(ipr) / std::log(static_cast<double>(d));
  return std::clamp(g, 0.0, 1.0);
}

CircleCounts classify_circle(const std::vector<cplx>& z, double tol) {
  if (!(tol > 0.0)) throw DomainError("classify_circle: tol must be positive");
  CircleCounts c;
  for (const cplx& w : z) {
    const double dev = std::abs(std::abs(w) - 1.0);
    c.max_radial_dev = std::max(c.max_radial_dev, dev);
    (dev <= tol ? c.on_count : c.off_count) += 1;
  }
  return c;
}

CircleCounts classify_circle(SpectrumResult& spec, double tol) {
  CircleCounts c = classify_circle(spec.eigenvalues, tol);
  spec.tol_circle = tol;
  spec.on_circle.resize(spec.eigenvalues.size());
  for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k)
    spec.on_circle[k] = std::abs(std::abs(spec.eigenvalues[k]) - 1.0) <= tol;
  return c;
}

double pairing_residual(const std::vector<cplx>& z, PairingMode mode, double tol_circle) {
  std::vector<cplx> off;
  for (const cplx& w : z)
    if (std::abs(std::abs(w) - 1.0) > tol_circle) off.push_back(w);
  if (off.size() % 2 != 0)
    throw StructuralViolation("pairing: odd number of off-circle eigenvalues (" +
                              std::to_string(off.size()) + ")");
  std::vector<bool> used(off.size(), false);
  double worst = 0.0;
  for (std::size_t i = 0; i < off.size(); ++i) {
    if (used[i]) continue;
    const cplx img = mode == PairingMode::pseudo ? 1.0 / std::conj(off[i]) : 1.0 / off[i];
    std::size_t best = off.size();
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < off.size(); ++j) {
      if (j == i || used[j]) continue;
      const double d = std::abs(off[j] - img);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    used[i] = true;
    used[best] = true;
    worst = std::max(worst, bd);
  }
  return worst;
}

double pairing_residual(const SpectrumResult& spec, PairingMode mode) {
  return pairing_residual(spec.eigenvalues, mode, spec.tol_circle);
}

SymmetryResiduals symmetry_residuals(const RingOperator& op) {
  if (op.gauge != CoinGauge::realified)
    throw DomainError("symmetry_residuals: operator must be in the realified gauge");
  const long N = op.n_cells;
  const SymmetryOperators s = symmetry_operators(N);
  const Eigen::MatrixXcd w = op.kind == OperatorKind::walk
                                 ? op.matrix
                                 : build_walk(op.params, N, Boundary::periodic, CoinGauge::realified).matrix;
  SymmetryResiduals r;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(w);
  const auto& sv = svd.singularValues();
  r.condition = sv(0) / sv(sv.size() - 1);
  if (!(r.condition < 1e12)) throw NumericError("symmetry_residuals: walk is ill-conditioned");
  const Eigen::MatrixXcd winv = w.inverse();
  r.pseudo_unitarity = op_norm(s.parity * winv * s.parity - w.adjoint());

  const Eigen::MatrixXcd tf = op.kind == OperatorKind::timeframe ? op.matrix : timeframe(op.params, N).matrix;
  WalkParams flipped = op.params;
  flipped.eta = -flipped.eta;
  const Eigen::MatrixXcd tf_flip = timeframe(flipped, N).matrix;
  const Eigen::MatrixXcd conj_pt = s.pt * tf.conjugate() * s.pt;  // PT is its own inverse
  r.pt = op_norm(conj_pt - tf.inverse());
  r.pt_eta_flipped = op_norm(conj_pt - tf_flip.inverse());
  return r;
}

double spectral_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.empty() || b.empty()) throw DomainError("spectral_distance: empty set");
  auto directed = [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
    double worst = 0.0;
    for (const cplx& p : x) {
      double best = std::numeric_limits<double>::infinity();
      for (const cplx& q : y) best = std::min(best, std::abs(p - q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

Eigen::MatrixXcd open_dual_matrix(const WalkParams& params, long n_cells) {
  if (n_cells < 3) throw DomainError("open dual ring needs at least 3 cells");
  Eigen::MatrixXcd d = build_dual_walk(params, n_cells).matrix;
  const long e = 2 * n_cells - 2;
  d.block(0, e, 2, 2).setZero();
  d.block(e, 0, 2, 2).setZero();
  return d;
}

double char_poly_growth(cplx z, const WalkParams& params, long n_cells) {
  Eigen::MatrixXcd a = open_dual_matrix(params, n_cells);
  a.diagonal().array() -= z;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const Eigen::MatrixXcd& u = lu.matrixLU();
  double acc = 0.0;
  for (long k = 0; k < u.rows(); ++k) {
    const double p = std::abs(u(k, k));
    if (!(p > 0.0)) throw NumericError("char_poly_growth: z lies on the spectrum");
    acc += std::log(p);
  }
  return acc / static_cast<double>(u.rows());
}

double char_poly_prediction(cplx z, const WalkParams& params, Backend backend,
                            const LyapunovOptions& opt) {
  double l_sharp;
  if (backend == Backend::closed_form) {
    l_sharp = lyapunov_closed_form(params).dual_overall;
  } else {
    // dual cocycle is conj(A) of the swapped model at 1/conj(z) with eta <-> eps
    WalkParams sw = params;
    sw.coupling1 = params.coupling2;
    sw.coupling2 = params.coupling1;
    sw.eta = params.eps;
    sw.eps = params.eta;
    const cplx w = 1.0 / std::conj(z);
    LyapunovOptions o = opt;
    o.direction = Direction::right;
    const double r = lyapunov_numeric(w, sw, o).value;
    o.direction = Direction::left;
    const double l = lyapunov_numeric(w, sw, o).value;
    l_sharp = std::max(0.0, std::min(l, r));
  }
  const double l2 = params.coupling2.lambda(), l1p = params.coupling1.lambda_prime();
  return 0.5 * l_sharp - 0.5 * std::log(std::abs(2.0 / (l2 * (1.0 + l1p)))) +
         0.5 * std::log(std::abs(z));
}

}  // namespace puamo
