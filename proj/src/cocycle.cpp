#include "puamo/cocycle.hpp"

#include <algorithm>
#include <cmath>

#include "puamo/error.hpp"

namespace puamo {

namespace {

const cplx kI(0.0, 1.0);
const double kPhaseOffset = 1.0 / (2.0 * 2.71828182845904523536);

void require_nonzero(cplx z) {
  if (z == cplx(0.0, 0.0)) throw DomainError("transfer matrix: z must be nonzero");
}

struct CellTransfer {
  TransferMatrix m;
  cplx det;
};

// A_z at an explicit phase x + i y, also returning its determinant.
CellTransfer transfer_at(cplx z, const WalkParams& p, double x, double y, long cell) {
  const double l1 = p.coupling1.lambda(), l1p = p.coupling1.lambda_prime();
  const double l2 = p.coupling2.lambda(), l2p = p.coupling2.lambda_prime();
  const ComplexTrig t = trig_2pi(x, y);
  const cplx q11 = l2 * t.cos + kI * l2p;
  const cplx q22 = l2 * t.cos - kI * l2p;
  if (std::abs(q22) < 1e-14) throw SingularCellError("transfer matrix: q22 vanishes", cell);
  const double e = std::exp(kTwoPi * p.eta);
  const cplx pre = e / q22;
  const cplx s = l2 * t.sin;
  TransferMatrix a;
  a << pre * (1.0 / (l1 * z) + 2.0 * (l1p / l1) * s + z * (l1p * l1p / l1)),
       pre * (-e * (s + l1p * z)),
       pre * (-(s + l1p * z) / e),
       pre * (l1 * z);
  return {a, e * e * q11 / q22};
}

double frac_phase(long n, double phi, double theta) {
  double x = static_cast<double>(n) * phi;
  x -= std::floor(x);
  return x + theta;
}

cplx regularizer(const WalkParams& p, double x, double y) {
  const double l2 = p.coupling2.lambda(), l2p = p.coupling2.lambda_prime();
  const ComplexTrig t = trig_2pi(x, y);
  return 2.0 * (l2 * t.cos - kI * l2p) / (1.0 + l2p);
}

double max_abs(const TransferMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TransferMatrix transfer_matrix(long n, cplx z, const WalkParams& params) {
  require_nonzero(z);
  return transfer_at(z, params, frac_phase(n, params.freq.phi(), params.theta), params.eps, n).m;
}

TransferMatrix transfer_matrix_dual(long n, cplx z, const WalkParams& params) {
  require_nonzero(z);
  // generic transposed-walk transfer matrix with shift coupling lambda2, hopping -eps,
  // coin Q_{lambda1} at phase n phi + theta - i eta
  const double lam = params.coupling2.lambda(), lamp = params.coupling2.lambda_prime();
  const Mat2 q = coin_block(params.coupling1, params.freq.phi(), params.theta, -params.eta, n);
  if (std::abs(q(0, 0)) < 1e-14) throw SingularCellError("dual transfer matrix: q11 vanishes", n);
  const cplx det = q.determinant();
  const double e = std::exp(kTwoPi * params.eps);  // exp(-2 pi eta_dual)
  const cplx pre = e / q(0, 0);
  TransferMatrix t;
  t << pre * (z / lam + (lamp / lam) * (q(1, 0) - q(0, 1)) + lamp * lamp / lam * det / z),
       pre * (-e * (q(1, 0) + lamp * det / z)),
       pre * ((q(0, 1) - lamp * det / z) / e),
       pre * (lam * det / z);
  return t;
}

TransferMatrix regularized_transfer(long n, cplx z, const WalkParams& params) {
  require_nonzero(z);
  // multiply the prefactor in before dividing so the result stays finite
  const double l1 = params.coupling1.lambda(), l1p = params.coupling1.lambda_prime();
  const double l2 = params.coupling2.lambda(), l2p = params.coupling2.lambda_prime();
  const double x = frac_phase(n, params.freq.phi(), params.theta);
  const ComplexTrig t = trig_2pi(x, params.eps);
  const double e = std::exp(kTwoPi * params.eta);
  const cplx pre = 2.0 * e / (1.0 + l2p);
  const cplx s = l2 * t.sin;
  TransferMatrix b;
  b << pre * (1.0 / (l1 * z) + 2.0 * (l1p / l1) * s + z * (l1p * l1p / l1)),
       pre * (-e * (s + l1p * z)),
       pre * (-(s + l1p * z) / e),
       pre * (l1 * z);
  return b;
}

LyapunovEstimate lyapunov_numeric(cplx z, const WalkParams& params, const LyapunovOptions& opt) {
  require_nonzero(z);
  if (opt.n_steps < 1 || opt.n_phases < 1)
    throw DomainError("lyapunov_numeric: n_steps and n_phases must be positive");
  const double phi = params.freq.phi();
  const bool right = opt.direction == Direction::right;
  const bool reg = opt.cocycle == CocycleKind::regularized;

  std::vector<double> values;
  values.reserve(opt.n_phases);
  long skipped = 0;
  for (long j = 0; j < opt.n_phases; ++j) {
    const double theta = (static_cast<double>(j) + kPhaseOffset) / static_cast<double>(opt.n_phases);
    TransferMatrix v = TransferMatrix::Identity();
    double acc = 0.0;
    bool ok = true;
    try {
      for (long k = 0; k < opt.n_steps; ++k) {
        const long n = right ? k : -(k + 1);
        const double x = frac_phase(n, phi, theta);
        CellTransfer c = transfer_at(z, params, x, params.eps, n);
        if (reg) {
          const cplx r = regularizer(params, x, params.eps);
          c.m *= r;
          c.det *= r * r;
        }
        if (right) {
          v = c.m * v;
        } else {
          if (std::abs(c.det) < 1e-300) throw SingularCellError("singular transfer matrix", n);
          TransferMatrix inv;
          inv << c.m(1, 1), -c.m(0, 1), -c.m(1, 0), c.m(0, 0);
          v = (inv / c.det) * v;
        }
        if (k % 16 == 15) {
          const double nrm = max_abs(v);
          if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericError("transfer product degenerate");
          v /= nrm;
          acc += std::log(nrm);
        }
      }
      Eigen::JacobiSVD<TransferMatrix> svd(v);
      acc += std::log(svd.singularValues()(0));
    } catch (const NumericError&) {
      ok = false;
    }
    if (ok && std::isfinite(acc))
      values.push_back(acc / static_cast<double>(opt.n_steps));
    else
      ++skipped;
  }
  if (static_cast<double>(skipped) > 0.01 * static_cast<double>(opt.n_phases) || values.empty())
    throw NumericError("lyapunov_numeric: too many singular phases (" + std::to_string(skipped) +
                       " of " + std::to_string(opt.n_phases) + ")");

  LyapunovEstimate est;
  est.n_steps = opt.n_steps;
  est.n_phases = opt.n_phases;
  est.direction = opt.direction;
  est.skipped_phases = skipped;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  est.value = mean;
  if (values.size() > 1)
    est.std_error = std::sqrt(var / static_cast<double>(values.size() - 1) /
                              static_cast<double>(values.size()));
  return est;
}

LyapunovEstimate lyapunov_numeric(cplx z, const WalkParams& params, long n_steps, long n_phases,
                                  Direction direction) {
  LyapunovOptions opt;
  opt.n_steps = n_steps;
  opt.n_phases = n_phases;
  opt.direction = direction;
  return lyapunov_numeric(z, params, opt);
}

ClosedFormLyapunov lyapunov_closed_form(const WalkParams& params) {
  const DerivedConstants d = derived_constants(params);
  const double lg = std::log(d.lambda0);
  const double eps = params.eps, eta = params.eta;
  auto g = [&](double e) {
    const double a = std::abs(e);
    return std::max(0.0, lg + kTwoPi * (a - std::max(a - d.eps0, 0.0)));
  };
  auto g_dual = [&](double h) {
    const double a = std::abs(h);
    return std::max(0.0, kTwoPi * a - lg - kTwoPi * std::max(a - d.eta0, 0.0));
  };
  ClosedFormLyapunov c;
  c.right = kTwoPi * eta + g(eps);
  c.left = -kTwoPi * eta + g(eps);
  c.overall = std::max(0.0, std::min(c.left, c.right));
  c.dual_right = kTwoPi * eps + g_dual(eta);
  c.dual_left = -kTwoPi * eps + g_dual(eta);
  c.dual_overall = std::max(0.0, std::min(c.dual_left, c.dual_right));
  return c;
}

std::vector<double> turning_points(const WalkParams& params) {
  const DerivedConstants d = derived_constants(params);
  const double lg = std::log(d.lambda0);
  std::vector<double> a;  // nonnegative kink locations in |eps|
  a.push_back(d.eps0);
  a.push_back(std::max(0.0, -lg) / kTwoPi);
  const double h = kTwoPi * std::abs(params.eta);
  if (h > 0.0) {
    // overall exponent reaches zero where g(eps) = 2 pi |eta|
    const double e = (h - lg) / kTwoPi;
    if (e >= std::max(0.0, -lg) / kTwoPi && e <= d.eps0) a.push_back(e);
  }
  std::vector<double> out;
  for (double x : a) {
    out.push_back(x);
    if (x > 0.0) out.push_back(-x);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

AccelerationResult acceleration(cplx z, const WalkParams& params, double delta_eps,
                                Backend backend, const LyapunovOptions& opt) {
  if (!(delta_eps > 0.0)) throw DomainError("acceleration: delta_eps must be positive");
  WalkParams hi = params;
  hi.eps = params.eps + delta_eps;
  auto overall = [&](const WalkParams& p) {
    if (backend == Backend::closed_form) return lyapunov_closed_form(p).overall;
    LyapunovOptions o = opt;
    o.cocycle = CocycleKind::standard;
    o.direction = Direction::right;
    const double r = lyapunov_numeric(z, p, o).value;
    o.direction = Direction::left;
    const double l = lyapunov_numeric(z, p, o).value;
    return std::max(0.0, std::min(l, r));
  };
  AccelerationResult res;
  res.value = (overall(hi) - overall(params)) / (kTwoPi * delta_eps);
  for (double t : turning_points(params))
    if (t > params.eps && t < hi.eps) res.straddles_turning_point = true;
  return res;
}

const char* to_string(CocycleRegime r) {
  switch (r) {
    case CocycleRegime::uniformly_hyperbolic: return "uniformly_hyperbolic";
    case CocycleRegime::subcritical: return "subcritical";
    case CocycleRegime::critical: return "critical";
    case CocycleRegime::supercritical: return "supercritical";
  }
  return "?";
}

CocycleRegime cocycle_regime(cplx z, const WalkParams& params, const RegimeOptions& opt) {
  if (params.eta != 0.0) throw DomainError("cocycle_regime requires eta = 0");
  WalkParams p0 = params;
  p0.eps = 0.0;
  LyapunovOptions lo;
  lo.n_steps = opt.n_steps;
  lo.n_phases = opt.n_phases;
  const double l0 = lyapunov_numeric(z, p0, lo).value;
  WalkParams p1 = p0;
  p1.eps = opt.delta_eps;
  const double l1 = lyapunov_numeric(z, p1, lo).value;
  const double omega = (l1 - l0) / (kTwoPi * opt.delta_eps);
  const bool lpos = l0 > opt.lyap_threshold;
  const bool wpos = omega > opt.accel_threshold;
  if (lpos) return wpos ? CocycleRegime::supercritical : CocycleRegime::uniformly_hyperbolic;
  return wpos ? CocycleRegime::critical : CocycleRegime::subcritical;
}

}  // namespace puamo
