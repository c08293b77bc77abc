#include "puamo/quasiperiodic.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "puamo/error.hpp"

namespace puamo {

CouplingPair::CouplingPair(double lambda) : lambda_(lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw DomainError("coupling lambda must lie in (0,1]");
  prime_ = std::sqrt((1.0 - lambda) * (1.0 + lambda));
}

std::vector<Convergent> convergents(double phi, long q_max) {
  if (!(phi > 0.0 && phi < 1.0)) throw DomainError("convergents: phi must lie in (0,1)");
  if (q_max < 1) throw DomainError("convergents: q_max must be >= 1");

  std::vector<Convergent> out;
  // p_{-1}=1, q_{-1}=0; p_0=a_0=0, q_0=1
  long p_prev = 1, q_prev = 0;
  long p = 0, q = 1;
  out.push_back({p, q});
  double x = phi;  // fractional remainder
  while (true) {
    if (x < 1e-15) break;
    double inv = 1.0 / x;
    double a_real = std::floor(inv);
    double frac = inv - a_real;
    if (frac > 1.0 - 1e-15) {  // inv sits just below an integer
      a_real += 1.0;
      frac = 0.0;
    }
    if (a_real > static_cast<double>(std::numeric_limits<long>::max() / 4)) break;
    long a = static_cast<long>(a_real);
    long p_next = a * p + p_prev;
    long q_next = a * q + q_prev;
    if (q_next > q_max) break;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    if (!out.empty() && out.back().q == q)
      out.back() = {p, q};
    else
      out.push_back({p, q});
    // residual of the expansion
    if (std::abs(phi - static_cast<double>(p) / static_cast<double>(q)) < 1e-15) break;
    x = frac;
  }
  return out;
}

FrequencySpec::FrequencySpec(double phi, long q_max) : phi_(phi) {
  if (!(phi >= 0.0 && phi <= 1.0)) throw DomainError("frequency phi must lie in [0,1]");
  if (phi == 0.0)
    conv_ = {{0, 1}};
  else if (phi == 1.0)
    conv_ = {{1, 1}};
  else
    conv_ = convergents(phi, q_max);
}

bool FrequencySpec::is_denominator(long q) const {
  for (const auto& c : conv_)
    if (c.q == q) return true;
  return false;
}

long FrequencySpec::nearest_denominator(long n) const {
  long best = conv_.front().q;
  for (const auto& c : conv_)
    if (std::labs(c.q - n) < std::labs(best - n)) best = c.q;
  return best;
}

RingFrequency FrequencySpec::ring_frequency(long n_cells) const {
  for (const auto& c : conv_)
    if (c.q == n_cells) return {static_cast<double>(c.p) / static_cast<double>(c.q), true};
  double np = phi_ * static_cast<double>(n_cells);
  if (std::abs(np - std::round(np)) < 1e-12) return {phi_, true};
  return {phi_, false};
}

WalkParams WalkParams::make(double l1, double l2, double phi, double theta, double eps,
                            double eta) {
  WalkParams p;
  p.coupling1 = CouplingPair(l1);
  p.coupling2 = CouplingPair(l2);
  p.freq = FrequencySpec(phi);
  p.theta = theta;
  p.eps = eps;
  p.eta = eta;
  return p;
}

DerivedConstants derived_constants(const WalkParams& params) {
  const double l1 = params.coupling1.lambda(), l1p = params.coupling1.lambda_prime();
  const double l2 = params.coupling2.lambda(), l2p = params.coupling2.lambda_prime();
  DerivedConstants d;
  d.lambda0 = l2 * (1.0 + l1p) / (l1 * (1.0 + l2p));
  const double lg = std::log(d.lambda0);
  d.L = std::max(0.0, lg);
  d.L_sharp = std::max(0.0, -lg);
  d.eps0 = std::asinh(l2p / l2) / kTwoPi;
  d.eta0 = std::asinh(l1p / l1) / kTwoPi;
  return d;
}

ComplexTrig trig_2pi(double x, double y) {
  double xr = x - std::floor(x);
  double a = kTwoPi * xr, b = kTwoPi * y;
  double ca = std::cos(a), sa = std::sin(a);
  double chb = std::cosh(b), shb = std::sinh(b);
  return {cplx(ca * chb, -sa * shb), cplx(sa * chb, ca * shb)};
}

Mat2 coin_block(const CouplingPair& lambda2, double phi, double theta, double eps, long n) {
  // n*phi reduced separately so large n keeps its fractional part
  double np = static_cast<double>(n) * phi;
  np -= std::floor(np);
  ComplexTrig t = trig_2pi(np + theta, eps);
  const double l = lambda2.lambda(), lp = lambda2.lambda_prime();
  Mat2 q;
  q << l * t.cos + cplx(0.0, lp), -l * t.sin,
       l * t.sin, l * t.cos - cplx(0.0, lp);
  return q;
}

Mat2 coin_matrix(long n, const WalkParams& params) {
  return coin_block(params.coupling2, params.freq.phi(), params.theta, params.eps, n);
}

Mat2 realified_coin(long n, const CouplingPair& lambda2, double phi, double eps) {
  double np = static_cast<double>(n) * phi;
  np -= std::floor(np);
  cplx c = lambda2.lambda() * trig_2pi(np, eps).cos;
  cplx a = std::sqrt(1.0 - c * c);  // principal branch, Re >= 0
  Mat2 q;
  q << a, -c,
       c, a;
  return q;
}

Regime regime(const WalkParams& params) {
  const double l1 = params.coupling1.lambda(), l2 = params.coupling2.lambda();
  if (std::abs(l1 - l2) <= 1e-14) return Regime::critical;
  return l1 > l2 ? Regime::subcritical : Regime::supercritical;
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::subcritical: return "subcritical";
    case Regime::critical: return "critical";
    case Regime::supercritical: return "supercritical";
  }
  return "?";
}

}  // namespace puamo
