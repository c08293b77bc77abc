#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "puamo/cocycle.hpp"
#include "puamo/error.hpp"

using namespace puamo;
using testing::max_abs;

namespace {

cplx random_z(testing::Draw& d) { return std::polar(d(0.5, 2.0), d(-kPi, kPi)); }

// an on-spectrum z of the eta = eps = 0 ring
cplx ring_eigenvalue(const WalkParams& p, long N, std::size_t k) {
  WalkParams q = p;
  q.eta = q.eps = 0.0;
  auto z = eigenvalues(build_walk(q, N).matrix);
  return z[k % z.size()];
}

Mat2 exp_sigma3(double a) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = std::exp(a);
  m(1, 1) = std::exp(-a);
  return m;
}

}  // namespace

TEST_CASE("transfer matrix determinant") {
  testing::Draw draw(41);
  for (int k = 0; k < 100; ++k) {
    WalkParams p = draw.params(0.3);
    const long n = static_cast<long>(draw(-500, 500));
    const cplx z = random_z(draw);
    Mat2 q = coin_matrix(n, p);
    const cplx want = std::exp(4 * kPi * p.eta) * q(0, 0) / q(1, 1);
    CHECK(std::abs(transfer_matrix(n, z, p).determinant() - want) < 1e-12 * std::max(1.0, std::abs(want)));
  }
  CHECK_THROWS_AS(transfer_matrix(0, 0.0, WalkParams::make(0.5, 0.25)), DomainError);
}

TEST_CASE("eta conjugation") {
  testing::Draw draw(43);
  for (int k = 0; k < 100; ++k) {
    WalkParams p = draw.params(0.3);
    WalkParams p0 = p;
    p0.eta = 0.0;
    const long n = static_cast<long>(draw(-500, 500));
    const cplx z = random_z(draw);
    Mat2 rhs = std::exp(kTwoPi * p.eta) * exp_sigma3(kPi * p.eta) * transfer_matrix(n, z, p0) *
               exp_sigma3(-kPi * p.eta);
    CHECK(max_abs(transfer_matrix(n, z, p) - rhs) < 1e-12 * std::max(1.0, max_abs(rhs)));
  }
}

TEST_CASE("dual transfer matrix relation") {
  testing::Draw draw(47);
  for (int k = 0; k < 50; ++k) {
    WalkParams p = draw.params(0.3);
    const long n = static_cast<long>(draw(-500, 500));
    const cplx z = random_z(draw);
    WalkParams s = WalkParams::make(p.coupling2.lambda(), p.coupling1.lambda(), p.freq.phi(), p.theta, p.eta,
                                    p.eps);
    Mat2 rhs = transfer_matrix(n, 1.0 / std::conj(z), s).conjugate();
    CHECK(max_abs(transfer_matrix_dual(n, z, p) - rhs) < 1e-12 * std::max(1.0, max_abs(rhs)));

    const cplx d = transfer_matrix_dual(n, z, p).determinant();
    const cplx mirror = std::conj(transfer_matrix(n, 1.0 / std::conj(z), s).determinant());
    CHECK(std::abs(d - mirror) < 1e-12 * std::max(1.0, std::abs(d)));
  }
  SUBCASE("self-dual reduction") {
    WalkParams p = WalkParams::make(0.6, 0.6, kGoldenPhi, 0.3);
    const cplx z = std::polar(1.3, 0.4);
    CHECK(max_abs(transfer_matrix_dual(7, z, p) - transfer_matrix(7, 1.0 / std::conj(z), p).conjugate()) < 1e-12);
  }
}

TEST_CASE("eigenstate recursion") {
  const long N = 34;
  testing::Draw draw(53);
  for (int k = 0; k < 3; ++k) {
    WalkParams p = draw.params(0.1);
    p.freq = FrequencySpec(21.0 / 34.0);
    RingOperator w = build_walk(p, N);
    SpectrumResult s = eigendecompose(w, true);
    for (std::size_t j = 0; j < s.eigenvalues.size(); j += 7) {
      const cplx z = s.eigenvalues[j];
      Eigen::VectorXcd v = s.eigenvectors->col(static_cast<long>(j));
      for (long n = 1; n < N - 1; ++n) {
        Eigen::Vector2cd in(v[2 * n], v[2 * (n - 1) + 1]);
        Eigen::Vector2cd out(v[2 * (n + 1)], v[2 * n + 1]);
        CHECK((out - transfer_matrix(n, z, p) * in).cwiseAbs().maxCoeff() < 1e-8);
      }
    }
  }
}

TEST_CASE("regularized transfer matrix") {
  testing::Draw draw(59);
  for (int k = 0; k < 20; ++k) {
    WalkParams p = draw.params(0.3);
    const long n = static_cast<long>(draw(-50, 50));
    const cplx z = random_z(draw);
    Mat2 q = coin_matrix(n, p);
    const double l2p = p.coupling2.lambda_prime();
    CHECK(max_abs(regularized_transfer(n, z, p) - 2.0 * q(1, 1) / (1 + l2p) * transfer_matrix(n, z, p)) < 1e-10);
  }
  // finite where q22 vanishes: lambda2 = 1 and real phase 1/4
  WalkParams p = WalkParams::make(0.5, 1.0, 0.0, 0.25);
  CHECK_THROWS_AS(transfer_matrix(0, 1.0, p), SingularCellError);
  CHECK(std::isfinite(max_abs(regularized_transfer(0, 1.0, p))));

  SUBCASE("Lyapunov of B") {
    LyapunovOptions a{20000, 8, Direction::right, CocycleKind::standard};
    LyapunovOptions b = a;
    b.cocycle = CocycleKind::regularized;
    WalkParams s = WalkParams::make(0.5, 0.25);
    const cplx z = ring_eigenvalue(s, 233, 40);
    s.eps = 0.2;
    CHECK(std::abs(lyapunov_numeric(z, s, b).value - lyapunov_numeric(z, s, a).value) < 0.02);
    s.eps = 0.4;
    const double eps0 = derived_constants(s).eps0;
    CHECK(lyapunov_numeric(z, s, b).value - lyapunov_numeric(z, s, a).value ==
          doctest::Approx(kTwoPi * (0.4 - eps0)).epsilon(0.02 / (kTwoPi * (0.4 - eps0))));
  }
}

TEST_CASE("numeric Lyapunov exponent on the spectrum") {
  LyapunovOptions opt;  // 1e5 steps, 32 phases
  SUBCASE("subcritical vanishes") {
    WalkParams p = WalkParams::make(0.5, 0.25);
    LyapunovEstimate e = lyapunov_numeric(ring_eigenvalue(p, 233, 100), p, opt);
    CHECK(std::abs(e.value) < 0.01);
    CHECK(e.std_error >= 0.0);
    CHECK(e.n_steps == opt.n_steps);
    CHECK(e.n_phases == opt.n_phases);
  }
  SUBCASE("supercritical equals ln lambda0") {
    WalkParams p = WalkParams::make(0.25, 0.5);
    LyapunovEstimate e = lyapunov_numeric(ring_eigenvalue(p, 233, 100), p, opt);
    CHECK(e.value == doctest::Approx(std::log(derived_constants(p).lambda0)).epsilon(0.02 / 0.7464));
    CHECK(std::log(derived_constants(p).lambda0) == doctest::Approx(0.7464).epsilon(1e-4));
  }
  SUBCASE("eta shifts right and left in opposite directions") {
    WalkParams p = WalkParams::make(0.5, 0.25);
    const cplx z = ring_eigenvalue(p, 233, 100);
    p.eta = 0.05;
    LyapunovOptions left = opt;
    left.direction = Direction::left;
    const double r = lyapunov_numeric(z, p, opt).value, l = lyapunov_numeric(z, p, left).value;
    CHECK(r - l == doctest::Approx(4 * kPi * 0.05).epsilon(0.01 / (4 * kPi * 0.05)));
  }
  CHECK_THROWS_AS(lyapunov_numeric(1.0, WalkParams::make(0.5, 0.25), 0, 4, Direction::right), DomainError);
}

TEST_CASE("closed-form Lyapunov exponents") {
  auto a = lyapunov_closed_form(WalkParams::make(0.5, 0.25));
  CHECK(a.overall == 0.0);
  CHECK(a.dual_overall / kTwoPi == doctest::Approx(0.1188).epsilon(5e-5 / 0.1188));

  auto b = lyapunov_closed_form(WalkParams::make(0.5, 0.25, kGoldenPhi, 0.0, 0.2));
  CHECK(b.overall / kTwoPi == doctest::Approx(0.0812).epsilon(1e-4 / 0.0812));

  auto c = lyapunov_closed_form(WalkParams::make(0.7, 0.7));
  for (double x : {c.right, c.left, c.overall, c.dual_right, c.dual_left, c.dual_overall})
    CHECK(std::abs(x) < 1e-14);

  auto d = lyapunov_closed_form(WalkParams::make(0.5, 0.25, kGoldenPhi, 0.0, 0.5));
  CHECK(d.overall / kTwoPi == doctest::Approx(0.2096).epsilon(1e-4 / 0.2096));
  auto d2 = lyapunov_closed_form(WalkParams::make(0.5, 0.25, kGoldenPhi, 0.0, 0.45));
  CHECK(d2.overall == doctest::Approx(d.overall).epsilon(1e-14));

  testing::Draw draw(61);
  for (int k = 0; k < 100; ++k) {
    WalkParams p = draw.params(0.5);
    auto r = lyapunov_closed_form(p);
    CHECK(r.right - r.left == doctest::Approx(4 * kPi * p.eta).epsilon(1e-12));
    CHECK(r.overall == doctest::Approx(std::max(0.0, std::min(r.left, r.right))));
    WalkParams flip = p;
    flip.eta = -p.eta;
    CHECK(lyapunov_closed_form(flip).right == doctest::Approx(r.left));
    WalkParams sw = WalkParams::make(p.coupling2.lambda(), p.coupling1.lambda(), kGoldenPhi, p.theta, p.eta, p.eps);
    CHECK(r.dual_overall == doctest::Approx(lyapunov_closed_form(sw).overall));
  }
}

TEST_CASE("convexity and piecewise linearity in eps") {
  WalkParams p = WalkParams::make(0.5, 0.25);
  auto tp = turning_points(p);
  const double eps0 = derived_constants(p).eps0;
  // the regularized cocycle is the analytic one, so convexity is asserted on its exponent
  auto eval = [&](double e) {
    WalkParams q = p;
    q.eps = e;
    return lyapunov_closed_form(q).overall + kTwoPi * std::max(std::abs(e) - eps0, 0.0);
  };
  const double h = 0.025;
  for (int k = 1; k < 40; ++k) {
    const double e = -0.5 + k * h;
    CHECK(eval(e + h) - 2 * eval(e) + eval(e - h) >= -1e-3);
  }
  for (int k = 0; k < 40; ++k) {
    const double e0 = -0.5 + k * h, e1 = e0 + h;
    bool kink = false;
    for (double t : tp) kink |= (t > e0 && t < e1);
    if (kink) continue;
    const double slope = (eval(e1) - eval(e0)) / h / kTwoPi;
    CHECK(std::abs(slope - std::round(slope)) < 0.05);
    CHECK(std::abs(std::round(slope)) <= 1.0);
  }
}

TEST_CASE("acceleration") {
  WalkParams p = WalkParams::make(0.5, 0.25);
  const cplx z = ring_eigenvalue(p, 233, 100);
  p.eps = 0.05;
  CHECK(acceleration(z, p, 0.02).value == doctest::Approx(0.0));
  p.eps = 0.2;
  CHECK(std::abs(acceleration(z, p, 0.02).value - 1.0) < 0.05);
  p.eps = 0.4;
  CHECK(std::abs(acceleration(z, p, 0.02).value) < 0.05);
  p.eps = 0.11;
  CHECK(acceleration(z, p, 0.02).straddles_turning_point);

  LyapunovOptions opt{30000, 8, Direction::right, CocycleKind::standard};
  p.eps = 0.2;
  CHECK(std::abs(acceleration(z, p, 0.04, Backend::numeric, opt).value - 1.0) < 0.05);
  CHECK_THROWS_AS(acceleration(z, p, 0.0), DomainError);
}

TEST_CASE("regime classification of the cocycle") {
  WalkParams sub = WalkParams::make(0.5, 0.25);
  CHECK(cocycle_regime(ring_eigenvalue(sub, 233, 100), sub) == CocycleRegime::subcritical);
  WalkParams sup = WalkParams::make(0.25, 0.5);
  CHECK(cocycle_regime(ring_eigenvalue(sup, 233, 100), sup) == CocycleRegime::supercritical);

  // midpoint of the widest gap of the subcritical ring
  SpectrumResult s = eigendecompose(build_walk(sub, 233));
  double best = 0.0, mid = 0.0;
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
    const double a = std::arg(s.eigenvalues[k]);
    const double b = k + 1 < s.eigenvalues.size() ? std::arg(s.eigenvalues[k + 1]) : std::arg(s.eigenvalues[0]) + kTwoPi;
    if (b - a > best) {
      best = b - a;
      mid = 0.5 * (a + b);
    }
  }
  CHECK(cocycle_regime(std::polar(1.0, mid), sub) == CocycleRegime::uniformly_hyperbolic);
  WalkParams eta = sub;
  eta.eta = 0.1;
  CHECK_THROWS_AS(cocycle_regime(1.0, eta), DomainError);
}
