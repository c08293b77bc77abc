#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "puamo/cocycle.hpp"
#include "puamo/error.hpp"
#include "puamo/sweep.hpp"

using namespace puamo;
using testing::max_abs;

TEST_CASE("eigendecompose basics") {
  SUBCASE("unitary spectrum") {
    SpectrumResult s = eigendecompose(build_walk(WalkParams::make(0.5, 0.25), 89), true);
    REQUIRE(s.eigenvalues.size() == 178);
    for (cplx z : s.eigenvalues) CHECK(std::abs(std::abs(z) - 1.0) < 1e-10);
    REQUIRE(s.fractal_dims.size() == 178);
    for (double g : s.fractal_dims) CHECK((g >= 0.0 && g <= 1.0));
  }
  SUBCASE("diagonal matrix") {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
    d(0, 0) = cplx(0, 1);
    d(1, 1) = 2.0;
    d(2, 2) = -1.0;
    auto z = eigenvalues(d);
    CHECK(std::abs(z[0] - 2.0) < 1e-14);
    CHECK(std::abs(z[1] - cplx(0, 1)) < 1e-14);
    CHECK(std::abs(z[2] + 1.0) < 1e-14);
  }
  SUBCASE("eigen-residuals for a non-normal walk") {
    RingOperator w = build_walk(WalkParams::make(0.5, 0.25, kGoldenPhi, 0.1, 0.25, 0.04), 55);
    SpectrumResult s = eigendecompose(w, true);
    const double scale = w.matrix.norm();
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
      Eigen::VectorXcd v = s.eigenvectors->col(static_cast<long>(k));
      CHECK(v.norm() == doctest::Approx(1.0));
      CHECK((w.matrix * v - s.eigenvalues[k] * v).norm() < 1e-8 * scale);
    }
  }
  SUBCASE("characteristic polynomial oracle at N = 3") {
    testing::Draw draw(71);
    WalkParams p = draw.params(0.2);
    RingOperator w = build_walk(p, 3);
    auto z = eigendecompose(w).eigenvalues;
    REQUIRE(z.size() == 6);
    // each eigenvalue is a root of det(W - z) with unit-scale derivative
    for (cplx x : z) {
      Eigen::MatrixXcd m = w.matrix - x * Eigen::MatrixXcd::Identity(6, 6);
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
      CHECK(svd.singularValues()(5) < 1e-10);
    }
    // and the product of the eigenvalues is the determinant
    cplx prod = 1.0;
    for (cplx x : z) prod *= x;
    CHECK(std::abs(prod - w.matrix.determinant()) < 1e-10);
  }
  SUBCASE("size limit") {
    RingOperator big;
    big.matrix = Eigen::MatrixXcd::Zero(4098, 4098);
    big.n_cells = 2049;
    CHECK_THROWS_AS(eigendecompose(big), DomainError);
  }
}

TEST_CASE("fractal dimension") {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(1220);
  v[17] = 1.0;
  CHECK(fractal_dimension(v) == 0.0);
  v[400] = cplx(0, 1);
  CHECK(fractal_dimension(v) == doctest::Approx(std::log(2.0) / std::log(1220.0)).epsilon(1e-12));
  CHECK(fractal_dimension(Eigen::VectorXcd::Ones(64)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(fractal_dimension(Eigen::VectorXcd::Zero(5)), DomainError);
}

TEST_CASE("circle classification") {
  WalkParams p = WalkParams::make(0.5, 0.25);
  SpectrumResult u = eigendecompose(build_walk(p, 89));
  CHECK(classify_circle(u, 1e-6).off_count == 0);

  p.eps = 0.06;
  SpectrumResult s = eigendecompose(build_walk(p, 233));
  CHECK(classify_circle(s, 1e-6).off_count == 0);

  p.eps = 0.4;
  SpectrumResult t = eigendecompose(build_walk(p, 233));
  CircleCounts c = classify_circle(t, 1e-4);
  CHECK(c.on_count == 0);
  CHECK(c.off_count == 466);
  CHECK(c.max_radial_dev > 1e-4);
  CHECK_THROWS_AS(classify_circle(t.eigenvalues, 0.0), DomainError);
}

TEST_CASE("pairing") {
  CHECK(pairing_residual(std::vector<cplx>{1.0, cplx(0, 1)}, PairingMode::pseudo) == 0.0);
  CHECK_THROWS_AS(pairing_residual(std::vector<cplx>{2.0}, PairingMode::pseudo), StructuralViolation);

  WalkParams p = WalkParams::make(0.5, 0.25, kGoldenPhi, 0.25, 0.2);
  auto wr = build_walk(p, 144, Boundary::periodic, CoinGauge::realified);
  CHECK(pairing_residual(eigendecompose(wr), PairingMode::pseudo) < 1e-6);
  CHECK(pairing_residual(eigendecompose(timeframe(p, 144)), PairingMode::chiral) < 1e-6);

  SUBCASE("pseudo pairing across an (eta, eps) grid") {
    for (double eta : linspace(-0.1, 0.1, 5)) {
      for (double eps : linspace(-0.3, 0.3, 5)) {
        WalkParams q = WalkParams::make(0.5, 0.25, kGoldenPhi, 0.25, eps, eta);
        auto z = eigendecompose(build_walk(q, 89, Boundary::periodic, CoinGauge::realified));
        CHECK(pairing_residual(z, PairingMode::pseudo) < 1e-6);
      }
    }
  }
}

TEST_CASE("symmetry residuals") {
  auto at = [](double eps, double eta) {
    WalkParams p = WalkParams::make(0.5, 0.25, kGoldenPhi, 0.25, eps, eta);
    return symmetry_residuals(build_walk(p, 89, Boundary::periodic, CoinGauge::realified));
  };
  SymmetryResiduals a = at(0.0, 0.0);
  CHECK(a.pseudo_unitarity < 1e-10);
  CHECK(a.pt < 1e-10);
  SymmetryResiduals b = at(0.1, 0.0);
  CHECK(b.pseudo_unitarity < 1e-8);
  CHECK(b.pt < 1e-8);
  SymmetryResiduals c = at(0.1, 0.05);
  CHECK(c.pt > 1e-2);
  CHECK(c.pt_eta_flipped < 1e-8);
  CHECK_THROWS_AS(symmetry_residuals(build_walk(WalkParams::make(0.5, 0.25), 21)), DomainError);
}

TEST_CASE("spectral distance") {
  std::vector<cplx> a{1.0, cplx(0, 1)};
  CHECK(spectral_distance(a, a) == 0.0);
  CHECK(spectral_distance({1.0}, {cplx(1.0, 0.1)}) == doctest::Approx(0.1));
  CHECK_THROWS_AS(spectral_distance({}, a), DomainError);

  WalkParams p = WalkParams::make(0.5, 0.25);
  auto z0 = eigendecompose(build_walk(p, 233)).eigenvalues;
  p.eps = 0.05;
  CHECK(spectral_distance(z0, eigendecompose(build_walk(p, 233)).eigenvalues) < 0.05);
}

TEST_CASE("spectrum does not depend on theta") {
  std::vector<std::vector<cplx>> z;
  for (double th : {0.0, 0.13, 0.77})
    z.push_back(eigendecompose(build_walk(WalkParams::make(0.5, 0.25, kGoldenPhi, th), 233)).eigenvalues);
  CHECK(spectral_distance(z[0], z[1]) < 0.03);
  CHECK(spectral_distance(z[0], z[2]) < 0.03);
  CHECK(spectral_distance(z[1], z[2]) < 0.03);
}

TEST_CASE("localized states have lower fractal dimension") {
  auto mean_dim = [](double l1, double l2) {
    SpectrumResult s = eigendecompose(build_walk(WalkParams::make(l1, l2), 233), true);
    double m = 0.0;
    for (double g : s.fractal_dims) m += g;
    return m / s.fractal_dims.size();
  };
  CHECK(mean_dim(0.5, 0.25) - mean_dim(0.25, 0.5) >= 0.2);
}

TEST_CASE("characteristic polynomial growth") {
  // dual parameters subcritical: (lambda2, lambda1) = (0.5, 0.25) seen from the dual side
  WalkParams p = WalkParams::make(0.25, 0.5);
  // gap point of the dual ring at eps = 0
  auto z = eigendecompose(build_dual_walk(p, 610)).eigenvalues;
  double best = 0.0, mid = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double a = std::arg(z[k]);
    const double b = k + 1 < z.size() ? std::arg(z[k + 1]) : std::arg(z[0]) + kTwoPi;
    if (b - a > best) {
      best = b - a;
      mid = 0.5 * (a + b);
    }
  }
  const cplx zg = std::polar(1.0, mid);
  LyapunovOptions opt{20000, 8, Direction::right, CocycleKind::standard};
  const double r610 = char_poly_growth(zg, p, 610);
  CHECK(std::abs(r610 - char_poly_prediction(zg, p, Backend::numeric, opt)) < 0.02);
  const double r377 = char_poly_growth(zg, p, 377), r233 = char_poly_growth(zg, p, 233);
  CHECK(std::abs(r610 - r377) < std::abs(r377 - r233));

  const double far = char_poly_growth(10.0, WalkParams::make(0.6, 0.6), 233);
  CHECK(far == doctest::Approx(std::log(10.0)).epsilon(0.05));
  CHECK_THROWS_AS(open_dual_matrix(p, 2), DomainError);
}
