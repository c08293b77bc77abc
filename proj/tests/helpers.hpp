#pragma once

#include <random>

#include "puamo/spectral.hpp"

namespace testing {

using namespace puamo;

struct Draw {
  std::mt19937_64 gen;
  explicit Draw(std::uint64_t seed = 7) : gen(seed) {}
  double operator()(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
  cplx unit() { return std::polar(1.0, (*this)(-kPi, kPi)); }
  Eigen::VectorXcd vec(long n) {
    Eigen::VectorXcd v(n);
    for (long k = 0; k < n; ++k) v[k] = cplx((*this)(-1, 1), (*this)(-1, 1));
    return v;
  }
  WalkParams params(double shift = 0.1) {
    const double l1 = (*this)(0.2, 1.0), l2 = (*this)(0.2, 1.0), th = (*this)(0.0, 1.0);
    const double e = (*this)(-shift, shift), h = (*this)(-shift, shift);
    return WalkParams::make(l1, l2, kGoldenPhi, th, e, h);
  }
};

inline double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// matching distance for two spectra of equal size: Hausdorff is enough for simple spectra
inline double spec_gap(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return spectral_distance(eigenvalues(a), eigenvalues(b));
}

}  // namespace testing
