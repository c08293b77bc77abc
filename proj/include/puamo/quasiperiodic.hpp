#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace puamo {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline const double kGoldenPhi = 0.61803398874989484820;  // (sqrt5 - 1) / 2

/// Coupling constant lambda in (0,1] with lambda' = sqrt(1 - lambda^2).
/// lambda' is always derived, never supplied.
class CouplingPair {
 public:
  CouplingPair() : CouplingPair(1.0) {}
  explicit CouplingPair(double lambda);

  double lambda() const noexcept { return lambda_; }
  double lambda_prime() const noexcept { return prime_; }

 private:
  double lambda_;
  double prime_;
};

struct Convergent {
  long p = 0;
  long q = 1;
  friend bool operator==(const Convergent&, const Convergent&) = default;
};

/// Continued-fraction convergents p/q of phi in (0,1), q <= q_max, increasing q.
/// When a_1 = 1 the first two convergents share q = 1; only the later (1/1) is kept
/// so that q stays strictly increasing.
std::vector<Convergent> convergents(double phi, long q_max);

/// Effective frequency used on a ring of a given size.
struct RingFrequency {
  double phi = 0.0;
  bool commensurate = true;  // N*phi is an integer
};

class FrequencySpec {
 public:
  FrequencySpec() : FrequencySpec(kGoldenPhi) {}
  explicit FrequencySpec(double phi, long q_max = 1L << 20);

  double phi() const noexcept { return phi_; }
  const std::vector<Convergent>& convergent_list() const noexcept { return conv_; }

  /// p/N when N is a convergent denominator, phi itself when N*phi is integral,
  /// otherwise phi flagged as incommensurate.
  RingFrequency ring_frequency(long n_cells) const;
  bool is_denominator(long q) const;
  /// Convergent denominator closest to n (ties go to the smaller one).
  long nearest_denominator(long n) const;

 private:
  double phi_;
  std::vector<Convergent> conv_;
};

/// Full parameter point. The complex phase theta + i*eps is rebuilt on demand.
struct WalkParams {
  CouplingPair coupling1;  // shift
  CouplingPair coupling2;  // coin
  FrequencySpec freq;
  double theta = 0.0;
  double eps = 0.0;
  double eta = 0.0;

  cplx phase() const { return {theta, eps}; }

  static WalkParams make(double l1, double l2, double phi = kGoldenPhi, double theta = 0.0,
                         double eps = 0.0, double eta = 0.0);
};

struct DerivedConstants {
  double lambda0 = 1.0;
  double L = 0.0;
  double L_sharp = 0.0;
  double eps0 = 0.0;
  double eta0 = 0.0;
};

DerivedConstants derived_constants(const WalkParams& params);

/// cos and sin of 2*pi*(x + i*y), with x reduced mod 1 first.
struct ComplexTrig {
  cplx cos;
  cplx sin;
};
ComplexTrig trig_2pi(double x, double y);

/// Coin Q_n at phase n*phi + theta + i*eps for an explicit frequency.
Mat2 coin_block(const CouplingPair& lambda2, double phi, double theta, double eps, long n);

/// Q_n with the frequency stored in params.
Mat2 coin_matrix(long n, const WalkParams& params);

/// Realified coin at theta = 1/4: diagonal sqrt(1 - c^2), off-diagonal -+c,
/// c = lambda2 cos(2 pi (n phi + i eps)), principal branch.
Mat2 realified_coin(long n, const CouplingPair& lambda2, double phi, double eps);

enum class Regime { subcritical, critical, supercritical };

/// Compares lambda1 against lambda2 (coupling only; eta and eps are ignored).
Regime regime(const WalkParams& params);

const char* to_string(Regime r);

}  // namespace puamo
