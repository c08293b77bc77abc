#pragma once

#include <vector>

#include "puamo/quasiperiodic.hpp"

namespace puamo {

/// 2x2 transfer matrix: [psi+_{n+1}, psi-_n] = T_n [psi+_n, psi-_{n-1}].
using TransferMatrix = Mat2;

enum class Direction { left, right };
/// standard: A_z. regularized: B_z = [2(lambda2 cos - i lambda2')/(1 + lambda2')] A_z.
enum class CocycleKind { standard, regularized };

struct LyapunovEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n_steps = 0;
  long n_phases = 0;
  Direction direction = Direction::right;
  long skipped_phases = 0;
};

struct ClosedFormLyapunov {
  double right = 0.0;
  double left = 0.0;
  double overall = 0.0;
  double dual_right = 0.0;
  double dual_left = 0.0;
  double dual_overall = 0.0;
};

/// A_z(eta, n phi + theta + i eps) at the frequency stored in params.
TransferMatrix transfer_matrix(long n, cplx z, const WalkParams& params);

/// Transfer matrix of the transposed dual walk at cell n.
TransferMatrix transfer_matrix_dual(long n, cplx z, const WalkParams& params);

TransferMatrix regularized_transfer(long n, cplx z, const WalkParams& params);

struct LyapunovOptions {
  long n_steps = 100000;
  long n_phases = 32;
  Direction direction = Direction::right;
  CocycleKind cocycle = CocycleKind::standard;
};

/// Phase-averaged growth rate of transfer-matrix products. params.theta is ignored:
/// phases are (j + 1/(2e))/n_phases. Left direction multiplies inverses along the
/// backward orbit.
LyapunovEstimate lyapunov_numeric(cplx z, const WalkParams& params, const LyapunovOptions& opt = {});

LyapunovEstimate lyapunov_numeric(cplx z, const WalkParams& params, long n_steps, long n_phases,
                                  Direction direction);

/// On-spectrum closed forms (z-independent).
ClosedFormLyapunov lyapunov_closed_form(const WalkParams& params);

/// Kinks of eps -> overall closed-form exponent at the given eta.
std::vector<double> turning_points(const WalkParams& params);

enum class Backend { closed_form, numeric };

struct AccelerationResult {
  double value = 0.0;
  bool straddles_turning_point = false;
};

/// (L(eps + d) - L(eps)) / (2 pi d) for the overall exponent.
AccelerationResult acceleration(cplx z, const WalkParams& params, double delta_eps,
                                Backend backend = Backend::closed_form,
                                const LyapunovOptions& opt = {});

enum class CocycleRegime { uniformly_hyperbolic, subcritical, critical, supercritical };

const char* to_string(CocycleRegime r);

struct RegimeOptions {
  long n_steps = 20000;
  long n_phases = 8;
  double delta_eps = 0.02;
  double lyap_threshold = 0.02;   // L above this counts as positive
  double accel_threshold = 0.5;   // omega above this counts as positive
};

/// Global-theory classification from (L, acceleration) at eps = 0. Requires eta = 0.
CocycleRegime cocycle_regime(cplx z, const WalkParams& params, const RegimeOptions& opt = {});

}  // namespace puamo
