#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "puamo/cocycle.hpp"
#include "puamo/walk_operator.hpp"

namespace puamo {

struct SpectrumResult {
  std::vector<cplx> eigenvalues;                 // sorted by (arg, |z|)
  std::optional<Eigen::MatrixXcd> eigenvectors;  // column k belongs to eigenvalues[k]
  std::vector<double> fractal_dims;              // empty unless vectors were requested
  std::vector<bool> on_circle;
  WalkParams params;
  long n_cells = 0;
  double tol_circle = 1e-6;
};

/// Dense general complex eigensolver (LAPACK zgeev).
SpectrumResult eigendecompose(const RingOperator& op, bool want_vectors = false,
                              double tol_circle = 1e-6);

/// Raw eigenvalues of an arbitrary square matrix, sorted by (arg, |z|).
std::vector<cplx> eigenvalues(const Eigen::MatrixXcd& m);

void sort_spectrum(std::vector<cplx>& z);

/// IPR dimension -ln(sum p^2)/ln(dim), clipped to [0,1].
double fractal_dimension(const Eigen::VectorXcd& v);

struct CircleCounts {
  long on_count = 0;
  long off_count = 0;
  double max_radial_dev = 0.0;
};

/// Re-flags spec.on_circle at the given tolerance.
CircleCounts classify_circle(SpectrumResult& spec, double tol);
CircleCounts classify_circle(const std::vector<cplx>& z, double tol);

enum class PairingMode { pseudo, chiral };

/// Greedy matching of off-circle eigenvalues z to their images 1/conj(z) (pseudo) or
/// 1/z (chiral). Returns the largest match distance.
double pairing_residual(const std::vector<cplx>& z, PairingMode mode, double tol_circle = 1e-6);
double pairing_residual(const SpectrumResult& spec, PairingMode mode);

struct SymmetryResiduals {
  double pseudo_unitarity = 0.0;  // || P W^{-1} P^{-1} - W^dagger ||
  double pt = 0.0;                // || (PT) W~ (PT)^{-1} - W~^{-1} ||
  double pt_eta_flipped = 0.0;    // same against W~_{-eta}^{-1}
  double condition = 0.0;
};

/// Operator-norm residuals on the realified gauge at theta = 1/4. op must be a
/// realified walk or a timeframe; the PT residuals always use the timeframe of op.params.
SymmetryResiduals symmetry_residuals(const RingOperator& op);

/// Symmetric Hausdorff distance between two finite point sets.
double spectral_distance(const std::vector<cplx>& a, const std::vector<cplx>& b);

/// Dual ring with the wrap-around cell coupling removed.
Eigen::MatrixXcd open_dual_matrix(const WalkParams& params, long n_cells);

/// (1/2N) ln|det(open dual - z)| by LU.
double char_poly_growth(cplx z, const WalkParams& params, long n_cells);

/// (1/2) L#(z) - (1/2) ln|2/(lambda2(1 + lambda1'))| + (1/2) ln|z|.
/// closed_form uses the on-spectrum L#; numeric evaluates the dual cocycle at z.
double char_poly_prediction(cplx z, const WalkParams& params, Backend backend,
                            const LyapunovOptions& opt = {});

}  // namespace puamo
