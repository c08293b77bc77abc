#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "puamo/quasiperiodic.hpp"

namespace puamo {

enum class Boundary { periodic, open };
/// standard: coin Q at the given theta. realified: coin Q^R (theta fixed to 1/4).
enum class CoinGauge { standard, realified };
enum class OperatorKind { walk, skin_conjugated, dual, timeframe };

const char* to_string(Boundary bc);
Boundary parse_boundary(const std::string& s);

/// Dense 2N x 2N realization of a walk on N cells. Index 2n is chirality +,
/// index 2n+1 is chirality -.
struct RingOperator {
  Eigen::MatrixXcd matrix;
  Boundary bc = Boundary::periodic;
  WalkParams params;
  long n_cells = 0;
  double ring_phi = 0.0;  // frequency actually used for the coins
  CoinGauge gauge = CoinGauge::standard;
  OperatorKind kind = OperatorKind::walk;
  std::vector<std::string> warnings;

  long dim() const { return 2 * n_cells; }
};

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(long n_cells) : amp_(Eigen::VectorXcd::Zero(2 * n_cells)) {}
  explicit StateVector(Eigen::VectorXcd amplitudes);

  static StateVector delta(long n_cells, long cell, int chirality);  // chirality +1 / -1

  long n_cells() const { return amp_.size() / 2; }
  cplx& plus(long n) { return amp_[2 * n]; }
  cplx& minus(long n) { return amp_[2 * n + 1]; }
  cplx plus(long n) const { return amp_[2 * n]; }
  cplx minus(long n) const { return amp_[2 * n + 1]; }
  const Eigen::VectorXcd& amplitudes() const { return amp_; }
  Eigen::VectorXcd& amplitudes() { return amp_; }
  double norm() const { return amp_.norm(); }

 private:
  Eigen::VectorXcd amp_;
};

struct BlockFactorization {
  std::vector<Mat2> l_blocks;  // tilted cells {(k-1, -), (k, +)}
  std::vector<Mat2> m_blocks;  // straight cells {(k, +), (k, -)}
  long n_cells = 0;

  Eigen::MatrixXcd assemble_l() const;
  Eigen::MatrixXcd assemble_m() const;
};

/// Coins used on a ring: convergent frequency p/N when N is a denominator.
RingFrequency ring_frequency(const WalkParams& params, long n_cells);

/// W_N = S_{lambda1, eta} Q.
RingOperator build_walk(const WalkParams& params, long n_cells, Boundary bc = Boundary::periodic,
                        CoinGauge gauge = CoinGauge::standard);

/// One step of W in O(N), same conventions as build_walk.
StateVector apply_walk(const WalkParams& params, const StateVector& state,
                       Boundary bc = Boundary::periodic);

enum class SkinDirection { forward, inverse };

/// Diagonal similarity e^{2 pi eta n} moving all non-reciprocity into the wrap-around
/// corners (factors e^{-+2 pi N eta}). inverse undoes it.
RingOperator skin_conjugate(const RingOperator& op, SkinDirection dir = SkinDirection::forward);

BlockFactorization cmv_factorize(const WalkParams& params, long n_cells);

/// Parameters of the dual walk: (lambda2, lambda1, eta -> -eps, eps -> -eta).
WalkParams dual_params(const WalkParams& params);

/// Matrix of the transposed dual walk on a ring of N cells (phase offset xi = 0).
RingOperator build_dual_walk(const WalkParams& params, long n_cells);

/// U(xi = 0): DFT composed with the cellwise (1, i; i, 1)/sqrt2 rotation.
/// U W U^{-1} equals the dual matrix.
Eigen::MatrixXcd dual_unitary(const WalkParams& params, long n_cells);

/// Principal square root of a 2x2 matrix. Throws SingularCellError(cell) when an
/// eigenvalue lies on the closed negative real axis.
Mat2 principal_sqrt(const Mat2& a, long cell);

/// (Q^R)^{1/2} S_{lambda1, eta} (Q^R)^{1/2}. Requires theta = 1/4.
RingOperator timeframe(const WalkParams& params, long n_cells);

struct SymmetryOperators {
  Eigen::MatrixXcd parity;  // n -> -n mod N, block sigma2
  Eigen::MatrixXcd pt;      // n -> -n mod N, block sigma3, followed by conjugation
  bool pt_conjugates = true;
  Eigen::MatrixXcd chiral;  // blockwise sigma1
};

SymmetryOperators symmetry_operators(long n_cells);

struct EvolutionSample {
  long step = 0;
  double second_moment = 0.0;
  double participation = 0.0;  // inverse participation ratio sum p^2
};

struct Evolution {
  std::vector<EvolutionSample> samples;
  std::vector<std::string> warnings;
};

/// Repeated apply_walk. Positions are measured from the cell carrying the largest
/// initial weight and folded into [-N/2, N/2).
Evolution evolve(const WalkParams& params, const StateVector& initial, long steps,
                 Boundary bc = Boundary::periodic, long record_every = 1);

}  // namespace puamo
