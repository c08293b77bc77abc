#include "puamo/walk_operator.hpp"

#include <cmath>
#include <sstream>

#include "puamo/error.hpp"

namespace puamo {

namespace {

using Eigen::MatrixXcd;

const cplx kI(0.0, 1.0);

long wrap(long n, long N) {
  long m = n % N;
  return m < 0 ? m + N : m;
}

// Hop amplitudes of a split-step shift.
//   (S psi)_n^+ = plus_hop(n) psi_{n-1}^+ - lp psi_n^-
//   (S psi)_n^- = minus_hop(n) psi_{n+1}^- + lp psi_n^+
struct ShiftHops {
  cplx plus_bulk, plus_wrap;    // plus_wrap is used at n = 0
  cplx minus_bulk, minus_wrap;  // minus_wrap is used at n = N-1
  double lp = 0.0;
};

ShiftHops standard_hops(const CouplingPair& c, double eta) {
  const double l = c.lambda();
  const double up = std::exp(kTwoPi * eta), down = std::exp(-kTwoPi * eta);
  return {l * up, l * up, l * down, l * down, c.lambda_prime()};
}

MatrixXcd shift_matrix(const ShiftHops& h, long N, Boundary bc) {
  MatrixXcd S = MatrixXcd::Zero(2 * N, 2 * N);
  const bool per = bc == Boundary::periodic;
  for (long n = 0; n < N; ++n) {
    if (n > 0)
      S(2 * n, 2 * (n - 1)) += h.plus_bulk;
    else if (per)
      S(2 * n, 2 * (N - 1)) += h.plus_wrap;
    S(2 * n, 2 * n + 1) += -h.lp;

    if (n < N - 1)
      S(2 * n + 1, 2 * (n + 1) + 1) += h.minus_bulk;
    else if (per)
      S(2 * n + 1, 1) += h.minus_wrap;
    S(2 * n + 1, 2 * n) += h.lp;
  }
  return S;
}

// M * blockdiag(blocks)
MatrixXcd times_block_diag(const MatrixXcd& M, const std::vector<Mat2>& blocks) {
  MatrixXcd out(M.rows(), M.cols());
  for (std::size_t m = 0; m < blocks.size(); ++m) {
    const long c = 2 * static_cast<long>(m);
    out.middleCols(c, 2).noalias() = M.middleCols(c, 2) * blocks[m];
  }
  return out;
}

// blockdiag(blocks) * M
MatrixXcd block_diag_times(const std::vector<Mat2>& blocks, const MatrixXcd& M) {
  MatrixXcd out(M.rows(), M.cols());
  for (std::size_t m = 0; m < blocks.size(); ++m) {
    const long r = 2 * static_cast<long>(m);
    out.middleRows(r, 2).noalias() = blocks[m] * M.middleRows(r, 2);
  }
  return out;
}

std::vector<Mat2> ring_coins(const WalkParams& p, long N, double phi, CoinGauge gauge) {
  std::vector<Mat2> q(N);
  for (long n = 0; n < N; ++n)
    q[n] = gauge == CoinGauge::standard ? coin_block(p.coupling2, phi, p.theta, p.eps, n)
                                        : realified_coin(n, p.coupling2, phi, p.eps);
  return q;
}

void require_cells(long N) {
  if (N < 2) throw DomainError("ring needs at least 2 cells");
}

void require_quarter_theta(const WalkParams& p, const char* what) {
  if (std::abs(p.theta - 0.25) > 1e-12)
    throw DomainError(std::string(what) + " requires theta = 1/4");
}

RingOperator make_op(const WalkParams& params, long N, Boundary bc, CoinGauge gauge,
                     OperatorKind kind) {
  RingOperator op;
  op.bc = bc;
  op.params = params;
  op.n_cells = N;
  op.gauge = gauge;
  op.kind = kind;
  RingFrequency rf = ring_frequency(params, N);
  op.ring_phi = rf.phi;
  if (!rf.commensurate) {
    std::ostringstream os;
    os << "N=" << N << " is not a convergent denominator of phi=" << params.freq.phi();
    op.warnings.push_back(os.str());
  }
  return op;
}

Mat2 sigma(int k) {
  Mat2 s;
  if (k == 1) s << 0, 1, 1, 0;
  if (k == 2) s << 0, -kI, kI, 0;
  if (k == 3) s << 1, 0, 0, -1;
  return s;
}

MatrixXcd parity_like(long N, const Mat2& blk) {
  MatrixXcd P = MatrixXcd::Zero(2 * N, 2 * N);
  for (long n = 0; n < N; ++n) P.block(2 * wrap(-n, N), 2 * n, 2, 2) = blk;
  return P;
}

}  // namespace

const char* to_string(Boundary bc) { return bc == Boundary::periodic ? "periodic" : "open"; }

Boundary parse_boundary(const std::string& s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "open") return Boundary::open;
  throw DomainError("unknown boundary condition '" + s + "'");
}

StateVector::StateVector(Eigen::VectorXcd amplitudes) : amp_(std::move(amplitudes)) {
  if (amp_.size() % 2 != 0) throw DomainError("state vector length must be even");
}

StateVector StateVector::delta(long n_cells, long cell, int chirality) {
  if (cell < 0 || cell >= n_cells) throw DomainError("delta state: cell out of range");
  StateVector s(n_cells);
  (chirality >= 0 ? s.plus(cell) : s.minus(cell)) = 1.0;
  return s;
}

MatrixXcd BlockFactorization::assemble_l() const {
  const long N = n_cells;
  MatrixXcd L = MatrixXcd::Zero(2 * N, 2 * N);
  for (long k = 0; k < N; ++k) {
    const long a = 2 * wrap(k - 1, N) + 1, b = 2 * k;
    const Mat2& B = l_blocks[k];
    L(a, a) += B(0, 0);
    L(a, b) += B(0, 1);
    L(b, a) += B(1, 0);
    L(b, b) += B(1, 1);
  }
  return L;
}

MatrixXcd BlockFactorization::assemble_m() const {
  MatrixXcd M = MatrixXcd::Zero(2 * n_cells, 2 * n_cells);
  for (long k = 0; k < n_cells; ++k) M.block(2 * k, 2 * k, 2, 2) = m_blocks[k];
  return M;
}

RingFrequency ring_frequency(const WalkParams& params, long n_cells) {
  return params.freq.ring_frequency(n_cells);
}

RingOperator build_walk(const WalkParams& params, long N, Boundary bc, CoinGauge gauge) {
  require_cells(N);
  if (gauge == CoinGauge::realified) require_quarter_theta(params, "realified gauge");
  RingOperator op = make_op(params, N, bc, gauge, OperatorKind::walk);
  MatrixXcd S = shift_matrix(standard_hops(params.coupling1, params.eta), N, bc);
  op.matrix = times_block_diag(S, ring_coins(params, N, op.ring_phi, gauge));
  return op;
}

StateVector apply_walk(const WalkParams& params, const StateVector& state, Boundary bc) {
  const long N = state.n_cells();
  require_cells(N);
  const double phi = ring_frequency(params, N).phi;
  const double l = params.coupling1.lambda(), lp = params.coupling1.lambda_prime();
  const double up = l * std::exp(kTwoPi * params.eta), down = l * std::exp(-kTwoPi * params.eta);

  // coin first, cellwise
  Eigen::VectorXcd c(2 * N);
  for (long n = 0; n < N; ++n) {
    Mat2 q = coin_block(params.coupling2, phi, params.theta, params.eps, n);
    c.segment<2>(2 * n) = q * state.amplitudes().segment<2>(2 * n);
  }
  StateVector out(N);
  const bool per = bc == Boundary::periodic;
  for (long n = 0; n < N; ++n) {
    cplx plus = -lp * c[2 * n + 1];
    if (n > 0 || per) plus += up * c[2 * wrap(n - 1, N)];
    cplx minus = lp * c[2 * n];
    if (n < N - 1 || per) minus += down * c[2 * wrap(n + 1, N) + 1];
    out.plus(n) = plus;
    out.minus(n) = minus;
  }
  return out;
}

RingOperator skin_conjugate(const RingOperator& op, SkinDirection dir) {
  const bool from_walk = op.kind == OperatorKind::walk;
  const bool from_skin = op.kind == OperatorKind::skin_conjugated;
  if (!(dir == SkinDirection::forward ? from_walk : from_skin))
    throw DomainError("skin_conjugate: operator kind does not match the direction");
  const long N = op.n_cells;
  const double eta = op.params.eta;
  if (dir == SkinDirection::inverse) return build_walk(op.params, N, op.bc, op.gauge);
  if (eta == 0.0) return op;
  if (kTwoPi * static_cast<double>(N) * std::abs(eta) > 700.0)
    throw RangeError("skin_conjugate: corner factor exp(2 pi N |eta|) overflows");

  RingOperator out = op;
  out.kind = OperatorKind::skin_conjugated;
  const CouplingPair& c = op.params.coupling1;
  const double l = c.lambda();
  const double big = kTwoPi * static_cast<double>(N) * eta;
  ShiftHops h{l, l * std::exp(big), l, l * std::exp(-big), c.lambda_prime()};
  MatrixXcd S = shift_matrix(h, N, op.bc);
  out.matrix = times_block_diag(S, ring_coins(op.params, N, op.ring_phi, op.gauge));
  return out;
}

BlockFactorization cmv_factorize(const WalkParams& params, long N) {
  require_cells(N);
  BlockFactorization f;
  f.n_cells = N;
  const double phi = ring_frequency(params, N).phi;
  const double l = params.coupling1.lambda(), lp = params.coupling1.lambda_prime();
  Mat2 lb;
  lb << lp, l * std::exp(-kTwoPi * params.eta),
        l * std::exp(kTwoPi * params.eta), -lp;
  const Mat2 s1 = sigma(1);
  for (long k = 0; k < N; ++k) {
    f.l_blocks.push_back(lb);
    f.m_blocks.push_back(s1 * coin_block(params.coupling2, phi, params.theta, params.eps, k));
  }
  return f;
}

WalkParams dual_params(const WalkParams& p) {
  WalkParams d = p;
  d.coupling1 = p.coupling2;
  d.coupling2 = p.coupling1;
  d.eta = -p.eps;
  d.eps = -p.eta;
  return d;
}

RingOperator build_dual_walk(const WalkParams& params, long N) {
  require_cells(N);
  RingOperator op = make_op(params, N, Boundary::periodic, CoinGauge::standard, OperatorKind::dual);
  if (!op.warnings.empty())
    throw DomainError("dual walk: N must be a convergent denominator of phi");
  const double phi = op.ring_phi;

  // transposed coins Q_{lambda1} at phase n phi - i eta
  std::vector<Mat2> qt(N);
  for (long n = 0; n < N; ++n)
    qt[n] = coin_block(params.coupling1, phi, 0.0, -params.eta, n).transpose();

  // transposed shift S_{lambda2} with complex phase theta + i eps on the hops
  const double l = params.coupling2.lambda(), lp = params.coupling2.lambda_prime();
  const cplx e = std::polar(std::exp(-kTwoPi * params.eps), kTwoPi * params.theta);
  MatrixXcd St = MatrixXcd::Zero(2 * N, 2 * N);
  for (long n = 0; n < N; ++n) {
    St(2 * n, 2 * wrap(n + 1, N)) += l * e;
    St(2 * n, 2 * n + 1) += lp;
    St(2 * n + 1, 2 * wrap(n - 1, N) + 1) += l / e;
    St(2 * n + 1, 2 * n) += -lp;
  }
  op.matrix = block_diag_times(qt, St);
  return op;
}

MatrixXcd dual_unitary(const WalkParams& params, long N) {
  require_cells(N);
  const double phi = ring_frequency(params, N).phi;
  const double s = 1.0 / std::sqrt(2.0 * static_cast<double>(N));
  MatrixXcd U(2 * N, 2 * N);
  for (long n = 0; n < N; ++n)
    for (long m = 0; m < N; ++m) {
      double x = static_cast<double>(m) * static_cast<double>(n) * phi;
      x -= std::floor(x);
      cplx e = s * std::polar(1.0, kTwoPi * x);
      U(2 * n, 2 * m) = e;
      U(2 * n, 2 * m + 1) = kI * e;
      U(2 * n + 1, 2 * m) = kI * e;
      U(2 * n + 1, 2 * m + 1) = e;
    }
  return U;
}

Mat2 principal_sqrt(const Mat2& a, long cell) {
  const cplx tr = a.trace(), det = a.determinant();
  const cplx disc = std::sqrt(0.25 * tr * tr - det);
  const cplx mu[2] = {0.5 * tr + disc, 0.5 * tr - disc};
  for (const cplx& m : mu)
    if (m.real() <= 0.0 && std::abs(m.imag()) <= 1e-14 * std::max(1.0, std::abs(m)))
      throw SingularCellError("principal square root undefined: eigenvalue on the negative axis",
                              cell);
  const cplx r1 = std::sqrt(mu[0]), r2 = std::sqrt(mu[1]);
  return (a + r1 * r2 * Mat2::Identity()) / (r1 + r2);
}

RingOperator timeframe(const WalkParams& params, long N) {
  require_cells(N);
  require_quarter_theta(params, "timeframe");
  RingOperator op =
      make_op(params, N, Boundary::periodic, CoinGauge::realified, OperatorKind::timeframe);
  std::vector<Mat2> r(N);
  for (long n = 0; n < N; ++n)
    r[n] = principal_sqrt(realified_coin(n, params.coupling2, op.ring_phi, params.eps), n);
  MatrixXcd S = shift_matrix(standard_hops(params.coupling1, params.eta), N, Boundary::periodic);
  op.matrix = block_diag_times(r, times_block_diag(S, r));
  return op;
}

SymmetryOperators symmetry_operators(long N) {
  require_cells(N);
  SymmetryOperators s;
  s.parity = parity_like(N, sigma(2));
  s.pt = parity_like(N, sigma(3));
  s.chiral = MatrixXcd::Zero(2 * N, 2 * N);
  for (long n = 0; n < N; ++n) s.chiral.block(2 * n, 2 * n, 2, 2) = sigma(1);
  return s;
}

Evolution evolve(const WalkParams& params, const StateVector& initial, long steps, Boundary bc,
                 long record_every) {
  if (steps < 0) throw DomainError("evolve: steps must be >= 0");
  if (record_every < 1) record_every = 1;
  const long N = initial.n_cells();
  require_cells(N);
  Evolution ev;
  if (params.coupling1.lambda() * static_cast<double>(steps) > 0.5 * static_cast<double>(N))
    ev.warnings.push_back("wavefront may wrap around the ring");

  auto cell_weights = [N](const StateVector& s) {
    Eigen::VectorXd w(N);
    for (long n = 0; n < N; ++n) w[n] = std::norm(s.plus(n)) + std::norm(s.minus(n));
    return w;
  };
  Eigen::Index origin = 0;
  cell_weights(initial).maxCoeff(&origin);

  auto sample = [&](long step, const StateVector& s) {
    Eigen::VectorXd w = cell_weights(s);
    const double total = w.sum();
    EvolutionSample out;
    out.step = step;
    if (!(total > 0.0)) return out;
    w /= total;
    double m2 = 0.0;
    for (long n = 0; n < N; ++n) {
      long x = wrap(n - static_cast<long>(origin) + N / 2, N) - N / 2;  // [-N/2, N/2)
      m2 += static_cast<double>(x) * static_cast<double>(x) * w[n];
    }
    out.second_moment = m2;
    out.participation = w.squaredNorm();
    return out;
  };

  StateVector s = initial;
  ev.samples.push_back(sample(0, s));
  for (long t = 1; t <= steps; ++t) {
    s = apply_walk(params, s, bc);
    if (t % record_every == 0 || t == steps) ev.samples.push_back(sample(t, s));
  }
  return ev;
}

}  // namespace puamo
