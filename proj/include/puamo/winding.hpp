#pragma once

#include <optional>
#include <string>
#include <vector>

#include "puamo/spectral.hpp"

namespace puamo {

struct WindingResult {
  int value = 0;
  double raw = 0.0;
  double residual = 0.0;
  long M_theta = 0;
  long n_cells = 0;
  cplx z;
  double eps = 0.0;
  long refinements = 0;       // subintervals that needed local doubling
  double min_pivot = 0.0;     // smallest |U_kk| seen over all LU factorizations

  bool trusted() const { return residual < 0.1; }
};

/// Winding of theta -> det(W_N(theta + i eps) - z) over [0,1], divided by N.
WindingResult winding_number(cplx z, double eps, const WalkParams& params, long n_cells,
                             long M_theta = 2048);

struct GapPoints {
  std::vector<cplx> points;  // widest gap first
  std::vector<double> widths;
  std::vector<std::string> warnings;
};

/// Midpoints of the `count` widest angular gaps between on-circle eigenvalues.
GapPoints gap_points(const SpectrumResult& spec_at_eps0, long count, double min_width = 1e-3);

struct WindingProfile {
  std::vector<WindingResult> results;
  std::optional<double> jump_location;  // midpoint between last 0 and first nonzero
};

WindingProfile winding_profile(cplx z, const WalkParams& params, long n_cells,
                               const std::vector<double>& eps_grid, long M_theta = 2048);

}  // namespace puamo
