#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "puamo/spectral.hpp"

namespace puamo {

struct Axis {
  std::string name;
  std::vector<double> values;
};

struct CellResult {
  double mean_fractal_dim = 0.0;
  double frac_on_circle = 0.0;
  double lyap_left = 0.0;   // closed form
  double lyap_right = 0.0;  // closed form
  long n_eigen = 0;
};

/// Row-major by (axis1 index, axis2 index).
struct SweepGrid {
  Axis axis1;
  Axis axis2;
  std::vector<CellResult> cells;

  const CellResult& at(std::size_t i, std::size_t j) const {
    return cells[i * axis2.values.size() + j];
  }
};

std::vector<double> linspace(double a, double b, long n);

int default_jobs();

/// Runs fn(0..n-1) on up to `jobs` threads. Each index is visited exactly once.
void parallel_for(long n, int jobs, const std::function<void(long)>& fn);

CellResult evaluate_cell(const WalkParams& params, long n_cells, Boundary bc = Boundary::periodic,
                         double tol_circle = 1e-6);

/// axis1 = eta, axis2 = eps.
SweepGrid phase_diagram(const WalkParams& base, const std::vector<double>& etas,
                        const std::vector<double>& epss, long n_cells,
                        Boundary bc = Boundary::periodic, int jobs = 1);

/// Closed-form delocalized cell: min(L_left, L_right) <= 0.
bool closed_form_delocalized(const CellResult& c);

struct MaskComparison {
  std::vector<bool> empirical;  // mean fractal dim above the grid median
  std::vector<bool> closed;
  double median = 0.0;
  long mismatches = 0;
  long max_boundary_distance = 0;  // Chebyshev distance of a mismatch to the closed boundary
};

MaskComparison compare_delocalized_mask(const SweepGrid& grid);

/// printf "%.12e".
std::string format_double(double x);

std::string svg_scatter(const std::vector<cplx>& z, const std::vector<double>& color,
                        const std::string& title);
std::string svg_heatmap(const SweepGrid& grid, const std::string& title);

using Config = std::map<std::string, std::string>;

/// Flat "key = value" text; '#' starts a comment.
Config read_config(const std::string& path);

struct ValidationConfig {
  bool quick = false;
  double perturb = 0.0;  // noise added to W_N in the duality and pairing checks
  std::uint64_t seed = 1;
};

struct ValidationEntry {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

std::vector<ValidationEntry> run_validation(const ValidationConfig& cfg);

}  // namespace puamo
