#pragma once

// Lower and upper critical exponents of leaf log-scales estimated from the
// growth of d_n, plus the pinched-spectrum, entropy and codimension-one
// comparisons.

#include "hypdyn/leafgraph.hpp"
#include "hypdyn/logscale.hpp"
#include "hypdyn/models.hpp"

#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace hypdyn {

struct GrowthFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<int> n_used;
};

/// Least squares of ln d_n on n over finite readings with d_n >= 2.
/// Throws InsufficientData with fewer than 4 such readings.
GrowthFit growth_fit(const std::vector<std::pair<int, double>>& series);

struct ExponentConfig {
  LogScaleConfig logscale;
  /// Torus net spacing at the resolution level.
  double spacing = 1e-4;
  int n_lo = 2;
  /// Unset: min(12, n_max).
  std::optional<int> n_hi;
  /// Pairs are anchored at internal log-scale exactly equal to this value.
  int anchor = 0;
  /// Evenly spaced directions in 2-D leaf slices (eigendirections are added).
  int directions = 14;
  int magnitudes = 5;
  /// Magnitudes per direction on 1-D leaves.
  int line_magnitudes = 24;
  /// Half-width of the net around the pair segment, in net cells.
  int tube_cells = 4;
  /// Shift leaf sample depth.
  int depth = 6;
  std::size_t max_points = 2'000'000;
  double lower_percentile = 5.0;
  double upper_percentile = 95.0;
  int threads = 1;

  int resolved_n_hi() const;
};

struct PairGrowth {
  std::size_t pair_id = 0;
  /// Torus: displacement of the pair inside the leaf.
  Vec displacement;
  int ell = 0;
  /// d_n readings over [n_lo, n_hi]; kInfiniteDistance across components.
  std::vector<std::pair<int, int>> dn;
  /// Readings skipped because the net would exceed max_points.
  int truncated = 0;
  std::optional<GrowthFit> fit;
};

struct SideExponents {
  Side side = Side::stable;
  double lower = 0.0;
  double upper = 0.0;
  double raw_min = 0.0;
  double raw_max = 0.0;
  /// Interquartile range of the per-pair slopes.
  double spread = 0.0;
  bool disconnected = false;
  int n_lo = 0;
  int n_hi = 0;
  /// Torus: level at which d_n is evaluated after pulling the pair back.
  int resolution_level = 0;
  std::vector<double> slopes;
  std::vector<PairGrowth> pairs;
};

/// Nearest-rank percentile of unsorted values.
double percentile(std::vector<double> values, double p);

/// d_n(x, x + delta) on a torus leaf, via d_n(x, y) = d_{n-k}(f^-k x, f^-k y)
/// (stable; f^k for unstable) evaluated on a tube net at a fixed resolution
/// level. Empty when the net would exceed max_points.
std::optional<int> torus_dn(const ToralSystem& system, Side side, const Vec& delta, int n, const ExponentConfig& config);
/// Largest level whose inner edge radius is at least four net spacings.
int resolution_level(const ToralSystem& system, Side side, const ExponentConfig& config);

/// Throws InsufficientData with fewer than 20 anchored pairs and
/// TruncationDominated when most readings are missing.
SideExponents critical_exponents(const System& system, Side side, const ExponentConfig& config);

struct ExponentReport {
  SideExponents stable;
  SideExponents unstable;
  double a0 = 0, a1 = 0, b0 = 0, b1 = 0;
  double pinched_margin = std::numeric_limits<double>::quiet_NaN();
  bool finite() const;
};

ExponentReport exponent_report(const System& system, const ExponentConfig& config);

struct PinchedResult {
  double margin = 0.0;
  bool pinched = false;
};

/// margin = a0/a1 + b0/b1 - 1. Throws NonFiniteExponent unless all four are
/// finite and positive.
PinchedResult pinched_check(double a0, double a1, double b0, double b1);
PinchedResult pinched_check(const ExponentReport& report);

/// Sum of ln|lambda| over eigenvalues outside the unit circle.
double entropy_oracle(const Mat& matrix);
double entropy_oracle(const ToralSystem& system);

struct CodimOneResult {
  Side side = Side::stable;
  double a0 = 0.0;
  double a1 = 0.0;
  double eta = 0.0;
  double relative_gap = 0.0;
  double eta_gap = 0.0;
};

/// Throws NotCodimensionOne unless the system is toral with a 1-D side.
CodimOneResult codim_one_check(const System& system, Side side, const ExponentConfig& config);

/// Pairwise and doubling lower bounds on d_n over a sample.
struct LowerBoundCheck {
  double delta_hat = 0.0;
  double delta_used = 0.0;
  double alpha = 0.0;
  double constant = 0.0;
  std::size_t bound_checked = 0;
  std::size_t bound_violations = 0;
  std::size_t doubling_checked = 0;
  std::size_t doubling_violations = 0;
};

/// d_n >= C e^{alpha (n - l)} with alpha = ln 2 / D, C = 2^{(-1-D)/D} and
/// d_{n+D} >= 2 d_n - 1, where D = max(delta_hat, 1) rounded up.
LowerBoundCheck lower_bound_check(const EllMatrix& ell, double delta_hat, int n_lo, int n_hi,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

}  // namespace hypdyn
