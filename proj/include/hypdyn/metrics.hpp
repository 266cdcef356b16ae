#pragma once

// Metrics synthesized from a log-scale by chain infima, the associated
// metric sandwich and the arclength check on one-dimensional leaves.

#include "hypdyn/logscale.hpp"
#include "hypdyn/models.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hypdyn {

struct SyntheticMetric {
  double beta = 0.0;
  std::size_t size = 0;
  std::vector<double> pairwise;  // row-major size x size

  double operator()(std::size_t i, std::size_t j) const { return pairwise[i * size + j]; }
};

/// Shortest paths in the complete graph on the sample with edge weights
/// e^{-beta ell(i, j)}.
SyntheticMetric synthesize_metric(const EllMatrix& ell, double beta);

struct SandwichFit {
  double c_lower = 0.0;
  double c_upper = 0.0;
  std::size_t pairs = 0;
  /// Held-out pairs outside [c_lower e^{-beta l}, c_upper e^{-beta l}].
  std::size_t violations = 0;
  std::size_t holdout_pairs = 0;

  double ratio() const { return c_lower / c_upper; }
};

struct HoldoutSpec {
  double fraction = 0.2;
  std::uint64_t seed = 1;
};

/// Extremes of d e^{beta l} over all pairs, or over the training part when a
/// holdout is configured.
SandwichFit verify_sandwich(const SyntheticMetric& metric, const EllMatrix& ell, double beta,
                            std::optional<HoldoutSpec> holdout = std::nullopt);

struct MetricAxioms {
  bool symmetric = true;
  double max_triangle_excess = 0.0;
  /// Pairs with d > e^{-beta l}.
  std::size_t upper_bound_violations = 0;
  std::size_t zero_off_diagonal = 0;
};
MetricAxioms check_metric_axioms(const SyntheticMetric& metric, const EllMatrix& ell);

/// Pairs violating d_low(x, y) >= d_high(x, y)^{beta_low / beta_high}.
std::size_t deformation_violations(const SyntheticMetric& low, const SyntheticMetric& high);

struct LeafMeasureResult {
  /// 1 / slope of the regression of ell on -ln(arclength).
  double fitted_exponent = 0.0;
  double regression_r2 = 0.0;
  /// Slope of ln mu(B(r)) against ln r divided by eta / fitted_exponent.
  double exponent_ratio = 0.0;
  double scaling_r2 = 0.0;
  double eta = 0.0;
  std::size_t pairs_used = 0;
};

/// Torus with a one-dimensional sample side, arclength as leaf measure.
/// Throws NotCodimensionOne otherwise and InsufficientData for tiny samples.
LeafMeasureResult leaf_measure_check(const System& system, const LeafSample& sample, const LogScaleConfig& config);

}  // namespace hypdyn
