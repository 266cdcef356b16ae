#pragma once

// Standard and internal log-scales, the quasi-ultrametric defect and the
// subsequence extraction used in the lower exponent bound.

#include "hypdyn/models.hpp"

#include <array>
#include <climits>
#include <cstdint>
#include <functional>
#include <vector>

namespace hypdyn {

struct LogScaleConfig {
  double epsilon0 = 0.05;
  int n_max = 40;

  void validate() const;
};

struct LogScaleValue {
  static constexpr int kInfinite = INT_MAX;

  int value = 0;
  bool truncated = false;

  bool infinite() const { return value == kInfinite; }
  /// Finite and below the truncation horizon.
  bool usable() const { return !infinite() && !truncated; }
  friend bool operator==(const LogScaleValue&, const LogScaleValue&) = default;
};

/// Largest n <= n_max with dist(f^k x, f^k y) <= epsilon0 for |k| <= n.
/// Returns -1 when k = 0 already fails.
LogScaleValue standard_ell(const PairOrbit& orbit, const LogScaleConfig& config);
LogScaleValue standard_ell(const System& system, const Point& x, const Point& y, const LogScaleConfig& config);

/// Stable: largest n0 with closeness for all n >= -n0 (forward tail checked
/// up to n_max). Unstable: largest n0 with closeness for all n <= n0.
/// Throws NotOnLeaf when the tail at the horizon is not close.
LogScaleValue internal_ell(const PairOrbit& orbit, Side side, const LogScaleConfig& config);
LogScaleValue internal_ell(const System& system, const Point& x, const Point& y, Side side,
                           const LogScaleConfig& config);

/// Symmetric matrix of log-scale readings over a leaf sample.
class EllMatrix {
 public:
  EllMatrix() = default;
  explicit EllMatrix(std::size_t n) : n_(n), data_(n * n, LogScaleValue{LogScaleValue::kInfinite, false}) {}

  std::size_t size() const { return n_; }
  const LogScaleValue& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, LogScaleValue v) {
    data_[i * n_ + j] = v;
    data_[j * n_ + i] = v;
  }
  /// Extremes over finite off-diagonal entries.
  int max_finite() const;
  int min_finite() const;

 private:
  std::size_t n_ = 0;
  std::vector<LogScaleValue> data_;
};

/// Internal log-scales of all pairs of a leaf sample. Torus samples are
/// translation invariant, so readings are shared between equal offsets.
EllMatrix internal_ell_matrix(const System& system, const LeafSample& sample, const LogScaleConfig& config,
                              int threads = 1);

struct EllTriple {
  double xy = 0;
  double yz = 0;
  double xz = 0;
  std::array<std::size_t, 3> ids{};
};

struct DeltaEstimate {
  double delta = 0.0;
  std::size_t triples_tested = 0;
  std::array<std::size_t, 3> worst_triple{};
};

/// Max over triples and their rotations of min(l(x,y), l(y,z)) - l(x,z),
/// clamped at 0. Throws InsufficientData below min_triples usable triples.
DeltaEstimate estimate_delta(const std::vector<EllTriple>& triples, std::size_t min_triples = 100);

/// All triples when there are at most max_triples of them, otherwise a
/// seeded random selection of distinct index triples. Triples containing a
/// non-usable reading are skipped.
std::vector<EllTriple> sample_triples(const EllMatrix& ell, std::size_t max_triples, std::uint64_t seed);

struct SubsequenceResult {
  std::vector<std::size_t> indices;
  bool degenerate_endpoints = false;
};

/// Greedy extraction over x_0..x_{count-1}: from y_i = x_r take the largest
/// s > r with l(x_r, x_s) >= n0 and continue from x_{s+1}; when s is the
/// last index the current y_i is replaced by it. If that happens at y_0 the
/// two endpoints are returned with degenerate_endpoints set.
SubsequenceResult subsequence_extract(const std::function<double(std::size_t, std::size_t)>& ell,
                                      std::size_t count, int n0, double delta);

}  // namespace hypdyn
