#pragma once

// Levelled graphs over lattice data (G = Z^d, phi, a tube Sigma around the
// contracting subspace, generators S), four-point hyperbolicity estimates
// and the boundary map to the contracting subspace.

#include "hypdyn/linear.hpp"

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace hypdyn {

struct GroupData {
  IntMat phi;
  int s_rad = 1;
  double tube_radius = 1.5;
  SpectralSplit split;

  /// Validates |det| = 1, hyperbolicity, s_rad >= 0 and tube_radius > 0.
  static GroupData make(const IntMat& phi, int s_rad, double tube_radius);
  int dim() const { return static_cast<int>(phi.rows()); }
  /// All g with |g|_inf <= s_rad.
  std::vector<IntVec> generators() const;
};

inline constexpr std::size_t kMaxXiVertices = 1'000'000;
inline constexpr double kMaxXiBox = 1e8;

struct LevelledGraph {
  GroupData data;
  int levels = 0;  // N: levels run over [-N, N]
  int rho = 0;
  /// Lattice points of Sigma with |g|_inf <= rho.
  std::vector<IntVec> points;
  std::vector<std::vector<std::uint32_t>> adjacency;

  std::size_t size() const { return adjacency.size(); }
  std::size_t vertex(std::size_t point, int level) const {
    return static_cast<std::size_t>(level + levels) * points.size() + point;
  }
  std::size_t point_of(std::size_t v) const { return v % points.size(); }
  int level_of(std::size_t v) const { return static_cast<int>(v / points.size()) - levels; }
  std::optional<std::size_t> find_point(const IntVec& g) const;
  bool adjacent(std::size_t u, std::size_t v) const;

  std::unordered_map<std::int64_t, std::size_t> index;
  std::int64_t key(const IntVec& g) const;
};

/// Vertices (g, n) with g in Sigma, |g|_inf <= rho, |n| <= N. Horizontal
/// edges join g1, g2 with g2 - g1 in S at one level; vertical edges join
/// (g1, n), (g2, n + 1) with phi(g2) - g1 in S. Throws Oversize past the
/// vertex or box budget.
LevelledGraph build_xi(const GroupData& data, int levels, int rho);

struct HyperbolicityEstimate {
  double delta = 0.0;
  std::size_t quadruples_tested = 0;
  int levels = 0;
  int rho = 0;
  std::size_t vertices = 0;
  std::size_t component_size = 0;
  bool restricted_to_component = false;
};

/// Four-point defect max over sampled quadruples, using the base (0, 0)
/// when present plus random bases, all restricted to the largest component.
HyperbolicityEstimate delta_hyperbolicity(const LevelledGraph& graph, std::size_t quadruples, std::uint64_t seed,
                                          int threads = 1);
HyperbolicityEstimate delta_hyperbolicity(const std::vector<std::vector<std::uint32_t>>& adjacency,
                                          std::optional<std::size_t> fixed_base, std::size_t quadruples,
                                          std::uint64_t seed, int threads = 1);

std::vector<int> bfs(const std::vector<std::vector<std::uint32_t>>& adjacency, std::size_t source);

/// P+(phi^{n_stop}(p_{n_stop})) for a path p_0, p_1, ... with
/// phi(p_k) - p_{k-1} in S. Throws InvalidPath when a step leaves S.
Vec boundary_point(const GroupData& data, const std::vector<IntVec>& path, int n_stop);

}  // namespace hypdyn
