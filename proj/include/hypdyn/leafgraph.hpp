#pragma once

// Graphs over leaf nets: the log-scale graphs Gamma_n, the cover graphs
// Gamma'_n, BFS distances and connectivity diagnostics.

#include "hypdyn/logscale.hpp"
#include "hypdyn/models.hpp"

#include <array>
#include <climits>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace hypdyn {

/// Distance between vertices in different components.
inline constexpr int kInfiniteDistance = INT_MAX;

enum class GraphKind { gamma, gamma_prime };

struct LeafGraph {
  GraphKind kind = GraphKind::gamma;
  int n = 0;
  double cover_scale = 0.0;
  /// Sorted neighbour lists; no self-loops.
  std::vector<std::vector<std::uint32_t>> adjacency;

  std::size_t size() const { return adjacency.size(); }
  std::size_t edge_count() const;
  bool adjacent(std::size_t i, std::size_t j) const;
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;
};

/// Edge (i, j) iff ell(i, j) >= n.
LeafGraph build_gamma(const EllMatrix& ell, int n);

std::vector<int> bfs_distances(const LeafGraph& graph, std::size_t source);
int graph_distance(const LeafGraph& graph, std::size_t i, std::size_t j);

struct Components {
  std::size_t count = 0;
  std::vector<std::size_t> label;
  std::size_t largest_label = 0;
  std::size_t largest_size = 0;
};
Components connected_components(const LeafGraph& graph);

/// Edge (i, j) iff both points lie in f^n(T) (stable side) or f^-n(T)
/// (unstable side) for one plaque T of one cover element. Torus cover:
/// overlapping cubes of side at most cover_scale; shift cover: cylinders on
/// positions -1..1. Throws CoverTooCoarse when cover_scale exceeds the
/// bracket radius.
LeafGraph build_gamma_prime(const System& system, const LeafSample& sample, double cover_scale, int n);

/// Bounds on the leaf radius of Gamma_n edges: every displacement shorter
/// than inner is an edge, none longer than outer is.
struct LevelRadii {
  double inner = 0.0;
  double outer = 0.0;
};
LevelRadii level_radii(const ToralSystem& system, Side side, int n, const LogScaleConfig& config);

/// Regular grid {origin + a*axis_a + b*axis_b} inside a torus leaf. Its
/// Gamma_n graph is translation invariant and is described by a stencil.
struct LeafGrid {
  const ToralSystem* system = nullptr;
  Side side = Side::stable;
  Vec axis_a;
  Vec axis_b;  // zero for line grids
  long count_a = 1;
  long count_b = 1;

  std::size_t size() const { return static_cast<std::size_t>(count_a * count_b); }
  std::size_t index(long a, long b) const { return static_cast<std::size_t>(a * count_b + b); }
  Vec displacement(long da, long db) const;
};

/// Non-zero grid offsets (both signs) whose displacement has internal
/// log-scale at least n.
std::vector<std::array<long, 2>> level_stencil(const LeafGrid& grid, int n, const LogScaleConfig& config);

/// BFS on the implicit stencil graph; stops early once target is reached.
std::vector<int> grid_bfs(const LeafGrid& grid, const std::vector<std::array<long, 2>>& stencil, std::size_t source,
                          std::optional<std::size_t> target = std::nullopt);

struct ConnectivityLevel {
  int n = 0;
  bool connected = true;
  std::size_t components = 1;
  int diameter = 0;  // kInfiniteDistance when disconnected
  std::size_t vertices = 0;
  double spacing = 0.0;  // torus only
};

struct ConnectivityReport {
  std::vector<ConnectivityLevel> levels;
  /// Disconnection persists to all higher levels.
  bool monotone() const;
};

struct ConnectivityConfig {
  LogScaleConfig logscale;
  SampleSpec sample;
  int n_lo = 0;
  int n_hi = 8;
  /// Torus: per level, shrink the net spacing to a quarter of the inner edge
  /// radius so the net can resolve Gamma_n.
  bool refine = true;
  int threads = 1;
};

ConnectivityReport connectivity_report(const System& system, Side side, const ConnectivityConfig& config);
ConnectivityReport connectivity_report(const System& system, const Point& base, Side side,
                                       const ConnectivityConfig& config);

}  // namespace hypdyn
