#include "hypdyn/leafgraph.hpp"

#include "hypdyn/errors.hpp"
#include "hypdyn/parallel.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hypdyn {

std::size_t LeafGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& row : adjacency) total += row.size();
  return total / 2;
}

bool LeafGraph::adjacent(std::size_t i, std::size_t j) const {
  const auto& row = adjacency.at(i);
  return std::binary_search(row.begin(), row.end(), static_cast<std::uint32_t>(j));
}

std::vector<std::pair<std::size_t, std::size_t>> LeafGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < adjacency.size(); ++i)
    for (auto j : adjacency[i])
      if (j > i) out.emplace_back(i, j);
  return out;
}

LeafGraph build_gamma(const EllMatrix& ell, int n) {
  LeafGraph g;
  g.kind = GraphKind::gamma;
  g.n = n;
  g.adjacency.resize(ell.size());
  for (std::size_t i = 0; i < ell.size(); ++i)
    for (std::size_t j = 0; j < ell.size(); ++j)
      if (i != j && ell(i, j).value >= n) g.adjacency[i].push_back(static_cast<std::uint32_t>(j));
  return g;
}

std::vector<int> bfs_distances(const LeafGraph& graph, std::size_t source) {
  std::vector<int> dist(graph.size(), kInfiniteDistance);
  std::vector<std::uint32_t> queue;
  queue.reserve(graph.size());
  dist.at(source) = 0;
  queue.push_back(static_cast<std::uint32_t>(source));
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto u = queue[head];
    for (auto v : graph.adjacency[u]) {
      if (dist[v] != kInfiniteDistance) continue;
      dist[v] = dist[u] + 1;
      queue.push_back(v);
    }
  }
  return dist;
}

int graph_distance(const LeafGraph& graph, std::size_t i, std::size_t j) {
  if (i == j) return 0;
  return bfs_distances(graph, i).at(j);
}

Components connected_components(const LeafGraph& graph) {
  Components c;
  const std::size_t unset = graph.size();
  c.label.assign(graph.size(), unset);
  std::vector<std::size_t> sizes;
  for (std::size_t s = 0; s < graph.size(); ++s) {
    if (c.label[s] != unset) continue;
    const std::size_t id = c.count++;
    std::size_t size = 0;
    std::vector<std::size_t> stack{s};
    c.label[s] = id;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      ++size;
      for (auto v : graph.adjacency[u])
        if (c.label[v] == unset) {
          c.label[v] = id;
          stack.push_back(v);
        }
    }
    if (size > c.largest_size) {
      c.largest_size = size;
      c.largest_label = id;
    }
  }
  return c;
}

namespace {

long right_horizon(const SymbolicPoint& x, const SymbolicPoint& y) {
  return std::max(x.core_hi(), y.core_hi()) +
         std::lcm(static_cast<long>(x.right_cycle.size()), static_cast<long>(y.right_cycle.size()));
}

long left_horizon(const SymbolicPoint& x, const SymbolicPoint& y) {
  return std::min(x.core_lo(), y.core_lo()) -
         std::lcm(static_cast<long>(x.left_cycle.size()), static_cast<long>(y.left_cycle.size()));
}

bool agree_from(const SymbolicPoint& x, const SymbolicPoint& y, long from) {
  const long end = std::max(right_horizon(x, y), from);
  for (long k = from; k <= end; ++k)
    if (x.at(k) != y.at(k)) return false;
  return true;
}

bool agree_to(const SymbolicPoint& x, const SymbolicPoint& y, long to) {
  const long end = std::min(left_horizon(x, y), to);
  for (long k = to; k >= end; --k)
    if (x.at(k) != y.at(k)) return false;
  return true;
}

}  // namespace

LeafGraph build_gamma_prime(const System& system, const LeafSample& sample, double cover_scale, int n) {
  LeafGraph g;
  g.kind = GraphKind::gamma_prime;
  g.n = n;
  g.cover_scale = cover_scale;
  const std::size_t count = sample.size();
  g.adjacency.resize(count);
  const int pull = sample.side == Side::stable ? -n : n;

  if (const auto* t = std::get_if<ToralSystem>(&system)) {
    if (!(cover_scale > 0.0)) throw Error(ErrorKind::InvalidInput, "cover_scale must be positive");
    if (cover_scale > t->bracket_radius)
      throw Error(ErrorKind::CoverTooCoarse, "cover_scale " + std::to_string(cover_scale) +
                                                 " exceeds bracket_radius " + std::to_string(t->bracket_radius));
    // Cubes [j g, j g + 2g) with g = 1/m tile the torus with overlap.
    const double cells = std::ceil(2.0 / cover_scale);
    const Vec pulled_base = std::get<TorusPoint>(iterate(system, sample.base, pull)).coords;
    std::vector<std::vector<long>> cell(count);
    for (std::size_t i = 0; i < count; ++i) {
      const Vec p = pulled_base + t->split.apply_power(sample.offsets[i], pull);
      cell[i].resize(p.size());
      for (Eigen::Index c = 0; c < p.size(); ++c) cell[i][c] = static_cast<long>(std::floor(p(c) * cells));
    }
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = 0; j < count; ++j) {
        if (i == j) continue;
        bool shared = true;
        for (std::size_t c = 0; shared && c < cell[i].size(); ++c) shared = std::abs(cell[i][c] - cell[j][c]) <= 1;
        if (shared) g.adjacency[i].push_back(static_cast<std::uint32_t>(j));
      }
    return g;
  }

  std::vector<const SymbolicPoint*> pts(count);
  for (std::size_t i = 0; i < count; ++i) pts[i] = &std::get<SymbolicPoint>(sample.points[i]);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = i + 1; j < count; ++j) {
      const bool shared = sample.side == Side::stable ? agree_from(*pts[i], *pts[j], -1 - n)
                                                      : agree_to(*pts[i], *pts[j], 1 + n);
      if (shared) {
        g.adjacency[i].push_back(static_cast<std::uint32_t>(j));
        g.adjacency[j].push_back(static_cast<std::uint32_t>(i));
      }
    }
  for (auto& row : g.adjacency) std::sort(row.begin(), row.end());
  return g;
}

LevelRadii level_radii(const ToralSystem& system, Side side, int n, const LogScaleConfig& config) {
  const SpectralSplit& s = system.split;
  const Mat& a = side == Side::stable ? s.restricted_plus : s.restricted_minus;
  const Mat& a_inv = side == Side::stable ? s.restricted_plus_inverse : s.restricted_minus_inverse;
  const int lo = side == Side::stable ? -n : -config.n_max;
  const int hi = side == Side::stable ? config.n_max : n;
  auto power = [&](int k) {
    Mat p = Mat::Identity(a.rows(), a.cols());
    for (int i = 0; i < std::abs(k); ++i) p = (k >= 0 ? a : a_inv) * p;
    return p;
  };
  double worst = 0.0;
  for (int j = lo; j <= hi; ++j) {
    Eigen::JacobiSVD<Mat> svd(power(j));
    worst = std::max(worst, svd.singularValues()(0));
  }
  Eigen::JacobiSVD<Mat> binding(power(side == Side::stable ? -n : n));
  const Vec& sv = binding.singularValues();
  return {config.epsilon0 / worst, config.epsilon0 / sv(sv.size() - 1)};
}

Vec LeafGrid::displacement(long da, long db) const {
  return static_cast<double>(da) * axis_a + static_cast<double>(db) * axis_b;
}

std::vector<std::array<long, 2>> level_stencil(const LeafGrid& grid, int n, const LogScaleConfig& config) {
  const LevelRadii radii = level_radii(*grid.system, grid.side, n, config);
  auto reach = [&](const Vec& axis, long count) {
    const double len = axis.norm();
    if (len == 0.0) return 0L;
    return std::min(count - 1, static_cast<long>(std::ceil(radii.outer / len)));
  };
  const long ra = reach(grid.axis_a, grid.count_a);
  const long rb = reach(grid.axis_b, grid.count_b);
  std::vector<std::array<long, 2>> out;
  for (long da = 0; da <= ra; ++da)
    for (long db = -rb; db <= rb; ++db) {
      if (da == 0 && db <= 0) continue;
      const Vec d = grid.displacement(da, db);
      const double len = d.norm();
      if (len > radii.outer) continue;
      const bool edge =
          len < radii.inner ||
          internal_ell(PairOrbit::from_displacement(*grid.system, d), grid.side, config).value >= n;
      if (edge) {
        out.push_back({da, db});
        out.push_back({-da, -db});
      }
    }
  return out;
}

std::vector<int> grid_bfs(const LeafGrid& grid, const std::vector<std::array<long, 2>>& stencil, std::size_t source,
                          std::optional<std::size_t> target) {
  std::vector<int> dist(grid.size(), kInfiniteDistance);
  std::vector<std::size_t> queue;
  queue.reserve(grid.size());
  dist.at(source) = 0;
  queue.push_back(source);
  if (target && *target == source) return dist;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t u = queue[head];
    const long a = static_cast<long>(u) / grid.count_b, b = static_cast<long>(u) % grid.count_b;
    for (const auto& o : stencil) {
      const long na = a + o[0], nb = b + o[1];
      if (na < 0 || na >= grid.count_a || nb < 0 || nb >= grid.count_b) continue;
      const std::size_t v = grid.index(na, nb);
      if (dist[v] != kInfiniteDistance) continue;
      dist[v] = dist[u] + 1;
      if (target && v == *target) return dist;
      queue.push_back(v);
    }
  }
  return dist;
}

bool ConnectivityReport::monotone() const {
  bool broken = false;
  for (const auto& level : levels) {
    if (broken && level.connected) return false;
    broken = broken || !level.connected;
  }
  return true;
}

namespace {

ConnectivityLevel torus_level(const ToralSystem& torus, Side side, int n, const ConnectivityConfig& config) {
  const LevelRadii radii = level_radii(torus, side, n, config.logscale);
  const double h = config.refine ? std::min(config.sample.spacing, radii.inner / 4.0) : config.sample.spacing;
  const Mat& basis = torus.side_basis(side);
  LeafGrid grid;
  grid.system = &torus;
  grid.side = side;
  const long count = static_cast<long>(std::floor(2.0 * config.sample.window / h + 1e-9)) + 1;
  grid.axis_a = h * basis.col(0);
  grid.count_a = count;
  if (basis.cols() >= 2) {
    grid.axis_b = h * basis.col(1);
    grid.count_b = count;
  } else {
    grid.axis_b = Vec::Zero(torus.dim());
  }
  if (static_cast<double>(grid.count_a) * static_cast<double>(grid.count_b) > static_cast<double>(config.sample.max_points))
    throw Error(ErrorKind::SampleTooLarge, "net for level " + std::to_string(n) + " needs " +
                                               std::to_string(double(grid.count_a) * double(grid.count_b)) + " points");
  const auto stencil = level_stencil(grid, n, config.logscale);

  ConnectivityLevel out;
  out.n = n;
  out.vertices = grid.size();
  out.spacing = h;
  std::vector<char> seen(grid.size(), 0);
  out.components = 0;
  for (std::size_t s = 0; s < grid.size(); ++s) {
    if (seen[s]) continue;
    ++out.components;
    const auto dist = grid_bfs(grid, stencil, s);
    for (std::size_t v = 0; v < dist.size(); ++v)
      if (dist[v] != kInfiniteDistance) seen[v] = 1;
  }
  out.connected = out.components == 1;
  if (!out.connected) {
    out.diameter = kInfiniteDistance;
    return out;
  }
  auto farthest = [&](std::size_t from) {
    const auto dist = grid_bfs(grid, stencil, from);
    const auto it = std::max_element(dist.begin(), dist.end());
    return std::make_pair(static_cast<std::size_t>(it - dist.begin()), *it);
  };
  out.diameter = farthest(farthest(0).first).second;
  return out;
}

ConnectivityLevel graph_level(const LeafGraph& graph, int n, int threads) {
  ConnectivityLevel out;
  out.n = n;
  out.vertices = graph.size();
  const Components c = connected_components(graph);
  out.components = c.count;
  out.connected = c.count <= 1;
  if (!out.connected) {
    out.diameter = kInfiniteDistance;
    return out;
  }
  std::vector<int> ecc(graph.size(), 0);
  parallel_for(graph.size(), threads, [&](std::size_t s) {
    const auto d = bfs_distances(graph, s);
    ecc[s] = d.empty() ? 0 : *std::max_element(d.begin(), d.end());
  });
  out.diameter = ecc.empty() ? 0 : *std::max_element(ecc.begin(), ecc.end());
  return out;
}

}  // namespace

ConnectivityReport connectivity_report(const System& system, Side side, const ConnectivityConfig& config) {
  return connectivity_report(system, default_base_point(system), side, config);
}

ConnectivityReport connectivity_report(const System& system, const Point& base, Side side,
                                       const ConnectivityConfig& config) {
  config.logscale.validate();
  if (config.n_lo > config.n_hi) throw Error(ErrorKind::InvalidInput, "n_lo must not exceed n_hi");
  if (config.n_hi > config.logscale.n_max) throw Error(ErrorKind::InvalidInput, "n_hi must not exceed n_max");
  ConnectivityReport report;
  if (const auto* t = std::get_if<ToralSystem>(&system)) {
    if (!(config.sample.spacing > 0.0) || !(config.sample.window >= 0.0))
      throw Error(ErrorKind::InvalidInput, "window must be >= 0 and spacing > 0");
    for (int n = config.n_lo; n <= config.n_hi; ++n) report.levels.push_back(torus_level(*t, side, n, config));
    return report;
  }
  const LeafSample sample = leaf_sample(system, base, side, config.sample);
  const EllMatrix ell = internal_ell_matrix(system, sample, config.logscale, config.threads);
  for (int n = config.n_lo; n <= config.n_hi; ++n)
    report.levels.push_back(graph_level(build_gamma(ell, n), n, config.threads));
  return report;
}

}  // namespace hypdyn
