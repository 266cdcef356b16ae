#include "hypdyn/hypgraph.hpp"

#include "hypdyn/errors.hpp"
#include "hypdyn/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace hypdyn {

GroupData GroupData::make(const IntMat& phi, int s_rad, double tube_radius) {
  if (s_rad < 0) throw Error(ErrorKind::InvalidInput, "s_rad must be non-negative");
  if (!(tube_radius > 0.0)) throw Error(ErrorKind::InvalidInput, "tube radius must be positive");
  integer_inverse(phi);
  GroupData g;
  g.phi = phi;
  g.s_rad = s_rad;
  g.tube_radius = tube_radius;
  g.split = spectral_split(to_real(phi));
  return g;
}

std::vector<IntVec> GroupData::generators() const {
  std::vector<IntVec> out;
  IntVec g = IntVec::Constant(dim(), -s_rad);
  while (true) {
    out.push_back(g);
    int i = 0;
    while (i < dim() && g(i) == s_rad) g(i++) = -s_rad;
    if (i == dim()) break;
    ++g(i);
  }
  return out;
}

std::int64_t LevelledGraph::key(const IntVec& g) const {
  std::int64_t k = 0, scale = 1;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    k += (g(i) + rho) * scale;
    scale *= 2 * rho + 1;
  }
  return k;
}

std::optional<std::size_t> LevelledGraph::find_point(const IntVec& g) const {
  if (g.size() != data.dim() || g.cwiseAbs().maxCoeff() > rho) return std::nullopt;
  const auto it = index.find(key(g));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

bool LevelledGraph::adjacent(std::size_t u, std::size_t v) const {
  const auto& row = adjacency.at(u);
  return std::binary_search(row.begin(), row.end(), static_cast<std::uint32_t>(v));
}

LevelledGraph build_xi(const GroupData& data, int levels, int rho) {
  if (levels < 0 || rho < 0) throw Error(ErrorKind::InvalidInput, "levels and rho must be non-negative");
  const int d = data.dim();
  const double box = std::pow(2.0 * rho + 1.0, d);
  if (box > kMaxXiBox) throw Error(ErrorKind::Oversize, "lattice box of " + std::to_string(box) + " points");

  LevelledGraph g;
  g.data = data;
  g.levels = levels;
  g.rho = rho;
  IntVec p = IntVec::Constant(d, -rho);
  while (true) {
    if ((data.split.p_minus * p.cast<double>()).norm() <= data.tube_radius) {
      g.index.emplace(g.key(p), g.points.size());
      g.points.push_back(p);
    }
    int i = 0;
    while (i < d && p(i) == rho) p(i++) = -rho;
    if (i == d) break;
    ++p(i);
  }
  const double vertices = static_cast<double>(g.points.size()) * (2.0 * levels + 1.0);
  if (vertices > static_cast<double>(kMaxXiVertices))
    throw Error(ErrorKind::Oversize, std::to_string(vertices) + " vertices exceed the budget of " +
                                         std::to_string(kMaxXiVertices));

  const auto gens = data.generators();
  g.adjacency.resize(static_cast<std::size_t>(vertices));
  auto link = [&](std::size_t u, std::size_t v) {
    g.adjacency[u].push_back(static_cast<std::uint32_t>(v));
    g.adjacency[v].push_back(static_cast<std::uint32_t>(u));
  };
  for (std::size_t a = 0; a < g.points.size(); ++a) {
    // Horizontal: each unordered pair once.
    for (const auto& s : gens) {
      const auto b = g.find_point(g.points[a] + s);
      if (!b || *b <= a) continue;
      for (int n = -levels; n <= levels; ++n) link(g.vertex(a, n), g.vertex(*b, n));
    }
    // Vertical: a at level n + 1, partner phi(a) - s at level n.
    const IntVec image = data.phi * g.points[a];
    for (const auto& s : gens) {
      const auto b = g.find_point(image - s);
      if (!b) continue;
      for (int n = -levels; n < levels; ++n) link(g.vertex(*b, n), g.vertex(a, n + 1));
    }
  }
  for (auto& row : g.adjacency) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return g;
}

std::vector<int> bfs(const std::vector<std::vector<std::uint32_t>>& adjacency, std::size_t source) {
  std::vector<int> dist(adjacency.size(), -1);
  std::vector<std::uint32_t> queue;
  queue.reserve(adjacency.size());
  dist.at(source) = 0;
  queue.push_back(static_cast<std::uint32_t>(source));
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto u = queue[head];
    for (auto v : adjacency[u])
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
  }
  return dist;
}

HyperbolicityEstimate delta_hyperbolicity(const std::vector<std::vector<std::uint32_t>>& adjacency,
                                          std::optional<std::size_t> fixed_base, std::size_t quadruples,
                                          std::uint64_t seed, int threads) {
  HyperbolicityEstimate est;
  est.vertices = adjacency.size();
  if (adjacency.empty()) return est;

  // Largest component.
  std::vector<int> label(adjacency.size(), -1);
  std::vector<std::size_t> members, best;
  int next = 0;
  for (std::size_t s = 0; s < adjacency.size(); ++s) {
    if (label[s] >= 0) continue;
    members.clear();
    std::vector<std::size_t> stack{s};
    label[s] = next;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      members.push_back(u);
      for (auto v : adjacency[u])
        if (label[v] < 0) {
          label[v] = next;
          stack.push_back(v);
        }
    }
    if (members.size() > best.size()) best = members;
    ++next;
  }
  std::sort(best.begin(), best.end());
  est.component_size = best.size();
  est.restricted_to_component = best.size() < adjacency.size();
  if (best.size() < 2) return est;

  std::mt19937_64 rng(seed);
  auto pick = [&] { return best[rng() % best.size()]; };
  std::vector<std::size_t> bases;
  if (fixed_base && std::binary_search(best.begin(), best.end(), *fixed_base)) bases.push_back(*fixed_base);
  for (int i = 0; i < 100; ++i) bases.push_back(pick());
  const std::size_t pool_size = std::min<std::size_t>(64, best.size());
  std::vector<std::size_t> pool;
  while (pool.size() < pool_size) {
    const auto v = pick();
    if (std::find(pool.begin(), pool.end(), v) == pool.end()) pool.push_back(v);
  }

  std::vector<std::vector<int>> base_dist(bases.size()), pool_dist(pool.size());
  parallel_for(bases.size() + pool.size(), threads, [&](std::size_t k) {
    if (k < bases.size())
      base_dist[k] = bfs(adjacency, bases[k]);
    else
      pool_dist[k - bases.size()] = bfs(adjacency, pool[k - bases.size()]);
  });

  double worst = 0.0;
  for (std::size_t q = 0; q < quadruples; ++q) {
    const auto& dw = base_dist[rng() % bases.size()];
    const std::size_t x = rng() % pool.size(), y = rng() % pool.size(), z = rng() % pool.size();
    const double dxy = pool_dist[x][pool[y]], dxz = pool_dist[x][pool[z]], dyz = pool_dist[y][pool[z]];
    const double wx = dw[pool[x]], wy = dw[pool[y]], wz = dw[pool[z]];
    const double xy = 0.5 * (wx + wy - dxy), xz = 0.5 * (wx + wz - dxz), yz = 0.5 * (wy + wz - dyz);
    const double defect = std::max({std::min(xz, yz) - xy, std::min(xy, yz) - xz, std::min(xy, xz) - yz});
    worst = std::max(worst, defect);
    ++est.quadruples_tested;
  }
  est.delta = worst;
  return est;
}

HyperbolicityEstimate delta_hyperbolicity(const LevelledGraph& graph, std::size_t quadruples, std::uint64_t seed,
                                          int threads) {
  std::optional<std::size_t> base;
  if (const auto origin = graph.find_point(IntVec::Zero(graph.data.dim()))) base = graph.vertex(*origin, 0);
  auto est = delta_hyperbolicity(graph.adjacency, base, quadruples, seed, threads);
  est.levels = graph.levels;
  est.rho = graph.rho;
  return est;
}

Vec boundary_point(const GroupData& data, const std::vector<IntVec>& path, int n_stop) {
  if (n_stop < 0 || static_cast<std::size_t>(n_stop) >= path.size())
    throw Error(ErrorKind::InvalidInput, "n_stop must index a path vertex");
  const SpectralSplit& s = data.split;
  std::vector<Vec> steps;
  steps.reserve(static_cast<std::size_t>(n_stop));
  for (int k = 1; k <= n_stop; ++k) {
    const IntVec step = data.phi * path[k] - path[k - 1];
    if (step.cwiseAbs().maxCoeff() > data.s_rad)
      throw Error(ErrorKind::InvalidPath, "step " + std::to_string(k) + " leaves the generating set");
    steps.push_back(s.coords_plus * step.cast<double>());
  }
  // phi^n(p_n) = p_0 + sum_k phi^{k-1}(phi(p_k) - p_{k-1}), summed inside E+.
  Vec acc = Vec::Zero(s.stable_dim());
  for (int k = n_stop; k >= 1; --k) acc = s.restricted_plus * acc + steps[k - 1];
  return s.p_plus * path[0].cast<double>() + s.e_plus_basis * acc;
}

}  // namespace hypdyn
