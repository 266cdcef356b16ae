#include "hypdyn/logscale.hpp"

#include "hypdyn/errors.hpp"
#include "hypdyn/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

namespace hypdyn {

void LogScaleConfig::validate() const {
  if (!(epsilon0 > 0.0)) throw Error(ErrorKind::InvalidInput, "logscale.epsilon0 must be positive");
  if (n_max < 10) throw Error(ErrorKind::InvalidInput, "logscale.n_max must be at least 10");
}

LogScaleValue standard_ell(const PairOrbit& orbit, const LogScaleConfig& config) {
  if (orbit.identical()) return {LogScaleValue::kInfinite, false};
  const int n_max = config.n_max;
  const std::vector<double> g = orbit.gaps(-n_max, n_max);
  for (int n = 0; n <= n_max; ++n) {
    if (g[n_max + n] > config.epsilon0 || g[n_max - n] > config.epsilon0) return {n - 1, false};
  }
  return {n_max, true};
}

LogScaleValue standard_ell(const System& system, const Point& x, const Point& y, const LogScaleConfig& config) {
  return standard_ell(PairOrbit(system, x, y), config);
}

LogScaleValue internal_ell(const PairOrbit& orbit, Side side, const LogScaleConfig& config) {
  if (orbit.identical()) return {LogScaleValue::kInfinite, false};
  // Far along the expanding direction the wrapped torus distance is noise,
  // so a torus pair is judged off the leaf by its transverse component.
  if (orbit.on_torus() && orbit.component_norm(side == Side::stable ? Side::unstable : Side::stable) > 0.0)
    throw Error(ErrorKind::NotOnLeaf, "displacement has a component transverse to the leaf");
  const int n_max = config.n_max;
  const std::vector<double> g = orbit.gaps(-n_max, n_max);
  auto close = [&](int n) { return g[n_max + n] <= config.epsilon0; };
  if (side == Side::stable) {
    for (int n = n_max; n >= -n_max; --n) {
      if (close(n)) continue;
      if (n == n_max) throw Error(ErrorKind::NotOnLeaf, "forward orbits do not approach within n_max");
      return {-n - 1, false};
    }
  } else {
    for (int n = -n_max; n <= n_max; ++n) {
      if (close(n)) continue;
      if (n == -n_max) throw Error(ErrorKind::NotOnLeaf, "backward orbits do not approach within n_max");
      return {n - 1, false};
    }
  }
  return {n_max, true};
}

LogScaleValue internal_ell(const System& system, const Point& x, const Point& y, Side side,
                           const LogScaleConfig& config) {
  return internal_ell(PairOrbit(system, x, y), side, config);
}

int EllMatrix::max_finite() const {
  int best = -LogScaleValue::kInfinite;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (!(*this)(i, j).infinite()) best = std::max(best, (*this)(i, j).value);
  return best;
}

int EllMatrix::min_finite() const {
  int best = LogScaleValue::kInfinite;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (!(*this)(i, j).infinite()) best = std::min(best, (*this)(i, j).value);
  return best;
}

namespace {

EllMatrix torus_ell_matrix(const ToralSystem& torus, const LeafSample& sample, const LogScaleConfig& config,
                           int threads) {
  const std::size_t n = sample.size();
  const long count = sample.grid_count;
  auto index_of = [&](long a, long b) { return static_cast<std::size_t>(sample.grid_rank == 2 ? a * count + b : a); };
  // Canonical representative pair for every grid offset (da, db) with
  // (da, db) lexicographically non-negative.
  std::vector<std::array<long, 2>> keys;
  const long span_b = sample.grid_rank == 2 ? count - 1 : 0;
  for (long da = 0; da < count; ++da)
    for (long db = -span_b; db <= span_b; ++db)
      if (da > 0 || db >= 0) keys.push_back({da, db});
  std::vector<LogScaleValue> values(keys.size());
  parallel_for(keys.size(), threads, [&](std::size_t k) {
    const long da = keys[k][0], db = keys[k][1];
    const std::size_t i = index_of(0, std::max(0L, -db));
    const std::size_t j = index_of(da, std::max(0L, -db) + db);
    values[k] = internal_ell(PairOrbit::from_displacement(torus, sample_displacement(sample, i, j)), sample.side, config);
  });
  std::map<std::array<long, 2>, LogScaleValue> lookup;
  for (std::size_t k = 0; k < keys.size(); ++k) lookup.emplace(keys[k], values[k]);

  EllMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::array<long, 2> d{sample.grid[j][0] - sample.grid[i][0], sample.grid[j][1] - sample.grid[i][1]};
      if (d[0] < 0 || (d[0] == 0 && d[1] < 0)) d = {-d[0], -d[1]};
      out.set(i, j, lookup.at(d));
    }
  }
  return out;
}

}  // namespace

EllMatrix internal_ell_matrix(const System& system, const LeafSample& sample, const LogScaleConfig& config,
                              int threads) {
  config.validate();
  if (const auto* t = std::get_if<ToralSystem>(&system)) return torus_ell_matrix(*t, sample, config, threads);
  const std::size_t n = sample.size();
  EllMatrix out(n);
  std::vector<std::vector<LogScaleValue>> rows(n);
  parallel_for(n, threads, [&](std::size_t i) {
    rows[i].resize(n);
    for (std::size_t j = i + 1; j < n; ++j)
      rows[i][j] = internal_ell(system, sample.points[i], sample.points[j], sample.side, config);
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.set(i, j, rows[i][j]);
  return out;
}

DeltaEstimate estimate_delta(const std::vector<EllTriple>& triples, std::size_t min_triples) {
  DeltaEstimate out;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& t : triples) {
    if (!std::isfinite(t.xy) || !std::isfinite(t.yz) || !std::isfinite(t.xz)) continue;
    ++out.triples_tested;
    const double defect = std::max({std::min(t.xy, t.yz) - t.xz, std::min(t.xy, t.xz) - t.yz,
                                    std::min(t.yz, t.xz) - t.xy});
    if (defect > worst) {
      worst = defect;
      out.worst_triple = t.ids;
    }
  }
  if (out.triples_tested < min_triples)
    throw Error(ErrorKind::InsufficientData, "only " + std::to_string(out.triples_tested) +
                                                 " usable triples, need " + std::to_string(min_triples));
  out.delta = std::max(0.0, worst);
  return out;
}

std::vector<EllTriple> sample_triples(const EllMatrix& ell, std::size_t max_triples, std::uint64_t seed) {
  const std::size_t n = ell.size();
  std::vector<EllTriple> out;
  auto add = [&](std::size_t a, std::size_t b, std::size_t c) {
    const auto &xy = ell(a, b), &yz = ell(b, c), &xz = ell(a, c);
    if (xy.usable() && yz.usable() && xz.usable())
      out.push_back({double(xy.value), double(yz.value), double(xz.value), {a, b, c}});
  };
  const double total = n < 3 ? 0.0 : double(n) * double(n - 1) * double(n - 2) / 6.0;
  if (total <= double(max_triples)) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        for (std::size_t c = b + 1; c < n; ++c) add(a, b, c);
    return out;
  }
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < max_triples; ++k) {
    std::size_t a = rng() % n, b = rng() % n, c = rng() % n;
    while (b == a) b = rng() % n;
    while (c == a || c == b) c = rng() % n;
    add(a, b, c);
  }
  return out;
}

SubsequenceResult subsequence_extract(const std::function<double(std::size_t, std::size_t)>& ell,
                                      std::size_t count, int n0, double delta) {
  if (count < 2) throw Error(ErrorKind::InvalidInput, "sequence needs at least two points");
  if (delta < 0.0) throw Error(ErrorKind::InvalidInput, "delta must be non-negative");
  for (std::size_t i = 0; i + 1 < count; ++i)
    if (ell(i, i + 1) < n0)
      throw Error(ErrorKind::InvalidInput, "consecutive log-scale below n0 at position " + std::to_string(i));
  const std::size_t m = count - 1;
  SubsequenceResult out;
  out.indices.push_back(0);
  std::size_t r = 0;
  while (true) {
    std::size_t s = r + 1;
    for (std::size_t k = m; k > r; --k)
      if (ell(r, k) >= n0) {
        s = k;
        break;
      }
    if (s < m) {
      r = s + 1;
      out.indices.push_back(r);
      if (r == m) break;
      continue;
    }
    if (out.indices.size() == 1) {
      out.indices.push_back(m);
      out.degenerate_endpoints = true;
    } else {
      out.indices.back() = m;
    }
    break;
  }
  return out;
}

}  // namespace hypdyn
