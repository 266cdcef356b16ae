#include "hypdyn/exponents.hpp"

#include "hypdyn/errors.hpp"
#include "hypdyn/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace hypdyn {

GrowthFit growth_fit(const std::vector<std::pair<int, double>>& series) {
  std::vector<double> xs, ys;
  GrowthFit fit;
  for (const auto& [n, d] : series) {
    if (!std::isfinite(d) || d < 2.0) continue;
    xs.push_back(n);
    ys.push_back(std::log(d));
    fit.n_used.push_back(n);
  }
  if (xs.size() < 4)
    throw Error(ErrorKind::InsufficientData,
                "growth fit needs 4 finite readings with d_n >= 2, got " + std::to_string(xs.size()));
  const double count = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorKind::InsufficientData, "growth fit needs distinct levels");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  return fit;
}

int ExponentConfig::resolved_n_hi() const { return n_hi ? *n_hi : std::min(12, logscale.n_max); }

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorKind::InsufficientData, "percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double rank = std::ceil(p / 100.0 * static_cast<double>(values.size()));
  const auto idx = static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(values.size()))) - 1;
  return values[idx];
}

int resolution_level(const ToralSystem& system, Side side, const ExponentConfig& config) {
  const int n_max = config.logscale.n_max;
  int best = -n_max;
  for (int m = -n_max; m <= n_max; ++m) {
    if (level_radii(system, side, m, config.logscale).inner < 4.0 * config.spacing) break;
    best = m;
  }
  return best;
}

namespace {

std::optional<int> torus_dn_at(const ToralSystem& system, Side side, const Vec& delta, int n, int level,
                               const ExponentConfig& config) {
  const int k = n - level;
  const Vec pulled = system.split.apply_power(delta, side == Side::stable ? -k : k);
  const double length = pulled.norm();
  if (length == 0.0) return 0;
  const double h = config.spacing;
  const double steps = std::ceil(length / h);
  const Mat& basis = system.side_basis(side);
  const bool planar = basis.cols() >= 2;
  const long half = planar ? config.tube_cells : 0;

  LeafGrid grid;
  grid.system = &system;
  grid.side = side;
  grid.count_a = static_cast<long>(steps) + 1;
  grid.count_b = 2 * half + 1;
  if (static_cast<double>(grid.count_a) * static_cast<double>(grid.count_b) > static_cast<double>(config.max_points))
    return std::nullopt;
  const Vec u = pulled / length;
  grid.axis_a = (length / steps) * u;
  grid.axis_b = Vec::Zero(system.dim());
  if (planar) {
    Vec w0 = basis.col(0) - basis.col(0).dot(u) * u;
    Vec w1 = basis.col(1) - basis.col(1).dot(u) * u;
    const Vec& w = w0.norm() >= w1.norm() ? w0 : w1;
    grid.axis_b = h * w / w.norm();
  }
  const auto stencil = level_stencil(grid, level, config.logscale);
  const std::size_t source = grid.index(0, half);
  const std::size_t target = grid.index(grid.count_a - 1, half);
  return grid_bfs(grid, stencil, source, target)[target];
}

// Largest s on the ray s*u with internal log-scale at least `level`.
double ray_threshold(const ToralSystem& system, Side side, const Vec& u, int level, const LogScaleConfig& config) {
  auto ell_at = [&](double s) { return internal_ell(PairOrbit::from_displacement(system, s * u), side, config).value; };
  double lo = 0.0, hi = 1e-3;
  while (ell_at(hi) >= level) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw Error(ErrorKind::InvalidInput, "anchor level unreachable along a leaf ray");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ell_at(mid) >= level ? lo : hi) = mid;
  }
  return lo;
}

std::vector<Vec> leaf_directions(const ToralSystem& system, Side side, const ExponentConfig& config) {
  const Mat& basis = system.side_basis(side);
  std::vector<Vec> dirs;
  if (basis.cols() == 1) {
    dirs.push_back(basis.col(0));
    return dirs;
  }
  for (int j = 0; j < config.directions; ++j) {
    const double theta = std::numbers::pi * j / config.directions;
    dirs.push_back(std::cos(theta) * basis.col(0) + std::sin(theta) * basis.col(1));
  }
  if (basis.cols() == 2) {
    const Mat& a = side == Side::stable ? system.split.restricted_plus : system.split.restricted_minus;
    Eigen::EigenSolver<Mat> solver(a);
    for (int i = 0; i < 2; ++i) {
      if (std::abs(solver.eigenvalues()(i).imag()) > 1e-12) continue;
      const Vec e = solver.eigenvectors().col(i).real();
      dirs.push_back(basis * e.normalized());
    }
  }
  return dirs;
}

void summarize(SideExponents& out, const ExponentConfig& config) {
  for (const auto& p : out.pairs)
    if (p.fit) out.slopes.push_back(p.fit->slope);
  if (out.slopes.empty()) throw Error(ErrorKind::InsufficientData, "no pair admitted a growth fit");
  out.lower = percentile(out.slopes, config.lower_percentile);
  out.upper = percentile(out.slopes, config.upper_percentile);
  out.raw_min = *std::min_element(out.slopes.begin(), out.slopes.end());
  out.raw_max = *std::max_element(out.slopes.begin(), out.slopes.end());
  out.spread = percentile(out.slopes, 75.0) - percentile(out.slopes, 25.0);
}

void fit_pair(PairGrowth& p) {
  std::vector<std::pair<int, double>> series;
  for (const auto& [n, d] : p.dn)
    series.emplace_back(n, d == kInfiniteDistance ? std::numeric_limits<double>::infinity() : double(d));
  try {
    p.fit = growth_fit(series);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientData) throw;
  }
}

SideExponents torus_exponents(const ToralSystem& system, Side side, const ExponentConfig& config) {
  SideExponents out;
  out.side = side;
  out.n_lo = config.n_lo;
  out.n_hi = config.resolved_n_hi();
  out.resolution_level = resolution_level(system, side, config);

  const bool line = system.side_basis(side).cols() == 1;
  const int per_direction = line ? config.line_magnitudes : config.magnitudes;
  std::size_t truncated_anchors = 0, anchors = 0;
  for (const Vec& u : leaf_directions(system, side, config)) {
    const double s_hi = ray_threshold(system, side, u, config.anchor, config.logscale);
    const double s_lo = ray_threshold(system, side, u, config.anchor + 1, config.logscale);
    for (int p = 1; p <= per_direction; ++p) {
      const double s = s_lo + (s_hi - s_lo) * p / per_direction;
      const Vec delta = s * u;
      const LogScaleValue ell = internal_ell(PairOrbit::from_displacement(system, delta), side, config.logscale);
      ++anchors;
      if (ell.truncated) ++truncated_anchors;
      if (ell.value != config.anchor) continue;
      PairGrowth g;
      g.pair_id = out.pairs.size();
      g.displacement = delta;
      g.ell = ell.value;
      out.pairs.push_back(std::move(g));
    }
  }
  if (anchors > 0 && 2 * truncated_anchors > anchors)
    throw Error(ErrorKind::TruncationDominated, "most anchor readings hit n_max");
  if (out.pairs.size() < 20)
    throw Error(ErrorKind::InsufficientData, "only " + std::to_string(out.pairs.size()) + " anchored pairs");

  parallel_for(out.pairs.size(), config.threads, [&](std::size_t i) {
    PairGrowth& p = out.pairs[i];
    for (int n = out.n_lo; n <= out.n_hi; ++n) {
      const auto d = torus_dn_at(system, side, p.displacement, n, out.resolution_level, config);
      if (!d) {
        p.truncated += out.n_hi - n + 1;
        break;
      }
      p.dn.emplace_back(n, *d);
    }
    fit_pair(p);
  });
  std::size_t readings = 0, missing = 0;
  for (const auto& p : out.pairs) {
    readings += static_cast<std::size_t>(out.n_hi - out.n_lo + 1);
    missing += static_cast<std::size_t>(p.truncated);
  }
  if (2 * missing > readings)
    throw Error(ErrorKind::TruncationDominated, "most d_n readings exceed the net budget; lower n_hi");
  summarize(out, config);
  return out;
}

SideExponents shift_exponents(const System& system, Side side, const ExponentConfig& config) {
  SideExponents out;
  out.side = side;
  out.n_lo = config.n_lo;
  out.n_hi = config.resolved_n_hi();
  SampleSpec spec;
  spec.depth = config.depth;
  spec.max_points = config.max_points;
  const LeafSample sample = leaf_sample(system, default_base_point(system), side, spec);
  const EllMatrix ell = internal_ell_matrix(system, sample, config.logscale, config.threads);
  std::size_t truncated = 0, total = 0;
  for (std::size_t i = 0; i < ell.size(); ++i)
    for (std::size_t j = i + 1; j < ell.size(); ++j) {
      ++total;
      if (ell(i, j).truncated) ++truncated;
      if (ell(i, j).usable() && ell(i, j).value == config.anchor) {
        PairGrowth g;
        g.pair_id = out.pairs.size();
        g.ell = ell(i, j).value;
        g.dn.reserve(static_cast<std::size_t>(out.n_hi - out.n_lo + 1));
        g.displacement = Vec::Zero(2);
        g.displacement << double(i), double(j);
        out.pairs.push_back(std::move(g));
      }
    }
  if (total > 0 && 2 * truncated > total) throw Error(ErrorKind::TruncationDominated, "most readings hit n_max");
  if (out.pairs.size() < 20)
    throw Error(ErrorKind::InsufficientData, "only " + std::to_string(out.pairs.size()) + " anchored pairs");
  for (int n = out.n_lo; n <= out.n_hi; ++n) {
    const LeafGraph g = build_gamma(ell, n);
    std::map<std::size_t, std::vector<int>> from;
    for (auto& p : out.pairs) {
      const auto i = static_cast<std::size_t>(p.displacement(0)), j = static_cast<std::size_t>(p.displacement(1));
      auto it = from.find(i);
      if (it == from.end()) it = from.emplace(i, bfs_distances(g, i)).first;
      p.dn.emplace_back(n, it->second[j]);
    }
  }
  std::size_t infinite = 0;
  for (auto& p : out.pairs) {
    fit_pair(p);
    if (std::any_of(p.dn.begin(), p.dn.end(), [](const auto& r) { return r.second == kInfiniteDistance; })) ++infinite;
  }
  if (2 * infinite > out.pairs.size()) {
    out.disconnected = true;
    out.lower = out.upper = out.raw_min = out.raw_max = std::numeric_limits<double>::infinity();
    out.spread = 0.0;
    return out;
  }
  summarize(out, config);
  return out;
}

}  // namespace

std::optional<int> torus_dn(const ToralSystem& system, Side side, const Vec& delta, int n,
                            const ExponentConfig& config) {
  return torus_dn_at(system, side, delta, n, resolution_level(system, side, config), config);
}

SideExponents critical_exponents(const System& system, Side side, const ExponentConfig& config) {
  config.logscale.validate();
  if (!(config.spacing > 0.0)) throw Error(ErrorKind::InvalidInput, "spacing must be positive");
  if (config.n_lo > config.resolved_n_hi()) throw Error(ErrorKind::InvalidInput, "n_lo must not exceed n_hi");
  if (config.resolved_n_hi() > config.logscale.n_max) throw Error(ErrorKind::InvalidInput, "n_hi exceeds n_max");
  if (const auto* t = std::get_if<ToralSystem>(&system)) return torus_exponents(*t, side, config);
  return shift_exponents(system, side, config);
}

bool ExponentReport::finite() const {
  return std::isfinite(a0) && std::isfinite(a1) && std::isfinite(b0) && std::isfinite(b1);
}

ExponentReport exponent_report(const System& system, const ExponentConfig& config) {
  ExponentReport r;
  r.stable = critical_exponents(system, Side::stable, config);
  r.unstable = critical_exponents(system, Side::unstable, config);
  r.a0 = r.stable.lower;
  r.a1 = r.stable.upper;
  r.b0 = r.unstable.lower;
  r.b1 = r.unstable.upper;
  if (r.finite() && r.a0 > 0 && r.b0 > 0) r.pinched_margin = r.a0 / r.a1 + r.b0 / r.b1 - 1.0;
  return r;
}

PinchedResult pinched_check(double a0, double a1, double b0, double b1) {
  for (double v : {a0, a1, b0, b1})
    if (!std::isfinite(v) || v <= 0.0)
      throw Error(ErrorKind::NonFiniteExponent, "exponents must be finite and positive, got " + std::to_string(v));
  PinchedResult r;
  r.margin = a0 / a1 + b0 / b1 - 1.0;
  r.pinched = r.margin > 0.0;
  return r;
}

PinchedResult pinched_check(const ExponentReport& report) {
  return pinched_check(report.a0, report.a1, report.b0, report.b1);
}

double entropy_oracle(const Mat& matrix) {
  Eigen::EigenSolver<Mat> solver(matrix, false);
  double eta = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double m = std::abs(solver.eigenvalues()(i));
    if (std::abs(m - 1.0) <= kUnitCircleTolerance)
      throw Error(ErrorKind::NotHyperbolic, "eigenvalue of modulus " + std::to_string(m));
    if (m > 1.0) eta += std::log(m);
  }
  return eta;
}

double entropy_oracle(const ToralSystem& system) { return entropy_oracle(system.matrix); }

CodimOneResult codim_one_check(const System& system, Side side, const ExponentConfig& config) {
  const auto* t = std::get_if<ToralSystem>(&system);
  if (!t) throw Error(ErrorKind::NotCodimensionOne, "shift systems carry no linear leaf structure");
  if (t->side_basis(side).cols() != 1)
    throw Error(ErrorKind::NotCodimensionOne, std::string(to_string(side)) + " subspace has dimension " +
                                                  std::to_string(t->side_basis(side).cols()));
  const SideExponents e = critical_exponents(system, side, config);
  CodimOneResult r;
  r.side = side;
  r.a0 = e.lower;
  r.a1 = e.upper;
  r.eta = entropy_oracle(*t);
  r.relative_gap = std::abs(r.a1 - r.a0) / r.a1;
  r.eta_gap = std::abs(r.a0 - r.eta) / r.eta;
  return r;
}

LowerBoundCheck lower_bound_check(const EllMatrix& ell, double delta_hat, int n_lo, int n_hi,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  LowerBoundCheck out;
  out.delta_hat = delta_hat;
  const int d = std::max(1, static_cast<int>(std::ceil(delta_hat - 1e-12)));
  out.delta_used = d;
  out.alpha = std::log(2.0) / d;
  out.constant = std::pow(2.0, (-1.0 - d) / d);

  std::map<int, LeafGraph> graphs;
  std::map<int, std::map<std::size_t, std::vector<int>>> dist;
  auto dn = [&](int n, std::size_t i, std::size_t j) {
    auto g = graphs.find(n);
    if (g == graphs.end()) g = graphs.emplace(n, build_gamma(ell, n)).first;
    auto& level = dist[n];
    auto it = level.find(i);
    if (it == level.end()) it = level.emplace(i, bfs_distances(g->second, i)).first;
    return it->second[j];
  };

  for (const auto& [i, j] : pairs) {
    const LogScaleValue l = ell(i, j);
    if (!l.usable()) continue;
    for (int n = n_lo; n <= n_hi; ++n) {
      const int dn_ij = dn(n, i, j);
      ++out.bound_checked;
      const double bound = out.constant * std::exp(out.alpha * (n - l.value));
      if (dn_ij != kInfiniteDistance && dn_ij < bound - 1e-12) ++out.bound_violations;
      const int up = dn(n + d, i, j);
      ++out.doubling_checked;
      if (dn_ij == kInfiniteDistance) {
        if (up != kInfiniteDistance) ++out.doubling_violations;
      } else if (up != kInfiniteDistance && up < 2 * dn_ij - 1) {
        ++out.doubling_violations;
      }
    }
  }
  return out;
}

}  // namespace hypdyn
