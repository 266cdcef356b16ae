#include "hypdyn/metrics.hpp"

#include "hypdyn/errors.hpp"
#include "hypdyn/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace hypdyn {

SyntheticMetric synthesize_metric(const EllMatrix& ell, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorKind::InvalidInput, "beta must be positive");
  const std::size_t n = ell.size();
  SyntheticMetric m;
  m.beta = beta;
  m.size = n;
  m.pairwise.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (ell(i, j).infinite()) throw Error(ErrorKind::InvalidInput, "off-diagonal log-scale must be finite");
      m.pairwise[i * n + j] = std::exp(-beta * ell(i, j).value);
    }
  double* d = m.pairwise.data();
  for (std::size_t k = 0; k < n; ++k) {
    const double* row_k = d + k * n;
    for (std::size_t i = 0; i < n; ++i) {
      double* row_i = d + i * n;
      const double dik = row_i[k];
      for (std::size_t j = 0; j < n; ++j) {
        const double via = dik + row_k[j];
        if (via < row_i[j]) row_i[j] = via;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::min(d[i * n + j], d[j * n + i]);
      d[i * n + j] = d[j * n + i] = v;
    }
  return m;
}

SandwichFit verify_sandwich(const SyntheticMetric& metric, const EllMatrix& ell, double beta,
                            std::optional<HoldoutSpec> holdout) {
  if (metric.size != ell.size()) throw Error(ErrorKind::InvalidInput, "metric and log-scale sizes differ");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < metric.size; ++i)
    for (std::size_t j = i + 1; j < metric.size; ++j) pairs.emplace_back(i, j);
  if (pairs.empty()) throw Error(ErrorKind::InsufficientData, "sandwich needs at least one pair");
  std::vector<char> test(pairs.size(), 0);
  if (holdout) {
    std::mt19937_64 rng(holdout->seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& t : test) t = u(rng) < holdout->fraction;
  }
  auto scaled = [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    return metric(i, j) * std::exp(beta * ell(i, j).value);
  };
  SandwichFit fit;
  fit.c_lower = std::numeric_limits<double>::infinity();
  fit.c_upper = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (test[k]) continue;
    const double v = scaled(k);
    fit.c_lower = std::min(fit.c_lower, v);
    fit.c_upper = std::max(fit.c_upper, v);
    ++fit.pairs;
  }
  if (fit.pairs == 0) throw Error(ErrorKind::InsufficientData, "no training pairs left after the holdout");
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (!test[k]) continue;
    ++fit.holdout_pairs;
    const double v = scaled(k);
    if (v < fit.c_lower || v > fit.c_upper) ++fit.violations;
  }
  return fit;
}

MetricAxioms check_metric_axioms(const SyntheticMetric& metric, const EllMatrix& ell) {
  MetricAxioms a;
  const std::size_t n = metric.size;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (metric(i, j) != metric(j, i)) a.symmetric = false;
      if (i == j) continue;
      if (metric(i, j) == 0.0) ++a.zero_off_diagonal;
      if (metric(i, j) > std::exp(-metric.beta * ell(i, j).value)) ++a.upper_bound_violations;
      for (std::size_t k = 0; k < n; ++k)
        a.max_triangle_excess = std::max(a.max_triangle_excess, metric(i, j) - metric(i, k) - metric(k, j));
    }
  return a;
}

std::size_t deformation_violations(const SyntheticMetric& low, const SyntheticMetric& high) {
  if (low.size != high.size) throw Error(ErrorKind::InvalidInput, "metric sizes differ");
  const double power = low.beta / high.beta;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < low.size; ++i)
    for (std::size_t j = i + 1; j < low.size; ++j)
      if (low(i, j) < std::pow(high(i, j), power) * (1.0 - 1e-12)) ++bad;
  return bad;
}

namespace {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  Line l;
  l.slope = sxy / sxx;
  l.intercept = my - l.slope * mx;
  l.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return l;
}

}  // namespace

LeafMeasureResult leaf_measure_check(const System& system, const LeafSample& sample, const LogScaleConfig& config) {
  const auto* t = std::get_if<ToralSystem>(&system);
  if (!t) throw Error(ErrorKind::NotCodimensionOne, "leaf measure check needs a toral system");
  if (t->side_basis(sample.side).cols() != 1 || sample.grid_rank != 1)
    throw Error(ErrorKind::NotCodimensionOne, "leaf measure check needs a one-dimensional leaf");
  const std::size_t n = sample.size();
  if (n < 3) throw Error(ErrorKind::InsufficientData, "leaf measure check needs at least three sample points");
  config.validate();

  auto ell_at = [&](std::size_t d) {
    return internal_ell(PairOrbit::from_displacement(*t, sample_displacement(sample, 0, d)), sample.side, config);
  };

  // Log-uniform offsets so every scale contributes equally.
  std::set<std::size_t> offsets;
  const double top = std::log(static_cast<double>(n - 1));
  for (int k = 0; k < 400; ++k)
    offsets.insert(static_cast<std::size_t>(std::llround(std::exp(top * k / 399.0))));
  std::vector<double> xs, ys;
  std::set<int> distinct;
  for (std::size_t d : offsets) {
    if (d == 0 || d >= n) continue;
    const LogScaleValue l = ell_at(d);
    if (!l.usable()) continue;
    xs.push_back(-std::log(std::abs(sample.params[d] - sample.params[0])));
    ys.push_back(l.value);
    distinct.insert(l.value);
  }
  if (distinct.size() < 3) throw Error(ErrorKind::InsufficientData, "too few distinct log-scale readings");
  const Line reg = least_squares(xs, ys);
  LeafMeasureResult out;
  out.fitted_exponent = 1.0 / reg.slope;
  out.regression_r2 = reg.r2;
  out.pairs_used = xs.size();
  out.eta = entropy_oracle(t->matrix);

  // Balls in the metric e^{-alpha l} about the middle point.
  const std::size_t half = (n - 1) / 2;
  std::vector<int> ell_by_offset(half + 1, LogScaleValue::kInfinite);
  for (std::size_t d = 1; d <= half; ++d) ell_by_offset[d] = ell_at(d).value;
  const double h = std::abs(sample.params[1] - sample.params[0]);
  std::vector<double> log_r, log_mu;
  const int k_hi = half >= 1 ? ell_by_offset[1] : 0;
  for (int k = k_hi; k > -config.n_max; --k) {
    std::size_t inside = 0;
    for (std::size_t d = 1; d <= half; ++d)
      if (ell_by_offset[d] >= k) ++inside;
    if (inside == half) break;  // ball reaches the edge of the sample
    log_r.push_back(-out.fitted_exponent * k);
    log_mu.push_back(std::log(h * static_cast<double>(2 * inside + 1)));
  }
  if (log_r.size() < 3) throw Error(ErrorKind::InsufficientData, "too few ball radii inside the sample");
  const Line ball = least_squares(log_r, log_mu);
  out.exponent_ratio = ball.slope / (out.eta / out.fitted_exponent);
  out.scaling_r2 = ball.r2;
  return out;
}

}  // namespace hypdyn
