// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include "hypdyn/exponents.hpp"
#include "hypdyn/hypgraph.hpp"
#include "hypdyn/leafgraph.hpp"
#include "hypdyn/linear.hpp"
#include "hypdyn/logscale.hpp"
#include "hypdyn/metrics.hpp"
#include "hypdyn/models.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace hypdyn;

namespace {

const double kEta = std::log((3.0 + std::sqrt(5.0)) / 2.0);

IntMat cat_matrix() {
  IntMat a(2, 2);
  a << 2, 1, 1, 1;
  return a;
}

IntMat block_matrix() {
  IntMat a = IntMat::Zero(4, 4);
  a.block(0, 0, 2, 2) << 2, 1, 1, 1;
  a.block(2, 2, 2, 2) << 3, 1, 2, 1;
  return a;
}

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome cat_exponents() {
  const auto start = std::chrono::steady_clock::now();
  ExponentConfig c;
  c.spacing = 1e-4;
  c.n_lo = 2;
  c.n_hi = 10;
  const ExponentReport r = exponent_report(ToralSystem::from_integer_matrix(cat_matrix()), c);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool ok = true;
  for (double e : {r.a0, r.a1, r.b0, r.b1}) ok = ok && within(e, kEta, 0.10);
  ok = ok && r.pinched_margin >= 0.7 && r.pinched_margin <= 1.15 && seconds <= 60.0;
  std::ostringstream d;
  d << "a0=" << r.a0 << " a1=" << r.a1 << " b0=" << r.b0 << " b1=" << r.b1 << " margin=" << r.pinched_margin
    << " time=" << seconds << "s";
  return {ok, d.str()};
}

Outcome spectrum_spread() {
  ExponentConfig c;
  c.spacing = 1e-4;
  c.n_lo = 2;
  c.n_hi = 7;
  const ExponentReport r = exponent_report(ToralSystem::from_integer_matrix(block_matrix()), c);
  const double fast = std::log(2.0 + std::sqrt(3.0));
  const double expected_margin = 2.0 * kEta / fast - 1.0;
  const bool ok =
      within(r.a0, kEta, 0.15) && within(r.a1, fast, 0.15) && within(r.pinched_margin, expected_margin, 0.25);
  std::ostringstream d;
  d << "a0=" << r.a0 << " a1=" << r.a1 << " b0=" << r.b0 << " b1=" << r.b1 << " margin=" << r.pinched_margin
    << " (target " << expected_margin << ")";
  return {ok, d.str()};
}

SymbolicPoint random_golden_point(std::mt19937_64& rng) {
  SymbolicPoint p;
  p.left_cycle = {0};
  p.right_cycle = {0};
  std::bernoulli_distribution coin(0.5);
  int prev = 0;
  for (int k = 0; k < 24; ++k) {
    const int s = prev == 1 ? 0 : static_cast<int>(coin(rng));
    p.core.push_back(s);
    prev = s;
  }
  p.origin = 12;
  return p;
}

Outcome connectivity_dichotomy() {
  ConnectivityConfig c;
  c.sample.window = 0.2;
  c.sample.spacing = 1e-4;
  c.n_lo = 0;
  c.n_hi = 8;
  bool cat_ok = true;
  for (Side side : {Side::stable, Side::unstable}) {
    const ConnectivityReport r = connectivity_report(ToralSystem::from_integer_matrix(cat_matrix()), side, c);
    for (const auto& l : r.levels) cat_ok = cat_ok && l.connected && l.diameter != kInfiniteDistance;
  }

  const System golden = ShiftSystem::golden_mean();
  std::mt19937_64 rng(3);
  std::size_t checked = 0, exceptions = 0;
  SampleSpec spec;
  spec.depth = 3;
  for (int b = 0; checked < 1000 && b < 1000; ++b) {
    const Point base = b == 0 ? default_base_point(golden) : Point{random_golden_point(rng)};
    const LeafSample s = leaf_sample(golden, base, Side::stable, spec);
    if (s.size() < 2) continue;
    const EllMatrix ell = internal_ell_matrix(golden, s, LogScaleConfig{});
    const std::vector<EllTriple> triples = sample_triples(ell, 100000, 1);
    const double delta = triples.empty() ? 0.0 : estimate_delta(triples, 1).delta;
    const int top = ell.max_finite() + static_cast<int>(std::ceil(delta));
    for (int n = top + 1; n <= top + 3; ++n) {
      const LeafGraph g = build_gamma(ell, n);
      for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) {
          ++checked;
          if (graph_distance(g, i, j) != kInfiniteDistance) ++exceptions;
        }
    }
  }
  std::ostringstream d;
  d << "cat connected n=0..8: " << (cat_ok ? "yes" : "no") << "; golden-mean pair checks " << checked
    << ", exceptions " << exceptions;
  return {cat_ok && checked >= 1000 && exceptions == 0, d.str()};
}

Outcome universal_lower_bound() {
  std::size_t bound_checked = 0, bound_bad = 0, doubling_checked = 0, doubling_bad = 0;
  for (const System& sys : {System{ToralSystem::from_integer_matrix(cat_matrix())}, System{ShiftSystem::full(2)},
                            System{ShiftSystem::golden_mean()}}) {
    SampleSpec spec;
    spec.window = 0.2;
    spec.spacing = 1e-3;
    spec.depth = 7;
    const LeafSample s = leaf_sample(sys, default_base_point(sys), Side::stable, spec);
    const EllMatrix ell = internal_ell_matrix(sys, s, LogScaleConfig{});
    const double delta = estimate_delta(sample_triples(ell, 300000, 2)).delta;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
    while (pairs.size() < 300) {
      const std::size_t i = pick(rng), j = pick(rng);
      if (i != j) pairs.emplace_back(i, j);
    }
    const LowerBoundCheck c = lower_bound_check(ell, delta, 0, 10, pairs);
    bound_checked += c.bound_checked;
    bound_bad += c.bound_violations;
    doubling_checked += c.doubling_checked;
    doubling_bad += c.doubling_violations;
  }
  std::ostringstream d;
  d << "bound " << bound_checked - bound_bad << "/" << bound_checked << ", doubling "
    << doubling_checked - doubling_bad << "/" << doubling_checked;
  return {bound_checked > 0 && doubling_checked > 0 && bound_bad == 0 && doubling_bad == 0, d.str()};
}

Outcome metric_synthesis() {
  const ToralSystem cat = ToralSystem::from_integer_matrix(cat_matrix());
  ExponentConfig c;
  c.n_hi = 10;
  const double a0 = critical_exponents(cat, Side::stable, c).lower;
  SampleSpec spec;
  spec.window = 0.2;
  spec.spacing = 1e-3;
  const LeafSample s = leaf_sample(cat, default_base_point(cat), Side::stable, spec);
  const EllMatrix ell = internal_ell_matrix(cat, s, LogScaleConfig{});

  const double beta = 0.5 * a0;
  const SyntheticMetric m = synthesize_metric(ell, beta);
  const MetricAxioms ax = check_metric_axioms(m, ell);
  const SandwichFit good = verify_sandwich(m, ell, beta);
  const double steep = 3.0 * a0;
  const SandwichFit bad = verify_sandwich(synthesize_metric(ell, steep), ell, steep);
  const bool ok = ax.symmetric && ax.max_triangle_excess <= 1e-12 && ax.upper_bound_violations == 0 &&
                  good.ratio() >= 1e-2 && bad.ratio() < 1e-3;
  std::ostringstream d;
  d << "a0=" << a0 << " symmetric=" << ax.symmetric << " triangle_excess=" << ax.max_triangle_excess
    << " upper_violations=" << ax.upper_bound_violations << " ratio(0.5a0)=" << good.ratio()
    << " ratio(3a0)=" << bad.ratio();
  return {ok, d.str()};
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
  return sxy / sxx;
}

Outcome hyperbolic_graph() {
  std::ostringstream d;
  bool sweep_ok = true;
  for (int s_rad : {1, 2}) {
    const GroupData data = GroupData::make(cat_matrix(), s_rad, 1.5);
    const double d6 = delta_hyperbolicity(build_xi(data, 6, 40), 20000, 1).delta;
    const double d8 = delta_hyperbolicity(build_xi(data, 8, 40), 20000, 1).delta;
    sweep_ok = sweep_ok && std::abs(d8 - d6) <= 1.0;
    d << "s_rad=" << s_rad << " delta(N=6)=" << d6 << " delta(N=8)=" << d8 << "; ";
  }
  // Control: one level, tube width growing with rho.
  std::vector<double> rhos, xi, flat;
  for (int rho : {10, 20, 30, 40}) {
    rhos.push_back(rho);
    xi.push_back(delta_hyperbolicity(build_xi(GroupData::make(cat_matrix(), 1, 1.5), 6, rho), 20000, 1).delta);
    flat.push_back(delta_hyperbolicity(build_xi(GroupData::make(cat_matrix(), 1, 0.5 * rho), 0, rho), 20000, 1).delta);
  }
  const double xi_slope = slope(rhos, xi), flat_slope = slope(rhos, flat);
  const bool control_ok = flat_slope > 0.0 && flat_slope >= 3.0 * std::max(xi_slope, 0.0);
  d << "growth slope per unit rho: control " << flat_slope << ", xi " << xi_slope;
  return {sweep_ok && control_ok, d.str()};
}

Outcome digit_round_trip() {
  const GroupData data = GroupData::make(cat_matrix(), 2, 1.5);
  const Vec dir = data.split.e_plus_basis.col(0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  double worst_reconstruct = 0.0, worst_boundary = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Vec v = u(rng) * dir;
    const DigitExpansion e = digit_expand(data.split, v, 2, 40);
    worst_reconstruct = std::max(worst_reconstruct, (reconstruct(data.split, e, 40) - v).norm());
    worst_boundary =
        std::max(worst_boundary, (boundary_point(data, lattice_path(cat_matrix(), e), 40) - v).norm());
  }
  return {worst_reconstruct < 1e-6 && worst_boundary <= 1e-6,
          "max reconstruction error " + fmt("%.3g", worst_reconstruct) + ", max boundary error " +
              fmt("%.3g", worst_boundary)};
}

Outcome fixed_point() {
  const Mat a = to_real(cat_matrix());
  Vec v0(2);
  v0 << 1.0, 0.0;
  const Vec w0 = affine_fixed_point(a, v0);
  Vec expected(2);
  expected << 0.0, -1.0;
  double worst = (w0 - a * w0 - v0).norm();
  const bool spot = (w0 - expected).norm() <= 1e-12 && worst <= 1e-12;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int t = 0; t < 1000; ++t) {
    const Vec v = Vec::NullaryExpr(2, [&] { return g(rng); });
    const Vec w = affine_fixed_point(a, v);
    worst = std::max(worst, (w - a * w - v).norm());
  }
  return {spot && worst <= 1e-12,
          "w0=(" + fmt("%.3g", w0(0)) + ", " + fmt("%.3g", w0(1)) + "), max residual " + fmt("%.3g", worst)};
}

Outcome brin_pinched() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int counterexamples = 0, brin = 0;
  for (int t = 0; t < 10000; ++t) {
    double l1 = 0.001 + 0.998 * u(rng), l2 = 0.001 + 0.998 * u(rng);
    double m1 = 1.001 + 50.0 * u(rng), m2 = 1.001 + 50.0 * u(rng);
    if (l1 > l2) std::swap(l1, l2);
    if (m2 > m1) std::swap(m1, m2);
    const MatherCheck c = mather_check({l1, l2, m2, m1});
    if (c.brin1 || c.brin2) {
      ++brin;
      if (!(c.pinched_sum > 1.0)) ++counterexamples;
    }
  }
  const double spot = mather_check({0.3, 0.4, 2.0, 3.0}).pinched_sum;
  return {counterexamples == 0 && std::abs(spot - 1.3919) <= 1e-3,
          "tuples satisfying Brin " + std::to_string(brin) + "/10000, counterexamples " +
              std::to_string(counterexamples) + ", spot pinched_sum " + fmt("%.6f", spot)};
}

Outcome codimension_one() {
  const ToralSystem cat = ToralSystem::from_integer_matrix(cat_matrix());
  ExponentConfig c;
  c.spacing = 1e-4;
  c.n_hi = 10;
  const CodimOneResult r = codim_one_check(cat, Side::stable, c);
  SampleSpec spec;
  spec.window = 0.2;
  spec.spacing = 1e-3;
  const LeafMeasureResult m =
      leaf_measure_check(cat, leaf_sample(cat, default_base_point(cat), Side::stable, spec), LogScaleConfig{});
  const bool ok = r.relative_gap < 0.05 && r.eta_gap < 0.10 && within(m.fitted_exponent, kEta, 0.10);
  std::ostringstream d;
  d << "a0=" << r.a0 << " a1=" << r.a1 << " gap=" << r.relative_gap << " eta_gap=" << r.eta_gap
    << " leaf_measure_exponent=" << m.fitted_exponent;
  return {ok, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"cat-map exponents", cat_exponents},
      {"spectrum spread on T^4", spectrum_spread},
      {"connectivity dichotomy", connectivity_dichotomy},
      {"universal lower bound", universal_lower_bound},
      {"metric synthesis", metric_synthesis},
      {"hyperbolic graph", hyperbolic_graph},
      {"digit-expansion round trip", digit_round_trip},
      {"affine fixed point", fixed_point},
      {"Brin implies pinched", brin_pinched},
      {"codimension one", codimension_one},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
