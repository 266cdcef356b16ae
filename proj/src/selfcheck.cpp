#include "hypdyn/selfcheck.hpp"

#include "hypdyn/exponents.hpp"
#include "hypdyn/hypgraph.hpp"
#include "hypdyn/leafgraph.hpp"
#include "hypdyn/metrics.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace hypdyn {

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

IntMat cat_matrix() {
  IntMat a(2, 2);
  a << 2, 1, 1, 1;
  return a;
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

Vec random_point(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = u(rng);
  return v;
}

Vec nearby(std::mt19937_64& rng, const Vec& x, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  Vec v = x;
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += u(rng);
  return reduce_mod1(v);
}

const Vec& coords(const Point& p) { return std::get<TorusPoint>(p).coords; }

}  // namespace

std::vector<PropertyResult> selfcheck(const SelfcheckOptions& options) {
  ToralSystem cat_torus = ToralSystem::from_integer_matrix(cat_matrix());
  if (options.inject_fault) cat_torus.orientation = BracketOrientation::flipped;
  const System cat = cat_torus;
  const System shift2 = ShiftSystem::full(2);
  const System golden = ShiftSystem::golden_mean();
  const LogScaleConfig lc;

  std::vector<PropertyResult> results;
  auto property = [&](const std::string& name, const std::function<Outcome(std::mt19937_64&)>& body) {
    if (!options.filter.empty() && name != options.filter && name.rfind(options.filter + ".", 0) != 0) return;
    std::mt19937_64 rng(options.seed);
    PropertyResult r{name, false, ""};
    try {
      const Outcome o = body(rng);
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    results.push_back(std::move(r));
  };

  property("models.bracket_leaves", [&](std::mt19937_64& rng) {
    // [x, y] must share the forward orbit of y and the backward orbit of x.
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const Point x = TorusPoint{random_point(rng, 2)};
      const Point y = TorusPoint{nearby(rng, coords(x), 0.1)};
      const auto z = bracket(cat, x, y);
      if (!z) return Outcome{false, "bracket undefined for close points"};
      worst = std::max({worst, PairOrbit(cat, *z, y).gap(25), PairOrbit(cat, *z, x).gap(-25)});
    }
    return Outcome{worst < 1e-6, "max tail gap " + num(worst)};
  });

  property("models.bracket_axioms", [&](std::mt19937_64& rng) {
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const Point x = TorusPoint{random_point(rng, 2)};
      const Point y = TorusPoint{nearby(rng, coords(x), 0.05)};
      const Point z = TorusPoint{nearby(rng, coords(x), 0.05)};
      auto gap = [&](const std::optional<Point>& a, const std::optional<Point>& b) {
        if (!a || !b) return 1.0;
        return torus_norm(wrapped_difference(coords(*a), coords(*b)));
      };
      const auto xy = bracket(cat, x, y), xz = bracket(cat, x, z), yz = bracket(cat, y, z);
      worst = std::max(worst, gap(bracket(cat, x, x), x));
      worst = std::max(worst, gap(xy ? bracket(cat, *xy, z) : std::nullopt, xz));
      worst = std::max(worst, gap(yz ? bracket(cat, x, *yz) : std::nullopt, xz));
    }
    return Outcome{worst < 1e-12, "max defect " + num(worst)};
  });

  property("models.shift_bracket", [&](std::mt19937_64& rng) {
    const LeafSample s = leaf_sample(golden, default_base_point(golden), Side::unstable, SampleSpec{});
    std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
    for (int t = 0; t < 200; ++t) {
      const auto& x = std::get<SymbolicPoint>(s.points[pick(rng)]);
      const auto& y = std::get<SymbolicPoint>(s.points[pick(rng)]);
      const auto z = bracket(golden, x, y);
      if (!z) return Outcome{false, "bracket undefined on a shared zero coordinate"};
      const auto& zs = std::get<SymbolicPoint>(*z);
      for (long k = -8; k <= 8; ++k)
        if (zs.at(k) != (k <= 0 ? x.at(k) : y.at(k))) return Outcome{false, "wrong symbol at " + std::to_string(k)};
    }
    return Outcome{true, "200 brackets"};
  });

  property("models.iterate_inverse", [&](std::mt19937_64& rng) {
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Point x = TorusPoint{random_point(rng, 2)};
      worst = std::max(worst, torus_norm(wrapped_difference(coords(iterate(cat, iterate(cat, x, 5), -5)), coords(x))));
    }
    const Point s = default_base_point(shift2);
    const bool shift_ok = dist(shift2, iterate(shift2, iterate(shift2, s, 7), -7), s) == 0.0;
    return Outcome{worst < 1e-9 && shift_ok, "torus round-trip error " + num(worst)};
  });

  property("models.dist_symmetric", [&](std::mt19937_64& rng) {
    for (int t = 0; t < 100; ++t) {
      const Point x = TorusPoint{random_point(rng, 2)}, y = TorusPoint{random_point(rng, 2)};
      if (dist(cat, x, y) != dist(cat, y, x) || dist(cat, x, x) != 0.0) return Outcome{false, "torus"};
    }
    return Outcome{true, "100 pairs"};
  });

  property("linear.projection_algebra", [&](std::mt19937_64&) {
    IntMat b = IntMat::Zero(4, 4);
    b.block(0, 0, 2, 2) = cat_matrix();
    b.block(2, 2, 2, 2) << 3, 1, 2, 1;
    double worst = 0.0;
    for (const IntMat& m : {cat_matrix(), b}) {
      const SpectralSplit s = spectral_split(to_real(m));
      const Mat id = Mat::Identity(s.dim(), s.dim());
      worst = std::max({worst, (s.p_plus + s.p_minus - id).norm(), (s.p_plus * s.p_plus - s.p_plus).norm(),
                        (s.p_plus * s.p_minus).norm(), (s.p_plus * s.matrix - s.matrix * s.p_plus).norm()});
    }
    return Outcome{worst <= 1e-10, "max defect " + num(worst)};
  });

  property("linear.fixed_point", [&](std::mt19937_64& rng) {
    const Mat a = to_real(cat_matrix());
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const Vec v0 = Vec::NullaryExpr(2, [&] { return g(rng); });
      const Vec w0 = affine_fixed_point(a, v0);
      worst = std::max(worst, (w0 - a * w0 - v0).norm());
    }
    return Outcome{worst <= 1e-12, "max residual " + num(worst)};
  });

  property("linear.brin_implies_pinched", [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int counter = 0;
    for (int t = 0; t < 10000; ++t) {
      double l1 = 0.01 + 0.98 * u(rng), l2 = 0.01 + 0.98 * u(rng);
      double m1 = 1.01 + 9.0 * u(rng), m2 = 1.01 + 9.0 * u(rng);
      if (l1 > l2) std::swap(l1, l2);
      if (m2 > m1) std::swap(m1, m2);
      const MatherCheck c = mather_check({l1, l2, m2, m1});
      if ((c.brin1 || c.brin2) && !(c.pinched_sum > 1.0)) ++counter;
    }
    return Outcome{counter == 0, std::to_string(counter) + " counterexamples"};
  });

  property("linear.digit_round_trip", [&](std::mt19937_64& rng) {
    const SpectralSplit s = spectral_split(to_real(cat_matrix()));
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const Vec v = s.e_plus_basis.col(0) * u(rng);
      const DigitExpansion e = digit_expand(s, v, 2, 40);
      worst = std::max(worst, (reconstruct(s, e, 40) - v).norm());
    }
    return Outcome{worst < 1e-6, "max error " + num(worst)};
  });

  property("logscale.symmetry", [&](std::mt19937_64& rng) {
    for (int t = 0; t < 200; ++t) {
      const Point x = TorusPoint{random_point(rng, 2)};
      const Point y = TorusPoint{nearby(rng, coords(x), 0.05)};
      if (!(standard_ell(cat, x, y, lc) == standard_ell(cat, y, x, lc))) return Outcome{false, "asymmetric reading"};
    }
    return Outcome{true, "200 pairs"};
  });

  property("logscale.equivariance", [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(1e-4, 0.2);
    for (Side side : {Side::stable, Side::unstable}) {
      const Vec dir = cat_torus.side_basis(side).col(0);
      for (int t = 0; t < 100; ++t) {
        const Vec delta = u(rng) * dir;
        const LogScaleValue before = internal_ell(PairOrbit::from_displacement(cat_torus, delta), side, lc);
        const LogScaleValue after =
            internal_ell(PairOrbit::from_displacement(cat_torus, cat_torus.matrix * delta), side, lc);
        if (!before.usable() || !after.usable()) continue;
        if (after.value - before.value != (side == Side::stable ? 1 : -1))
          return Outcome{false, std::string("shift by f broken on the ") + to_string(side) + " side"};
      }
    }
    return Outcome{true, "internal log-scales move by one level under f"};
  });

  property("logscale.delta_finite", [&](std::mt19937_64&) {
    SampleSpec spec;
    spec.spacing = 2e-3;
    const LeafSample s = leaf_sample(cat, default_base_point(cat), Side::stable, spec);
    const EllMatrix ell = internal_ell_matrix(cat, s, lc, options.threads);
    const DeltaEstimate d = estimate_delta(sample_triples(ell, 20000, options.seed));
    return Outcome{std::isfinite(d.delta) && d.delta >= 0.0 && d.delta <= 3.0, "delta " + num(d.delta)};
  });

  property("leafgraph.cat_connected", [&](std::mt19937_64&) {
    ConnectivityConfig c;
    c.n_hi = 4;
    c.sample.spacing = 2e-3;
    c.threads = options.threads;
    for (Side side : {Side::stable, Side::unstable})
      for (const auto& l : connectivity_report(cat, side, c).levels)
        if (!l.connected) return Outcome{false, "disconnected at n = " + std::to_string(l.n)};
    return Outcome{true, "levels 0..4 connected on both sides"};
  });

  property("leafgraph.shift_disconnected", [&](std::mt19937_64&) {
    const LeafSample s = leaf_sample(golden, default_base_point(golden), Side::stable, SampleSpec{});
    const EllMatrix ell = internal_ell_matrix(golden, s, lc);
    const DeltaEstimate d = estimate_delta(sample_triples(ell, 20000, options.seed), 1);
    const int top = ell.max_finite() + static_cast<int>(std::ceil(d.delta));
    for (int n = top + 1; n <= top + 4; ++n)
      if (connected_components(build_gamma(ell, n)).count < 2)
        return Outcome{false, "connected at n = " + std::to_string(n)};
    return Outcome{true, "disconnected above level " + std::to_string(top)};
  });

  property("exponents.cat_pinched", [&](std::mt19937_64&) {
    ExponentConfig c;
    c.n_hi = 10;
    c.threads = options.threads;
    const ExponentReport r = exponent_report(cat, c);
    const bool ok = r.a0 <= r.a1 && r.b0 <= r.b1 && r.pinched_margin >= 0.7 && r.pinched_margin <= 1.15;
    return Outcome{ok, "pinched margin " + num(r.pinched_margin)};
  });

  property("exponents.lower_bound", [&](std::mt19937_64&) {
    SampleSpec spec;
    spec.depth = 5;
    const LeafSample s = leaf_sample(shift2, default_base_point(shift2), Side::stable, spec);
    const EllMatrix ell = internal_ell_matrix(shift2, s, lc);
    const DeltaEstimate d = estimate_delta(sample_triples(ell, 20000, options.seed));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t j = 1; j < s.size(); ++j) pairs.emplace_back(0, j);
    const LowerBoundCheck c = lower_bound_check(ell, d.delta, 0, 6, pairs);
    return Outcome{c.bound_violations == 0 && c.doubling_violations == 0,
                   std::to_string(c.bound_violations + c.doubling_violations) + " violations"};
  });

  property("metrics.axioms", [&](std::mt19937_64&) {
    SampleSpec spec;
    spec.spacing = 2e-3;
    const LeafSample s = leaf_sample(cat, default_base_point(cat), Side::stable, spec);
    const EllMatrix ell = internal_ell_matrix(cat, s, lc, options.threads);
    const SyntheticMetric m = synthesize_metric(ell, 0.5);
    const MetricAxioms a = check_metric_axioms(m, ell);
    const bool ok = a.symmetric && a.max_triangle_excess <= 1e-12 && a.upper_bound_violations == 0 &&
                    a.zero_off_diagonal == 0;
    return Outcome{ok, "triangle excess " + num(a.max_triangle_excess)};
  });

  property("hypgraph.level_automorphism", [&](std::mt19937_64&) {
    const LevelledGraph g = build_xi(GroupData::make(cat_matrix(), 1, 1.5), 3, 8);
    const std::size_t layer = g.points.size();
    for (std::size_t u = 0; u < g.size(); ++u)
      for (auto v : g.adjacency[u]) {
        if (g.level_of(u) >= g.levels || g.level_of(v) >= g.levels) continue;
        if (!g.adjacent(u + layer, v + layer)) return Outcome{false, "edge lost under the level shift"};
      }
    return Outcome{true, std::to_string(g.size()) + " vertices"};
  });

  property("hypgraph.delta_truncation", [&](std::mt19937_64&) {
    const GroupData data = GroupData::make(cat_matrix(), 1, 1.5);
    const double d4 = delta_hyperbolicity(build_xi(data, 4, 12), 5000, options.seed, options.threads).delta;
    const double d6 = delta_hyperbolicity(build_xi(data, 6, 12), 5000, options.seed, options.threads).delta;
    return Outcome{std::abs(d4 - d6) <= 1.0, "delta " + num(d4) + " vs " + num(d6)};
  });

  return results;
}

}  // namespace hypdyn
