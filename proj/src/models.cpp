#include "hypdyn/models.hpp"

#include "hypdyn/errors.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <sstream>

namespace hypdyn {

namespace {

long floor_mod(long a, long m) {
  const long r = a % m;
  return r < 0 ? r + m : r;
}

double frac(double v) {
  double r = v - std::floor(v);
  if (r >= 1.0) r = 0.0;
  return r;
}

template <class Symbol>
SymbolicPoint rebuild(const SymbolicPoint& left_src, const SymbolicPoint& right_src, long lo, long hi,
                      const Symbol& symbol) {
  SymbolicPoint out;
  const long L = static_cast<long>(left_src.left_cycle.size());
  const long R = static_cast<long>(right_src.right_cycle.size());
  out.left_cycle.resize(L);
  for (long i = 0; i < L; ++i) out.left_cycle[i] = left_src.left_cycle[floor_mod(i + lo + left_src.origin, L)];
  out.right_cycle.resize(R);
  const long right_shift = hi + right_src.origin - static_cast<long>(right_src.core.size());
  for (long i = 0; i < R; ++i) out.right_cycle[i] = right_src.right_cycle[floor_mod(i + right_shift, R)];
  out.core.resize(static_cast<std::size_t>(hi - lo));
  for (long k = lo; k < hi; ++k) out.core[k - lo] = symbol(k);
  out.origin = -lo;
  return out;
}

void check_cycles(const SymbolicPoint& p) {
  if (p.left_cycle.empty() || p.right_cycle.empty())
    throw Error(ErrorKind::InvalidInput, "symbolic point cycles must be non-empty");
}

// First-successor walk from state 0 until a state repeats.
std::vector<int> some_cycle(const ShiftSystem& s) {
  std::vector<int> seen_at(s.alphabet, -1), walk;
  int state = 0;
  while (seen_at[state] < 0) {
    seen_at[state] = static_cast<int>(walk.size());
    walk.push_back(state);
    int next = 0;
    while (!s.allowed(state, next)) ++next;
    state = next;
  }
  return {walk.begin() + seen_at[state], walk.end()};
}

}  // namespace

const char* to_string(Side side) { return side == Side::stable ? "stable" : "unstable"; }

Side side_from_string(const std::string& name) {
  if (name == "stable") return Side::stable;
  if (name == "unstable") return Side::unstable;
  throw Error(ErrorKind::InvalidInput, "side must be 'stable' or 'unstable', got '" + name + "'");
}

int SymbolicPoint::at(long k) const {
  const long j = k + origin;
  const long n = static_cast<long>(core.size());
  if (j < 0) return left_cycle[floor_mod(j, static_cast<long>(left_cycle.size()))];
  if (j < n) return core[j];
  return right_cycle[floor_mod(j - n, static_cast<long>(right_cycle.size()))];
}

SymbolicPoint SymbolicPoint::constant(int symbol) { return SymbolicPoint{{symbol}, {symbol}, {symbol}, 0}; }

ToralSystem ToralSystem::from_integer_matrix(const IntMat& m, double bracket_radius) {
  if (!(bracket_radius > 0.0 && bracket_radius <= 0.25))
    throw Error(ErrorKind::InvalidInput, "bracket_radius must lie in (0, 0.25]");
  if (m.rows() < 2) throw Error(ErrorKind::InvalidInput, "torus dimension must be at least 2");
  const IntMat inv = integer_inverse(m);
  ToralSystem s;
  s.matrix = to_real(m);
  s.inverse = to_real(inv);
  s.split = spectral_split(s.matrix);
  s.bracket_radius = bracket_radius;
  s.integral = true;
  return s;
}

ToralSystem ToralSystem::linear_toy(const Mat& m, double bracket_radius) {
  if (!(bracket_radius > 0.0 && bracket_radius <= 0.25))
    throw Error(ErrorKind::InvalidInput, "bracket_radius must lie in (0, 0.25]");
  ToralSystem s;
  s.matrix = m;
  s.split = spectral_split(m);
  s.inverse = m.inverse();
  s.bracket_radius = bracket_radius;
  s.integral = false;
  return s;
}

ShiftSystem ShiftSystem::make(int alphabet, std::vector<std::vector<int>> transitions, double kappa) {
  if (alphabet < 1) throw Error(ErrorKind::InvalidInput, "alphabet must be positive");
  if (!(kappa > 0.0)) throw Error(ErrorKind::InvalidInput, "kappa must be positive");
  if (static_cast<int>(transitions.size()) != alphabet)
    throw Error(ErrorKind::InvalidInput, "transition matrix must be alphabet x alphabet");
  for (const auto& row : transitions) {
    if (static_cast<int>(row.size()) != alphabet)
      throw Error(ErrorKind::InvalidInput, "transition matrix must be alphabet x alphabet");
    for (int v : row)
      if (v != 0 && v != 1) throw Error(ErrorKind::InvalidInput, "transition entries must be 0 or 1");
  }
  for (int start = 0; start < alphabet; ++start) {
    std::vector<char> reached(alphabet, 0);
    std::queue<int> q;
    q.push(start);
    while (!q.empty()) {
      const int a = q.front();
      q.pop();
      for (int b = 0; b < alphabet; ++b)
        if (transitions[a][b] && !reached[b]) {
          reached[b] = 1;
          q.push(b);
        }
    }
    if (std::count(reached.begin(), reached.end(), 1) != alphabet)
      throw Error(ErrorKind::InvalidInput, "transition matrix is not irreducible");
  }
  ShiftSystem s;
  s.alphabet = alphabet;
  s.transitions = std::move(transitions);
  s.kappa = kappa;
  return s;
}

ShiftSystem ShiftSystem::full(int alphabet) {
  return make(alphabet, std::vector<std::vector<int>>(alphabet, std::vector<int>(alphabet, 1)));
}

ShiftSystem ShiftSystem::golden_mean() { return make(2, {{1, 1}, {1, 0}}); }

void ShiftSystem::validate(const SymbolicPoint& p) const {
  check_cycles(p);
  auto in_range = [&](const std::vector<int>& w) {
    return std::all_of(w.begin(), w.end(), [&](int s) { return s >= 0 && s < alphabet; });
  };
  if (!in_range(p.left_cycle) || !in_range(p.core) || !in_range(p.right_cycle))
    throw Error(ErrorKind::InvalidInput, "symbol outside the alphabet");
  const long lo = p.core_lo() - static_cast<long>(p.left_cycle.size()) - 1;
  const long hi = p.core_hi() + static_cast<long>(p.right_cycle.size()) + 1;
  for (long k = lo; k < hi; ++k)
    if (!allowed(p.at(k), p.at(k + 1)))
      throw Error(ErrorKind::InvalidInput, "forbidden transition " + std::to_string(p.at(k)) + "->" +
                                               std::to_string(p.at(k + 1)) + " at index " + std::to_string(k));
}

bool is_torus(const System& s) { return std::holds_alternative<ToralSystem>(s); }

const ToralSystem& as_torus(const System& s) {
  if (const auto* t = std::get_if<ToralSystem>(&s)) return *t;
  throw Error(ErrorKind::InvalidInput, "operation requires a toral system");
}

const ShiftSystem& as_shift(const System& s) {
  if (const auto* t = std::get_if<ShiftSystem>(&s)) return *t;
  throw Error(ErrorKind::InvalidInput, "operation requires a shift system");
}

double torus_norm(const Vec& v) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double r = v(i) - std::nearbyint(v(i));
    acc += r * r;
  }
  return std::sqrt(acc);
}

Vec wrapped_difference(const Vec& x, const Vec& y) {
  Vec d = y - x;
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) -= std::nearbyint(d(i));
  return d;
}

Vec reduce_mod1(const Vec& v) { return v.unaryExpr([](double c) { return frac(c); }); }

namespace {

const TorusPoint& torus_point(const Point& p, int dim) {
  const auto* t = std::get_if<TorusPoint>(&p);
  if (!t) throw Error(ErrorKind::InvalidInput, "expected a torus point");
  if (t->coords.size() != dim) throw Error(ErrorKind::InvalidInput, "torus point dimension mismatch");
  return *t;
}

const SymbolicPoint& symbolic_point(const Point& p) {
  const auto* s = std::get_if<SymbolicPoint>(&p);
  if (!s) throw Error(ErrorKind::InvalidInput, "expected a symbolic point");
  check_cycles(*s);
  return *s;
}

}  // namespace

Point iterate(const System& system, const Point& p, int k) {
  if (const auto* t = std::get_if<ToralSystem>(&system)) {
    Vec x = torus_point(p, t->dim()).coords;
    const Mat& step = k >= 0 ? t->matrix : t->inverse;
    for (int i = 0; i < std::abs(k); ++i) x = reduce_mod1(step * x);
    return TorusPoint{x};
  }
  SymbolicPoint s = symbolic_point(p);
  s.origin += k;
  return s;
}

std::optional<long> first_disagreement(const SymbolicPoint& x, const SymbolicPoint& y, long center) {
  const long right_period = std::lcm(static_cast<long>(x.right_cycle.size()), static_cast<long>(y.right_cycle.size()));
  const long left_period = std::lcm(static_cast<long>(x.left_cycle.size()), static_cast<long>(y.left_cycle.size()));
  const long right_end = std::max(x.core_hi(), y.core_hi()) + right_period;
  const long left_end = std::min(x.core_lo(), y.core_lo()) - left_period;
  const long radius = std::max({right_end - center, center - left_end, 0L});
  for (long r = 0; r <= radius; ++r) {
    if (x.at(center + r) != y.at(center + r) || x.at(center - r) != y.at(center - r)) return r;
  }
  return std::nullopt;
}

double dist(const System& system, const Point& x, const Point& y) {
  if (const auto* t = std::get_if<ToralSystem>(&system)) {
    return torus_norm(wrapped_difference(torus_point(x, t->dim()).coords, torus_point(y, t->dim()).coords));
  }
  const auto r = first_disagreement(symbolic_point(x), symbolic_point(y), 0);
  return r ? std::exp(-std::get<ShiftSystem>(system).kappa * static_cast<double>(*r)) : 0.0;
}

SymbolicPoint splice(const SymbolicPoint& x, const SymbolicPoint& y, long cut) {
  const long lo = std::min(cut, x.core_lo());
  const long hi = std::max(cut, y.core_hi());
  return rebuild(x, y, lo, hi, [&](long k) { return k < cut ? x.at(k) : y.at(k); });
}

SymbolicPoint with_word(const SymbolicPoint& base, long start, const std::vector<int>& word) {
  const long end = start + static_cast<long>(word.size());
  const long lo = std::min(start, base.core_lo());
  const long hi = std::max(end, base.core_hi());
  return rebuild(base, base, lo, hi, [&](long k) { return k >= start && k < end ? word[k - start] : base.at(k); });
}

std::optional<Point> bracket(const System& system, const Point& x, const Point& y) {
  if (const auto* t = std::get_if<ToralSystem>(&system)) {
    const Vec& xc = torus_point(x, t->dim()).coords;
    const Vec w = wrapped_difference(xc, torus_point(y, t->dim()).coords);
    if (!(w.norm() < t->bracket_radius)) return std::nullopt;
    const Mat& projection =
        t->orientation == BracketOrientation::flipped ? t->split.p_plus : t->split.p_minus;
    return TorusPoint{reduce_mod1(xc + projection * w)};
  }
  const SymbolicPoint& sx = symbolic_point(x);
  const SymbolicPoint& sy = symbolic_point(y);
  if (sx.at(0) != sy.at(0)) return std::nullopt;
  return splice(sx, sy, 1);
}

PairOrbit::PairOrbit(const System& system, const Point& x, const Point& y) {
  if (const auto* t = std::get_if<ToralSystem>(&system)) {
    *this = from_displacement(*t, wrapped_difference(torus_point(x, t->dim()).coords, torus_point(y, t->dim()).coords));
    return;
  }
  kappa_ = std::get<ShiftSystem>(system).kappa;
  x_ = symbolic_point(x);
  y_ = symbolic_point(y);
  identical_ = !first_disagreement(x_, y_, 0).has_value();
}

PairOrbit PairOrbit::from_displacement(const ToralSystem& system, const Vec& delta) {
  PairOrbit o;
  o.torus_ = &system;
  o.plus_ = system.split.coords_plus * delta;
  o.minus_ = system.split.coords_minus * delta;
  // Round-off across the split would be amplified by up to |lambda|^n_max.
  // Coordinates live in [0, 1), hence the absolute floor.
  const double tiny = 1e-12 * delta.norm() + 1e-15;
  if (o.plus_.norm() <= tiny) o.plus_.setZero();
  if (o.minus_.norm() <= tiny) o.minus_.setZero();
  o.identical_ = delta.cwiseAbs().maxCoeff() == 0.0;
  return o;
}

double PairOrbit::gap(int k) const { return gaps(k, k).front(); }

std::vector<double> PairOrbit::gaps(int kmin, int kmax) const {
  std::vector<double> out;
  if (kmax < kmin) return out;
  out.reserve(static_cast<std::size_t>(kmax - kmin + 1));
  if (!torus_) {
    for (int k = kmin; k <= kmax; ++k) {
      const auto r = first_disagreement(x_, y_, k);
      out.push_back(r ? std::exp(-kappa_ * static_cast<double>(*r)) : 0.0);
    }
    return out;
  }
  const SpectralSplit& s = torus_->split;
  Vec plus = plus_, minus = minus_;
  const Mat& a_plus = kmin >= 0 ? s.restricted_plus : s.restricted_plus_inverse;
  const Mat& a_minus = kmin >= 0 ? s.restricted_minus : s.restricted_minus_inverse;
  for (int i = 0; i < std::abs(kmin); ++i) {
    plus = a_plus * plus;
    minus = a_minus * minus;
  }
  for (int k = kmin;; ++k) {
    out.push_back(torus_norm(s.e_plus_basis * plus + s.e_minus_basis * minus));
    if (k == kmax) break;
    plus = s.restricted_plus * plus;
    minus = s.restricted_minus * minus;
  }
  return out;
}

LeafSample leaf_sample(const System& system, const Point& base, Side side, const SampleSpec& spec) {
  LeafSample out;
  out.side = side;
  out.base = base;
  if (const auto* t = std::get_if<ToralSystem>(&system)) {
    const Vec& b = torus_point(base, t->dim()).coords;
    if (!(spec.window >= 0.0) || !(spec.spacing > 0.0))
      throw Error(ErrorKind::InvalidInput, "window must be >= 0 and spacing > 0");
    const double steps = std::floor(2.0 * spec.window / spec.spacing + 1e-9);
    const Mat& basis = t->side_basis(side);
    const int slice = std::min<int>(2, static_cast<int>(basis.cols()));
    const double per_axis = steps + 1.0;
    if (std::pow(per_axis, slice) > static_cast<double>(spec.max_points))
      throw Error(ErrorKind::SampleTooLarge, "leaf sample would hold " + std::to_string(std::pow(per_axis, slice)) +
                                                 " points, limit " + std::to_string(spec.max_points));
    const long count = static_cast<long>(steps) + 1;
    auto coordinate = [&](long i) { return -spec.window + static_cast<double>(i) * spec.spacing; };
    out.grid_count = spec.window == 0.0 ? 1 : count;
    out.grid_rank = spec.window == 0.0 ? 1 : slice;
    auto push = [&](const Vec& offset, double param, long gi, long gj) {
      out.grid.push_back({gi, gj});
      out.offsets.push_back(offset);
      out.points.push_back(TorusPoint{reduce_mod1(b + offset)});
      out.params.push_back(param);
    };
    if (spec.window == 0.0) {
      push(Vec::Zero(b.size()), 0.0, 0, 0);
    } else if (slice == 1) {
      for (long i = 0; i < count; ++i) push(coordinate(i) * basis.col(0), coordinate(i), i, 0);
    } else {
      for (long i = 0; i < count; ++i)
        for (long j = 0; j < count; ++j)
          push(coordinate(i) * basis.col(0) + coordinate(j) * basis.col(1), static_cast<double>(i * count + j), i, j);
    }
    return out;
  }

  const ShiftSystem& s = std::get<ShiftSystem>(system);
  const SymbolicPoint& b = symbolic_point(base);
  s.validate(b);
  if (spec.depth < 1) throw Error(ErrorKind::InvalidInput, "depth must be at least 1");
  const double total = std::pow(static_cast<double>(s.alphabet), spec.depth);
  if (total > static_cast<double>(spec.max_points))
    throw Error(ErrorKind::SampleTooLarge, "leaf sample would enumerate " + std::to_string(total) + " words, limit " +
                                               std::to_string(spec.max_points));
  const long start = side == Side::stable ? -spec.depth : 1;
  std::vector<int> word(static_cast<std::size_t>(spec.depth), 0);
  double index = 0.0;
  while (true) {
    bool admissible = s.allowed(b.at(start - 1), word.front()) && s.allowed(word.back(), b.at(start + spec.depth));
    for (std::size_t i = 0; admissible && i + 1 < word.size(); ++i) admissible = s.allowed(word[i], word[i + 1]);
    if (admissible) {
      out.points.push_back(with_word(b, start, word));
      out.params.push_back(index);
      index += 1.0;
    }
    int pos = spec.depth - 1;
    while (pos >= 0 && ++word[pos] == s.alphabet) word[pos--] = 0;
    if (pos < 0) break;
  }
  return out;
}

Vec sample_displacement(const LeafSample& sample, std::size_t i, std::size_t j) {
  return sample.offsets.at(j) - sample.offsets.at(i);
}

PairOrbit sample_orbit(const System& system, const LeafSample& sample, std::size_t i, std::size_t j) {
  if (const auto* t = std::get_if<ToralSystem>(&system))
    return PairOrbit::from_displacement(*t, sample_displacement(sample, i, j));
  return PairOrbit(system, sample.points[i], sample.points[j]);
}

Point default_base_point(const System& system) {
  if (const auto* t = std::get_if<ToralSystem>(&system)) return TorusPoint{Vec::Zero(t->dim())};
  const std::vector<int> cycle = some_cycle(std::get<ShiftSystem>(system));
  return SymbolicPoint{cycle, {}, cycle, 0};
}

System system_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidInput, "system description must be a JSON object");
  if (!j.contains("type")) throw Error(ErrorKind::InvalidInput, "system description missing key: type");
  const std::string type = j.at("type").get<std::string>();
  try {
    if (type == "torus") {
      if (!j.contains("matrix")) throw Error(ErrorKind::InvalidInput, "torus system missing key: matrix");
      const auto rows = j.at("matrix").get<std::vector<std::vector<double>>>();
      const auto d = static_cast<Eigen::Index>(rows.size());
      IntMat m(d, d);
      for (Eigen::Index r = 0; r < d; ++r) {
        if (static_cast<Eigen::Index>(rows[r].size()) != d)
          throw Error(ErrorKind::InvalidInput, "torus matrix must be square");
        for (Eigen::Index c = 0; c < d; ++c) {
          const double v = rows[r][c];
          if (v != std::round(v)) throw Error(ErrorKind::InvalidInput, "torus matrix entries must be integers");
          m(r, c) = static_cast<std::int64_t>(v);
        }
      }
      return ToralSystem::from_integer_matrix(m, j.value("bracket_radius", 0.25));
    }
    if (type == "sft") {
      std::vector<std::string> missing;
      for (const char* key : {"alphabet", "transitions"})
        if (!j.contains(key)) missing.emplace_back(key);
      if (!missing.empty()) {
        std::string msg = "sft system missing keys:";
        for (const auto& k : missing) msg += " " + k;
        throw Error(ErrorKind::InvalidInput, msg);
      }
      return ShiftSystem::make(j.at("alphabet").get<int>(), j.at("transitions").get<std::vector<std::vector<int>>>(),
                               j.value("kappa", std::log(2.0)));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed system description: ") + e.what());
  }
  throw Error(ErrorKind::InvalidInput, "unknown system type '" + type + "' (expected torus or sft)");
}

nlohmann::json system_to_json(const System& system) {
  if (const auto* t = std::get_if<ToralSystem>(&system)) {
    std::vector<std::vector<double>> rows(t->dim(), std::vector<double>(t->dim()));
    for (int r = 0; r < t->dim(); ++r)
      for (int c = 0; c < t->dim(); ++c) rows[r][c] = t->matrix(r, c);
    return {{"type", "torus"}, {"matrix", rows}, {"bracket_radius", t->bracket_radius}};
  }
  const auto& s = std::get<ShiftSystem>(system);
  return {{"type", "sft"}, {"alphabet", s.alphabet}, {"transitions", s.transitions}, {"kappa", s.kappa}};
}

nlohmann::json point_to_json(const Point& p) {
  if (const auto* t = std::get_if<TorusPoint>(&p)) return std::vector<double>(t->coords.begin(), t->coords.end());
  const auto& s = std::get<SymbolicPoint>(p);
  return {{"left_cycle", s.left_cycle}, {"core", s.core}, {"right_cycle", s.right_cycle}, {"origin", s.origin}};
}

}  // namespace hypdyn
