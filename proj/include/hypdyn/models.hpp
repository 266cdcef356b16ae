#pragma once

// Concrete Smale spaces: hyperbolic toral automorphisms and subshifts of
// finite type, behind one variant-based interface.

#include "hypdyn/linear.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

namespace hypdyn {

enum class Side { stable, unstable };

const char* to_string(Side side);
Side side_from_string(const std::string& name);

/// Point of R^d / Z^d, coordinates reduced to [0, 1).
struct TorusPoint {
  Vec coords;
};

/// Eventually periodic bi-infinite sequence:
///   ... left_cycle left_cycle core right_cycle right_cycle ...
/// with core[origin] at index 0. The origin may point outside the core.
struct SymbolicPoint {
  std::vector<int> left_cycle;
  std::vector<int> core;
  std::vector<int> right_cycle;
  long origin = 0;

  int at(long k) const;
  /// Indices [core_lo, core_hi) are covered by the core.
  long core_lo() const { return -origin; }
  long core_hi() const { return static_cast<long>(core.size()) - origin; }

  /// Constant sequence ...sss.sss...
  static SymbolicPoint constant(int symbol);
};

using Point = std::variant<TorusPoint, SymbolicPoint>;

/// Mutation hook used by the self-check to demonstrate that a wrongly
/// oriented bracket is detected.
enum class BracketOrientation { stable_plaque_fixed, flipped };

struct ToralSystem {
  Mat matrix;
  Mat inverse;
  SpectralSplit split;
  double bracket_radius = 0.25;
  bool integral = true;
  BracketOrientation orientation = BracketOrientation::stable_plaque_fixed;

  /// Validates |det| = 1, hyperbolicity and 0 < bracket_radius <= 0.25.
  static ToralSystem from_integer_matrix(const IntMat& m, double bracket_radius = 0.25);
  /// Linear hyperbolic map acting on small displacements only; no
  /// integrality requirement. Used for calibrating estimators against maps
  /// with prescribed eigenvalues.
  static ToralSystem linear_toy(const Mat& m, double bracket_radius = 0.25);

  int dim() const { return static_cast<int>(matrix.rows()); }
  /// Orthonormal basis of E+ (stable) or E- (unstable).
  const Mat& side_basis(Side side) const {
    return side == Side::stable ? split.e_plus_basis : split.e_minus_basis;
  }
};

struct ShiftSystem {
  int alphabet = 2;
  std::vector<std::vector<int>> transitions;  // transitions[a][b]: b may follow a
  double kappa = std::log(2.0);

  /// Validates shape, 0/1 entries, irreducibility and kappa > 0.
  static ShiftSystem make(int alphabet, std::vector<std::vector<int>> transitions, double kappa = std::log(2.0));
  static ShiftSystem full(int alphabet);
  static ShiftSystem golden_mean();

  bool allowed(int a, int b) const { return transitions[a][b] != 0; }
  /// Throws InvalidInput when a symbol or a transition (including cycle
  /// seams) is not allowed.
  void validate(const SymbolicPoint& p) const;
};

using System = std::variant<ToralSystem, ShiftSystem>;

bool is_torus(const System& s);
const ToralSystem& as_torus(const System& s);
const ShiftSystem& as_shift(const System& s);

/// Euclidean norm of the shortest lattice representative of v.
double torus_norm(const Vec& v);
/// y - x lifted to the translate of y nearest x.
Vec wrapped_difference(const Vec& x, const Vec& y);
Vec reduce_mod1(const Vec& v);

Point iterate(const System& system, const Point& p, int k);
double dist(const System& system, const Point& x, const Point& y);
/// [x, y]: the point on the unstable plaque of x and the stable plaque of y.
/// Empty outside the bracket domain.
std::optional<Point> bracket(const System& system, const Point& x, const Point& y);

/// Smallest r >= 0 with x_{c+r} != y_{c+r} or x_{c-r} != y_{c-r}; empty if x = y.
std::optional<long> first_disagreement(const SymbolicPoint& x, const SymbolicPoint& y, long center);
/// Sequence equal to x at k < cut and to y at k >= cut.
SymbolicPoint splice(const SymbolicPoint& x, const SymbolicPoint& y, long cut);
/// Copy of base with the symbols at [start, start + word.size()) replaced.
SymbolicPoint with_word(const SymbolicPoint& base, long start, const std::vector<int>& word);

/// d(f^k x, f^k y) as a function of k. For tori the orbit is driven by a
/// displacement vector, so leaf-internal pairs can be described exactly by
/// their leaf offset rather than by reduced coordinates. A torus orbit keeps
/// a pointer to its system, which must outlive it.
class PairOrbit {
 public:
  PairOrbit(const System& system, const Point& x, const Point& y);
  static PairOrbit from_displacement(const ToralSystem& system, const Vec& delta);

  bool identical() const { return identical_; }
  bool on_torus() const { return torus_ != nullptr; }
  /// Torus only: size of the displacement component along E+ (stable) or
  /// E- (unstable), in split coordinates.
  double component_norm(Side side) const { return side == Side::stable ? plus_.norm() : minus_.norm(); }
  /// Gaps for k = kmin, ..., kmax (inclusive), computed incrementally.
  std::vector<double> gaps(int kmin, int kmax) const;
  double gap(int k) const;

 private:
  PairOrbit() = default;

  const ToralSystem* torus_ = nullptr;
  Vec plus_;
  Vec minus_;
  double kappa_ = 0.0;
  SymbolicPoint x_;
  SymbolicPoint y_;
  bool identical_ = false;
};

struct SampleSpec {
  double window = 0.2;
  double spacing = 1e-4;
  int depth = 3;
  std::size_t max_points = 2'000'000;
};

/// Finite net on the stable or unstable leaf of a base point.
struct LeafSample {
  Side side = Side::stable;
  Point base;
  std::vector<Point> points;
  /// Arclength for one-dimensional torus samples, enumeration index otherwise.
  std::vector<double> params;
  /// Torus only: ambient displacement of each point from the base, inside
  /// the side subspace.
  std::vector<Vec> offsets;
  /// Torus only: integer grid coordinates of each point (second one is 0 for
  /// line samples) and the number of grid steps per axis.
  std::vector<std::array<long, 2>> grid;
  long grid_count = 0;
  int grid_rank = 0;

  std::size_t size() const { return points.size(); }
};

/// Torus: base + t v mod 1 on a line (1-D side) or a grid in a 2-D slice of
/// the side subspace. Shift: every admissible point agreeing with the base
/// outside positions [-depth, -1] (stable) or [1, depth] (unstable),
/// enumerated lexicographically.
LeafSample leaf_sample(const System& system, const Point& base, Side side, const SampleSpec& spec);

/// Displacement between two points of one torus leaf sample.
Vec sample_displacement(const LeafSample& sample, std::size_t i, std::size_t j);
PairOrbit sample_orbit(const System& system, const LeafSample& sample, std::size_t i, std::size_t j);

Point default_base_point(const System& system);

System system_from_json(const nlohmann::json& j);
nlohmann::json system_to_json(const System& system);
nlohmann::json point_to_json(const Point& p);

}  // namespace hypdyn
