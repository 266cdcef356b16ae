#pragma once

#include "hypdyn/linear.hpp"
#include "hypdyn/models.hpp"

#include <cmath>

namespace testing_support {

inline hypdyn::IntMat cat_matrix() {
  hypdyn::IntMat a(2, 2);
  a << 2, 1, 1, 1;
  return a;
}

inline hypdyn::IntMat block_matrix() {
  hypdyn::IntMat a = hypdyn::IntMat::Zero(4, 4);
  a.block(0, 0, 2, 2) << 2, 1, 1, 1;
  a.block(2, 2, 2, 2) << 3, 1, 2, 1;
  return a;
}

/// Companion matrix of x^3 - x^2 - x - 1.
inline hypdyn::IntMat tribonacci_matrix() {
  hypdyn::IntMat a(3, 3);
  a << 0, 0, 1, 1, 0, 1, 0, 1, 1;
  return a;
}

inline const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;
inline const double kCatExpansion = (3.0 + std::sqrt(5.0)) / 2.0;
inline const double kCatEntropy = std::log(kCatExpansion);

/// Closed-form cat-map eigendirections: (1, lambda - 2) for each eigenvalue.
inline hypdyn::Vec cat_stable_direction() {
  hypdyn::Vec v(2);
  v << 1.0, -kGolden;
  return v.normalized();
}

inline hypdyn::Vec cat_unstable_direction() {
  hypdyn::Vec v(2);
  v << 1.0, kGolden - 1.0;
  return v.normalized();
}

inline hypdyn::ToralSystem cat_system() { return hypdyn::ToralSystem::from_integer_matrix(cat_matrix()); }

inline double cross2(const hypdyn::Vec& a, const hypdyn::Vec& b) { return a(0) * b(1) - a(1) * b(0); }

}  // namespace testing_support
