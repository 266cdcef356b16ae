#pragma once

// Spectral machinery for hyperbolic integer matrices: the contracting and
// expanding root-space split, greedy lattice digit expansions of points of
// the contracting subspace, affine fixed points and the Mather/Brin
// comparators.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace hypdyn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using IntVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using IntMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Eigenvalues within this distance of the unit circle make a matrix
/// non-hyperbolic.
inline constexpr double kUnitCircleTolerance = 1e-9;

/// Decomposition R^d = E+ (+) E- into the sum of root spaces with |lambda| < 1
/// (E+, contracting) and |lambda| > 1 (E-, expanding).
///
/// Both bases have orthonormal columns. The restricted matrices give the
/// action of the map in those bases, which lets powers be applied to each
/// component separately without the cancellation that plagues M^k for large
/// k.
struct SpectralSplit {
  Mat matrix;
  Mat e_plus_basis;
  Mat e_minus_basis;
  Mat p_plus;
  Mat p_minus;

  Mat restricted_plus;
  Mat restricted_minus;
  Mat restricted_plus_inverse;
  Mat restricted_minus_inverse;
  /// Rows mapping a vector to its coordinates in e_plus_basis / e_minus_basis.
  Mat coords_plus;
  Mat coords_minus;

  std::vector<std::complex<double>> eigenvalues;

  int dim() const { return static_cast<int>(matrix.rows()); }
  int stable_dim() const { return static_cast<int>(e_plus_basis.cols()); }
  int unstable_dim() const { return static_cast<int>(e_minus_basis.cols()); }

  /// Extreme moduli of the contracting eigenvalues (lambda_1 <= lambda_2 < 1).
  double stable_min_modulus() const;
  double stable_max_modulus() const;
  /// Extreme moduli of the expanding eigenvalues (1 < mu_2 <= mu_1).
  double unstable_min_modulus() const;
  double unstable_max_modulus() const;

  /// M^k v, evaluated componentwise in E+ and E-.
  Vec apply_power(const Vec& v, int k) const;
};

/// Throws Error(NotHyperbolic) if some eigenvalue lies within
/// kUnitCircleTolerance of the unit circle.
SpectralSplit spectral_split(const Mat& matrix);

/// Integer matrix inverse for |det| = 1; throws InvalidInput otherwise.
IntMat integer_inverse(const IntMat& m);
Mat to_real(const IntMat& m);

/// Greedy expansion v = lim P+(phi^n g_n + ... + phi g_1 + g_0).
struct DigitExpansion {
  IntVec g0;
  std::vector<IntVec> digits;  // g_1, g_2, ...
  Vec target;
};

/// Chooses h_n with phi^{-n}(v - h_n) in the open unit sup-norm cube; the
/// digits are g_n = phi^{-n}(h_n - h_{n-1}). Ties on cube faces go to the
/// lexicographically smallest lattice point. Throws DigitOutOfRange when a
/// digit leaves the sup-norm ball of radius s_rad.
DigitExpansion digit_expand(const SpectralSplit& split, const Vec& v, int s_rad, int n);

/// P+(phi^n g_n + ... + phi g_1 + g_0).
Vec reconstruct(const SpectralSplit& split, const DigitExpansion& expansion, int n);

/// Lattice points q_n = phi^{-n}(h_n): the level-n vertices of the levelled
/// graph path associated with an expansion. q_0 = g_0, q_n = phi^{-1} q_{n-1} + g_n.
std::vector<IntVec> lattice_path(const IntMat& phi, const DigitExpansion& expansion);

/// Solves w - phi(w) = v0. Throws NotHyperbolic if I - phi is singular or
/// phi has unit-modulus spectrum.
Vec affine_fixed_point(const Mat& phi, const Vec& v0);

struct MatherBounds {
  double lambda1;
  double lambda2;
  double mu2;
  double mu1;
};

struct MatherCheck {
  bool brin1;
  bool brin2;
  double pinched_sum;
  bool pinched;
};

/// Requires 0 < lambda1 <= lambda2 < 1 < mu2 <= mu1.
MatherCheck mather_check(const MatherBounds& bounds);

}  // namespace hypdyn
