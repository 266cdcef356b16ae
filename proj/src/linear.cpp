#include "hypdyn/linear.hpp"

#include "hypdyn/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hypdyn {

namespace {

// Deterministic, generic starting block for subspace iteration.
Mat starting_block(int rows, int cols) {
  Mat q(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) q(i, j) = std::sin(1.0 + 7.3 * i + 13.1 * j) + (i == j ? 2.0 : 0.0);
  return q;
}

Mat orthonormalize(const Mat& block) {
  Eigen::HouseholderQR<Mat> qr(block);
  return qr.householderQ() * Mat::Identity(block.rows(), block.cols());
}

// Orthonormal basis of the invariant subspace of the `cols` eigenvalues of
// largest modulus. The gap across the unit circle guarantees convergence.
Mat dominant_subspace(const Mat& m, int cols) {
  if (cols == 0) return Mat(m.rows(), 0);
  Mat q = orthonormalize(starting_block(static_cast<int>(m.rows()), cols));
  constexpr int kMaxIterations = 200000;
  for (int it = 0; it < kMaxIterations; ++it) {
    Mat next = orthonormalize(m * q);
    const double change = (next * next.transpose() - q * q.transpose()).norm();
    q = std::move(next);
    if (change < 1e-15) break;
  }
  return q;
}

// First non-negligible entry of each column made positive.
void canonical_signs(Mat& basis) {
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    for (Eigen::Index i = 0; i < basis.rows(); ++i) {
      if (std::abs(basis(i, j)) > 1e-12) {
        if (basis(i, j) < 0) basis.col(j) *= -1.0;
        break;
      }
    }
  }
}

std::string format_matrix(const Mat& m) {
  std::ostringstream os;
  os << "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << (i ? "; " : "");
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
  }
  os << "]";
  return os.str();
}

void require_hyperbolic(const Mat& m, std::vector<std::complex<double>>* out = nullptr) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(ErrorKind::InvalidInput, "matrix must be square and non-empty");
  Eigen::EigenSolver<Mat> solver(m, false);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::NotHyperbolic, "eigenvalue computation failed");
  std::vector<std::complex<double>> values(solver.eigenvalues().begin(), solver.eigenvalues().end());
  for (const auto& v : values) {
    if (std::abs(std::abs(v) - 1.0) <= kUnitCircleTolerance)
      throw Error(ErrorKind::NotHyperbolic,
                  "eigenvalue of modulus " + std::to_string(std::abs(v)) + " in " + format_matrix(m));
  }
  if (out) *out = std::move(values);
}

double round_half_down(double x) { return std::ceil(x - 0.5); }

std::int64_t checked(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw Error(ErrorKind::Oversize, "lattice coordinate overflows 64 bits");
  return static_cast<std::int64_t>(v);
}

IntVec multiply(const IntMat& m, const IntVec& v) {
  IntVec out(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    __int128 acc = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) acc += static_cast<__int128>(m(i, j)) * v(j);
    out(i) = checked(acc);
  }
  return out;
}

}  // namespace

double SpectralSplit::stable_min_modulus() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& v : eigenvalues)
    if (std::abs(v) < 1.0) r = std::min(r, std::abs(v));
  return r;
}

double SpectralSplit::stable_max_modulus() const {
  double r = 0.0;
  for (const auto& v : eigenvalues)
    if (std::abs(v) < 1.0) r = std::max(r, std::abs(v));
  return r;
}

double SpectralSplit::unstable_min_modulus() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& v : eigenvalues)
    if (std::abs(v) > 1.0) r = std::min(r, std::abs(v));
  return r;
}

double SpectralSplit::unstable_max_modulus() const {
  double r = 0.0;
  for (const auto& v : eigenvalues)
    if (std::abs(v) > 1.0) r = std::max(r, std::abs(v));
  return r;
}

Vec SpectralSplit::apply_power(const Vec& v, int k) const {
  Vec plus = coords_plus * v;
  Vec minus = coords_minus * v;
  const Mat& a_plus = k >= 0 ? restricted_plus : restricted_plus_inverse;
  const Mat& a_minus = k >= 0 ? restricted_minus : restricted_minus_inverse;
  for (int i = 0; i < std::abs(k); ++i) {
    plus = a_plus * plus;
    minus = a_minus * minus;
  }
  return e_plus_basis * plus + e_minus_basis * minus;
}

SpectralSplit spectral_split(const Mat& matrix) {
  SpectralSplit s;
  require_hyperbolic(matrix, &s.eigenvalues);
  s.matrix = matrix;
  const int d = static_cast<int>(matrix.rows());
  const int k = static_cast<int>(
      std::count_if(s.eigenvalues.begin(), s.eigenvalues.end(), [](auto v) { return std::abs(v) < 1.0; }));

  const Mat inverse = matrix.inverse();
  s.e_plus_basis = dominant_subspace(inverse, k);
  s.e_minus_basis = dominant_subspace(matrix, d - k);
  canonical_signs(s.e_plus_basis);
  canonical_signs(s.e_minus_basis);

  s.restricted_plus = s.e_plus_basis.transpose() * matrix * s.e_plus_basis;
  s.restricted_minus = s.e_minus_basis.transpose() * matrix * s.e_minus_basis;
  s.restricted_plus_inverse = s.restricted_plus.inverse();
  s.restricted_minus_inverse = s.restricted_minus.inverse();

  Mat full(d, d);
  full << s.e_plus_basis, s.e_minus_basis;
  const Mat coords = full.inverse();
  s.coords_plus = coords.topRows(k);
  s.coords_minus = coords.bottomRows(d - k);
  s.p_plus = s.e_plus_basis * s.coords_plus;
  s.p_minus = s.e_minus_basis * s.coords_minus;
  return s;
}

Mat to_real(const IntMat& m) { return m.cast<double>(); }

IntMat integer_inverse(const IntMat& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::InvalidInput, "matrix must be square");
  const Mat real = to_real(m);
  const double det = real.determinant();
  if (std::abs(std::abs(det) - 1.0) > 1e-6)
    throw Error(ErrorKind::InvalidInput, "|det| must be 1, got " + std::to_string(det));
  const Mat inv = real.inverse();
  IntMat out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = static_cast<std::int64_t>(std::llround(inv(i, j)));
  if (m * out != IntMat::Identity(m.rows(), m.cols()))
    throw Error(ErrorKind::InvalidInput, "integer inverse could not be recovered");
  return out;
}

DigitExpansion digit_expand(const SpectralSplit& split, const Vec& v, int s_rad, int n) {
  if (v.size() != split.dim()) throw Error(ErrorKind::InvalidInput, "target dimension mismatch");
  if (n < 0 || s_rad < 0) throw Error(ErrorKind::InvalidInput, "n and s_rad must be non-negative");
  if ((split.p_minus * v).norm() > 1e-8 * std::max(1.0, v.norm()))
    throw Error(ErrorKind::InvalidInput, "target is not in the contracting subspace");

  const Mat phi_inverse = split.matrix.inverse();
  DigitExpansion out;
  out.target = v;
  out.g0 = v.unaryExpr([](double x) { return round_half_down(x); }).cast<std::int64_t>();
  // Residual u_n - q_n where u_n = phi^{-n} v and q_n = phi^{-n} h_n.
  Vec residual = v - out.g0.cast<double>();
  out.digits.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const Vec w = phi_inverse * residual;
    IntVec g = w.unaryExpr([](double x) { return round_half_down(x); }).cast<std::int64_t>();
    if (g.cwiseAbs().maxCoeff() > s_rad)
      throw Error(ErrorKind::DigitOutOfRange,
                  "digit " + std::to_string(i) + " has sup norm " + std::to_string(g.cwiseAbs().maxCoeff()) +
                      " > s_rad " + std::to_string(s_rad));
    residual = w - g.cast<double>();
    out.digits.push_back(std::move(g));
  }
  return out;
}

Vec reconstruct(const SpectralSplit& split, const DigitExpansion& expansion, int n) {
  if (n < 0 || static_cast<std::size_t>(n) > expansion.digits.size())
    throw Error(ErrorKind::InvalidInput, "n exceeds the digit count");
  // Horner evaluation inside E+, where phi contracts.
  Vec acc = Vec::Zero(split.stable_dim());
  for (int i = n; i >= 1; --i)
    acc = split.restricted_plus * acc + split.coords_plus * expansion.digits[i - 1].cast<double>();
  acc = split.restricted_plus * acc;
  return split.e_plus_basis * acc + split.p_plus * expansion.g0.cast<double>();
}

std::vector<IntVec> lattice_path(const IntMat& phi, const DigitExpansion& expansion) {
  const IntMat phi_inverse = integer_inverse(phi);
  std::vector<IntVec> path;
  path.reserve(expansion.digits.size() + 1);
  path.push_back(expansion.g0);
  for (const auto& g : expansion.digits) {
    IntVec next = multiply(phi_inverse, path.back());
    for (Eigen::Index i = 0; i < next.size(); ++i) next(i) = checked(static_cast<__int128>(next(i)) + g(i));
    path.push_back(std::move(next));
  }
  return path;
}

Vec affine_fixed_point(const Mat& phi, const Vec& v0) {
  require_hyperbolic(phi);
  if (v0.size() != phi.rows()) throw Error(ErrorKind::InvalidInput, "v0 dimension mismatch");
  const Mat system = Mat::Identity(phi.rows(), phi.cols()) - phi;
  Eigen::FullPivLU<Mat> lu(system);
  if (!lu.isInvertible()) throw Error(ErrorKind::NotHyperbolic, "I - phi is singular");
  Vec w = lu.solve(v0);
  // One step of iterative refinement.
  w += lu.solve(v0 - system * w);
  return w;
}

MatherCheck mather_check(const MatherBounds& b) {
  if (!(b.lambda1 > 0.0 && b.lambda1 <= b.lambda2 && b.lambda2 < 1.0 && 1.0 < b.mu2 && b.mu2 <= b.mu1))
    throw Error(ErrorKind::InvalidInput, "Mather bounds must satisfy 0 < lambda1 <= lambda2 < 1 < mu2 <= mu1");
  const double ll1 = std::log(b.lambda1), ll2 = std::log(b.lambda2);
  const double lm1 = std::log(b.mu1), lm2 = std::log(b.mu2);
  MatherCheck out;
  out.brin1 = 1.0 + lm2 / lm1 > ll1 / ll2;
  out.brin2 = 1.0 + ll2 / ll1 > lm1 / lm2;
  out.pinched_sum = ll2 / ll1 + lm2 / lm1;
  out.pinched = out.pinched_sum > 1.0;
  return out;
}

}  // namespace hypdyn
