#pragma once

// Fixed-size 2x2 linear algebra with closed-form inverses and eigen-decompositions.

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace vortexlab {

struct Vec2 {
  double x1 = 0.0;
  double x2 = 0.0;

  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

struct Mat2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

  constexpr double trace() const { return a11 + a22; }
  constexpr double det() const { return a11 * a22 - a12 * a21; }
  constexpr Mat2 transpose() const { return {a11, a21, a12, a22}; }

  /// Adjugate over determinant; caller guarantees det() != 0.
  constexpr Mat2 inverse() const {
    const double d = det();
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }

  constexpr Vec2 operator*(const Vec2& v) const {
    return {a11 * v.x1 + a12 * v.x2, a21 * v.x1 + a22 * v.x2};
  }

  constexpr Mat2 operator*(const Mat2& b) const {
    return {a11 * b.a11 + a12 * b.a21, a11 * b.a12 + a12 * b.a22,
            a21 * b.a11 + a22 * b.a21, a21 * b.a12 + a22 * b.a22};
  }

  constexpr Mat2 operator-(const Mat2& b) const {
    return {a11 - b.a11, a12 - b.a12, a21 - b.a21, a22 - b.a22};
  }

  constexpr Mat2 operator+(const Mat2& b) const {
    return {a11 + b.a11, a12 + b.a12, a21 + b.a21, a22 + b.a22};
  }

  friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

/// Largest absolute entry.
inline double max_abs(const Mat2& m) {
  return std::max({std::abs(m.a11), std::abs(m.a12), std::abs(m.a21), std::abs(m.a22)});
}

/// Real eigenvalues (larger first) from the characteristic polynomial
/// x^2 - tr x + det. Requires a nonnegative discriminant.
inline std::pair<double, double> real_eigenvalues(const Mat2& m) {
  const double half_tr = 0.5 * m.trace();
  // (a11 - a22)^2/4 + a12 a21 equals half_tr^2 - det without the cancellation.
  const double half_gap = 0.5 * (m.a11 - m.a22);
  const double disc = half_gap * half_gap + m.a12 * m.a21;
  const double root = std::sqrt(disc > 0.0 ? disc : 0.0);
  return {half_tr + root, half_tr - root};
}

struct SymmetricEigen {
  double lambda1 = 0.0;  ///< larger eigenvalue
  double lambda2 = 0.0;  ///< smaller eigenvalue
  Mat2 vectors;          ///< orthogonal; column k is the eigenvector of lambda_k
};

/// Closed-form eigen-decomposition of a symmetric matrix (a12 is used, a21 ignored).
inline SymmetricEigen symmetric_eigen(const Mat2& m) {
  const auto [l1, l2] = real_eigenvalues({m.a11, m.a12, m.a12, m.a22});
  if (m.a12 == 0.0) {
    if (m.a11 >= m.a22) return {l1, l2, Mat2::identity()};
    return {l1, l2, {0.0, 1.0, 1.0, 0.0}};
  }
  // Rotation angle that annihilates the off-diagonal entry.
  const double theta = 0.5 * std::atan2(2.0 * m.a12, m.a11 - m.a22);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {l1, l2, {c, -s, s, c}};
}

}  // namespace vortexlab
