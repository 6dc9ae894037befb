#pragma once

// Dense complex linear algebra for small N (N <= ~16).
//
// Conventions used throughout the library:
//   binner(x, y)  = sum_i conj(x_i) y_i     (conjugate-linear in x)
//   eig(A)        eigenvalues sorted by (Re, Im) ascending; right vectors
//                 unit norm with the first largest-magnitude entry made
//                 real-positive; left vectors are eigenvectors of A^H,
//                 conjugate-paired and exactly biorthogonal to the rights.
//   solve(A, b)   refuses near-singular systems (sigma_min < 1e-10 sigma_max)
//                 instead of silently inverting; in the Fourier recursion this
//                 signals proximity to a Floquet exceptional point.
//   solve_singular(A, d, wL, wR)
//                 solves A x = d when A has a one-dimensional kernel spanned
//                 by wR (adjoint kernel wL); requires <wL, d> ~ 0 and returns
//                 the solution whose wR-component vanishes.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "floqep/errors.hpp"

namespace floqep {

using Cx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline constexpr double kSingularRatio = 1e-10;  // sigma_min / sigma_max cutoff

inline bool is_finite(const Mat& a) { return a.allFinite(); }
inline bool is_finite(const Vec& v) { return v.allFinite(); }

// Biorthogonal scalar product <x|y> = sum conj(x_i) y_i.
inline Cx binner(const Vec& x, const Vec& y) {
  if (x.size() != y.size())
    throw LengthMismatch("binner: length mismatch " + std::to_string(x.size()) +
                         " vs " + std::to_string(y.size()));
  return x.dot(y);
}

// Index of the first entry whose magnitude is within a relative tolerance of
// the maximum. The tolerance keeps the choice stable when two entries tie up
// to rounding.
inline Eigen::Index leading_entry(const Vec& v, double rel_tol = 1e-8) {
  const double m = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) >= m * (1.0 - rel_tol)) return i;
  return 0;
}

// Rescale so the first largest-magnitude entry is real-positive, keeping unit
// Euclidean norm.
inline void gauge_fix_unit(Vec& v) {
  v.normalize();
  const Eigen::Index j = leading_entry(v);
  const Cx p = v[j];
  if (std::abs(p) > 0.0) v *= std::conj(p) / std::abs(p);
}

// Rescale so the first largest-magnitude entry equals exactly 1. This is the
// gauge the builtin models' unnormalized eigenvector tables use; the Fourier
// recursion seeds with it so coefficient values are reproducible.
inline Vec gauge_leading_one(const Vec& v) {
  const Eigen::Index j = leading_entry(v);
  if (std::abs(v[j]) == 0.0) throw VanishingNorm("gauge_leading_one: zero vector");
  return v / v[j];
}

struct EigenDecomposition {
  Vec values;                    // sorted by (Re, Im) ascending
  std::vector<Vec> right_vectors;  // unit norm, gauge fixed
  std::vector<Vec> left_vectors;   // eigenvectors of A^H, paired with values
  double condition = 1.0;          // cond_2 of the right-eigenvector matrix

  Eigen::Index dim() const { return values.size(); }
  Mat right_matrix() const {
    Mat v(dim(), dim());
    for (Eigen::Index j = 0; j < dim(); ++j) v.col(j) = right_vectors[j];
    return v;
  }
};

// Dense general-complex eigendecomposition.
//
// Left vectors are taken as the columns of (V^{-1})^H so that
// binner(left_m, right_n) = delta_{mn} exactly up to rounding; they satisfy
// A^H l = conj(lambda) l for diagonalizable A. `condition` flags
// near-defectivity (large values mean the right-vector basis is ill
// conditioned).
inline EigenDecomposition eig(const Mat& a, double tol = 1e-10) {
  (void)tol;
  if (a.rows() != a.cols())
    throw NotSquare("eig: matrix is " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()));
  if (!is_finite(a)) throw NumericError("eig: non-finite entries");
  const Eigen::Index n = a.rows();

  Eigen::ComplexEigenSolver<Mat> es(a, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success) throw NonConvergence("eig: QR iteration failed");

  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const Vec& raw = es.eigenvalues();
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    if (raw[i].real() != raw[j].real()) return raw[i].real() < raw[j].real();
    return raw[i].imag() < raw[j].imag();
  });

  EigenDecomposition out;
  out.values.resize(n);
  out.right_vectors.resize(static_cast<size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = raw[order[static_cast<size_t>(k)]];
    Vec v = es.eigenvectors().col(order[static_cast<size_t>(k)]);
    gauge_fix_unit(v);
    out.right_vectors[static_cast<size_t>(k)] = v;
  }

  const Mat v = out.right_matrix();
  Eigen::JacobiSVD<Mat> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(n - 1);
  out.condition = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();

  // (V^{-1})^H columns; falls back to adjoint eigenvectors via pseudoinverse
  // when V is numerically singular (defective input).
  Mat vinv;
  if (smin > smax * kSingularRatio) {
    vinv = v.inverse();
  } else {
    vinv = svd.solve(Mat::Identity(n, n));
  }
  const Mat left = vinv.adjoint();
  out.left_vectors.resize(static_cast<size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) out.left_vectors[static_cast<size_t>(k)] = left.col(k);
  return out;
}

// Linear solve with an explicit near-singularity guard.
inline Vec solve(const Mat& a, const Vec& b) {
  if (a.rows() != a.cols()) throw NotSquare("solve: matrix not square");
  if (a.rows() != b.size()) throw LengthMismatch("solve: size mismatch");
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) < kSingularRatio * s(0))
    throw SingularMatrix("solve: sigma_min/sigma_max = " +
                         std::to_string(s(s.size() - 1) / s(0)));
  return svd.solve(b);
}

// Solve A x = d for A with a one-dimensional (numerical) kernel.
//
// The right-hand side must satisfy the solvability condition <wL, d> ~ 0;
// the returned solution has its wR-component removed, i.e.
// <wL, x> / <wL, wR> = 0.
inline Vec solve_singular(const Mat& a, const Vec& d, const Vec& null_left,
                          const Vec& null_right) {
  if (a.rows() != a.cols()) throw NotSquare("solve_singular: matrix not square");
  const Eigen::Index n = a.rows();
  if (d.size() != n || null_left.size() != n || null_right.size() != n)
    throw LengthMismatch("solve_singular: size mismatch");

  const double dn = d.norm();
  const Cx viol = binner(null_left, d);
  if (std::abs(viol) > 1e-8 * null_left.norm() * (dn + 1e-300) + 1e-14)
    throw NotSolvable("solve_singular: |<null_left, d>| = " +
                      std::to_string(std::abs(viol)));

  // Deflate: drop the smallest singular triplet, solve with the rest.
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Vec x = Vec::Zero(n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (s(k) <= 0.0) continue;
    x += (svd.matrixU().col(k).dot(d) / s(k)) * svd.matrixV().col(k);
  }
  // Remove the kernel component as measured by the adjoint null vector.
  const Cx denom = binner(null_left, null_right);
  if (std::abs(denom) < 1e-14 * null_left.norm() * null_right.norm())
    throw VanishingNorm("solve_singular: <null_left, null_right> vanishes");
  x -= (binner(null_left, x) / denom) * null_right;
  return x;
}

}  // namespace floqep
