#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace roughflow {

inline constexpr int kMaxDim = 2;

/// Point or vector in R^d, d <= 2. Unused trailing entries stay zero.
using Point = std::array<double, kMaxDim>;

/// Row-major d x d matrix stored in a 2 x 2 block; entry (i, j) at [i * 2 + j].
using Mat = std::array<double, kMaxDim * kMaxDim>;

inline constexpr std::size_t mat_index(int i, int j) noexcept {
  return static_cast<std::size_t>(i * kMaxDim + j);
}

inline Mat identity_mat(int dim) noexcept {
  Mat m{};
  for (int i = 0; i < dim; ++i) m[mat_index(i, i)] = 1.0;
  return m;
}

inline double norm(const Point& p, int dim) noexcept {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += p[i] * p[i];
  return std::sqrt(s);
}

/// Hilbert-Schmidt norm.
inline double frobenius(const Mat& m, int dim) noexcept {
  double s = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) s += m[mat_index(i, j)] * m[mat_index(i, j)];
  return std::sqrt(s);
}

inline Mat matmul(const Mat& a, const Mat& b, int dim) noexcept {
  Mat c{};
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double s = 0.0;
      for (int k = 0; k < dim; ++k) s += a[mat_index(i, k)] * b[mat_index(k, j)];
      c[mat_index(i, j)] = s;
    }
  return c;
}

inline Point matvec(const Mat& a, const Point& x, int dim) noexcept {
  Point y{};
  for (int i = 0; i < dim; ++i) {
    double s = 0.0;
    for (int j = 0; j < dim; ++j) s += a[mat_index(i, j)] * x[j];
    y[i] = s;
  }
  return y;
}

inline double det(const Mat& a, int dim) noexcept {
  if (dim == 1) return a[0];
  return a[mat_index(0, 0)] * a[mat_index(1, 1)] - a[mat_index(0, 1)] * a[mat_index(1, 0)];
}

/// Inverse of a nonsingular d x d matrix (d <= 2).
inline Mat inverse(const Mat& a, int dim) noexcept {
  Mat r{};
  if (dim == 1) {
    r[0] = 1.0 / a[0];
    return r;
  }
  const double dt = det(a, dim);
  r[mat_index(0, 0)] = a[mat_index(1, 1)] / dt;
  r[mat_index(0, 1)] = -a[mat_index(0, 1)] / dt;
  r[mat_index(1, 0)] = -a[mat_index(1, 0)] / dt;
  r[mat_index(1, 1)] = a[mat_index(0, 0)] / dt;
  return r;
}

}  // namespace roughflow
