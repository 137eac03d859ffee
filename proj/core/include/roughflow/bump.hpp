#pragma once

#include <cmath>

#include "roughflow/geometry.hpp"

namespace roughflow {

/// C^inf bump exp(1 - 1 / (1 - |x - c|^2 / r^2)) on |x - c| < r, zero
/// outside; peak value 1 at the center.
struct Bump {
  Point center{};
  double radius = 1.0;
  int dim = 1;

  /// Displacement x - c; overridable for periodic use via `value_at`.
  double value(const Point& x) const noexcept { return value_at(offset(x)); }
  Point gradient(const Point& x) const noexcept { return gradient_at(offset(x)); }
  double laplacian(const Point& x) const noexcept { return laplacian_at(offset(x)); }

  Point offset(const Point& x) const noexcept {
    Point y{};
    for (int i = 0; i < dim; ++i) y[i] = x[i] - center[i];
    return y;
  }

  double value_at(const Point& y) const noexcept {
    const double u = ratio(y);
    if (u >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u));
  }

  Point gradient_at(const Point& y) const noexcept {
    Point g{};
    const double u = ratio(y);
    if (u >= 1.0) return g;
    const double psi = std::exp(1.0 - 1.0 / (1.0 - u));
    const double gp = -1.0 / ((1.0 - u) * (1.0 - u));
    for (int i = 0; i < dim; ++i) g[i] = psi * gp * 2.0 * y[i] / (radius * radius);
    return g;
  }

  double laplacian_at(const Point& y) const noexcept {
    const double u = ratio(y);
    if (u >= 1.0) return 0.0;
    const double psi = std::exp(1.0 - 1.0 / (1.0 - u));
    const double w = 1.0 - u;
    const double gp = -1.0 / (w * w);
    const double gpp = -2.0 / (w * w * w);
    const double r2 = radius * radius;
    return psi * ((gp * gp + gpp) * 4.0 * u / r2 + gp * 2.0 * dim / r2);
  }

 private:
  double ratio(const Point& y) const noexcept {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += y[i] * y[i];
    return s / (radius * radius);
  }
};

}  // namespace roughflow
