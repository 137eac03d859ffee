#pragma once

#include <functional>
#include <numbers>

#include "roughflow/grid.hpp"

namespace rftest {

using namespace roughflow;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Field sampled from fn(t, x, component) at the slice times of `sampling`.
inline TimeIndexedField make_field(const Torus& torus, const TimeGrid& grid, TimeSampling sampling,
                                   int comps, const std::function<double(double, const Point&, int)>& fn,
                                   double q = 2.0, double alpha = 0.5) {
  auto F = TimeIndexedField::zeros(torus, grid, sampling, comps, q, alpha);
  for (std::size_t k = 0; k < F.size(); ++k) {
    const double t = F.slice_time(k);
    for (std::size_t p = 0; p < torus.size(); ++p) {
      const Point x = torus.coordinate(p);
      for (int c = 0; c < comps; ++c) F.slice(k).at(p, c) = fn(t, x, c);
    }
  }
  return F;
}

inline TimeIndexedField constant_field(const Torus& torus, const TimeGrid& grid, int comps, double value) {
  return make_field(torus, grid, TimeSampling::nodes, comps, [value](double, const Point&, int) { return value; });
}

inline double max_abs_diff(const GridField& a, const GridField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

}  // namespace rftest
