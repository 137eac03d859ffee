#pragma once

#include <vector>

#include "roughflow/grid.hpp"

namespace roughflow {

/// Trigonometric interpolant of a periodic grid field, evaluable at any
/// point of R^d (positions need not be reduced modulo L). Keeps only modes
/// whose magnitude exceeds `rel_threshold` times the largest coefficient,
/// and drops the Nyquist modes. Immutable after construction.
class FourierInterpolant {
 public:
  FourierInterpolant() = default;
  explicit FourierInterpolant(const GridField& f, double rel_threshold = 1e-13);

  int dimension() const noexcept { return dim_; }
  int components() const noexcept { return components_; }
  std::size_t mode_count() const noexcept { return modes_.size(); }

  /// Any output pointer may be null. `grad` receives components * d values
  /// (c * d + j), `hess` receives components * d * d values.
  void evaluate(const Point& x, double* value, double* grad = nullptr,
                double* hess = nullptr) const;

  double value(const Point& x, int component = 0) const;

 private:
  int dim_ = 1;
  int components_ = 0;
  double k0_ = 1.0;
  int max_mode_ = 0;
  std::vector<std::array<int, kMaxDim>> modes_;
  // Interleaved per mode: (re, im) for each component, with the real-field
  // weight and the 1/N^d normalization folded in.
  std::vector<double> coeffs_;
};

/// One interpolant per slice of a time-indexed field.
class SpaceTimeInterpolant {
 public:
  SpaceTimeInterpolant() = default;
  explicit SpaceTimeInterpolant(const TimeIndexedField& f, double rel_threshold = 1e-13);

  const FourierInterpolant& slice(std::size_t k) const noexcept { return slices_[k]; }
  /// Interpolant governing the step t_from -> t_to (see TimeIndexedField).
  const FourierInterpolant& for_step(double t_from, double t_to) const noexcept;
  std::size_t size() const noexcept { return slices_.size(); }
  bool empty() const noexcept { return slices_.empty(); }

 private:
  TimeGrid grid_{1.0, 1};
  TimeSampling sampling_ = TimeSampling::nodes;
  std::vector<FourierInterpolant> slices_;
};

}  // namespace roughflow
