#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "roughflow/geometry.hpp"

namespace roughflow {

/// Periodic box [0, L)^d sampled by N points per axis.
class Torus {
 public:
  Torus(int dimension, double length, int points);

  int dimension() const noexcept { return dim_; }
  double length() const noexcept { return length_; }
  int points() const noexcept { return n_; }
  double spacing() const noexcept { return length_ / n_; }
  /// Total number of grid points N^d.
  std::size_t size() const noexcept;
  /// Cell volume h^d.
  double cell_volume() const noexcept;

  /// Coordinates of flat index `idx` (x-major ordering in 2D).
  Point coordinate(std::size_t idx) const noexcept;
  /// Integer axis indices of a flat index.
  std::array<int, kMaxDim> axis_indices(std::size_t idx) const noexcept;
  std::size_t flat_index(int i, int j = 0) const noexcept;

  /// Coordinate reduced into [0, L).
  double wrap(double x) const noexcept;
  Point wrap(const Point& p) const noexcept;
  /// Shortest signed displacement a - b on the circle of length L.
  double displacement(double a, double b) const noexcept;
  /// Torus metric.
  double distance(const Point& a, const Point& b) const noexcept;

  bool operator==(const Torus& other) const noexcept = default;

 private:
  int dim_;
  double length_;
  int n_;
};

/// Uniform time grid t_k = k T / M on [0, T].
class TimeGrid {
 public:
  TimeGrid(double horizon, int steps);

  double horizon() const noexcept { return horizon_; }
  int steps() const noexcept { return steps_; }
  double dt() const noexcept { return horizon_ / steps_; }
  double node(int k) const noexcept { return horizon_ * k / steps_; }
  double midpoint(int k) const noexcept { return horizon_ * (k + 0.5) / steps_; }

  bool operator==(const TimeGrid& other) const noexcept = default;

 private:
  double horizon_;
  int steps_;
};

/// Scalar, vector (d) or matrix (d x d) valued function on the torus grid.
/// Values are point-major with the component index fastest.
class GridField {
 public:
  GridField(Torus torus, int components);
  GridField(Torus torus, int components, std::vector<double> values);

  const Torus& torus() const noexcept { return torus_; }
  int components() const noexcept { return components_; }
  std::size_t points() const noexcept { return torus_.size(); }

  double& at(std::size_t point, int component = 0) noexcept {
    return values_[point * components_ + component];
  }
  double at(std::size_t point, int component = 0) const noexcept {
    return values_[point * components_ + component];
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Copy of one component as a contiguous scalar array.
  std::vector<double> component(int c) const;
  void set_component(int c, std::span<const double> data);

  /// Largest Euclidean (Hilbert-Schmidt for matrices) norm over grid points.
  double sup_norm() const noexcept;
  bool all_finite() const noexcept;

  GridField& operator+=(const GridField& other);
  GridField& operator-=(const GridField& other);
  GridField& operator*=(double s) noexcept;

 private:
  Torus torus_;
  int components_;
  std::vector<double> values_;
};

GridField operator+(GridField a, const GridField& b);
GridField operator-(GridField a, const GridField& b);
GridField operator*(double s, GridField a);

/// How the slices of a time-indexed field map onto the time grid.
/// `nodes`: M + 1 slices at t_k. `cells`: M slices, slice k represents the
/// open cell (t_k, t_{k+1}) and is sampled at its midpoint.
enum class TimeSampling { nodes, cells };

class TimeIndexedField {
 public:
  TimeIndexedField(TimeGrid grid, TimeSampling sampling, std::vector<GridField> slices,
                   double q = 2.0, double alpha = 0.5);

  /// All-zero field with the given layout.
  static TimeIndexedField zeros(const Torus& torus, TimeGrid grid, TimeSampling sampling,
                                int components, double q = 2.0, double alpha = 0.5);

  const TimeGrid& grid() const noexcept { return grid_; }
  TimeSampling sampling() const noexcept { return sampling_; }
  const Torus& torus() const noexcept { return slices_.front().torus(); }
  int components() const noexcept { return slices_.front().components(); }
  double q() const noexcept { return q_; }
  double alpha() const noexcept { return alpha_; }

  std::size_t size() const noexcept { return slices_.size(); }
  const GridField& slice(std::size_t k) const noexcept { return slices_[k]; }
  GridField& slice(std::size_t k) noexcept { return slices_[k]; }
  const std::vector<GridField>& slices() const noexcept { return slices_; }

  /// Time represented by slice k (node or cell midpoint).
  double slice_time(std::size_t k) const noexcept;

  /// Slice governing a step from `t_from` to `t_to` (either direction).
  /// Node-sampled fields use the node at the step's starting time (rounded
  /// towards the direction of travel's origin); cell-sampled fields use the
  /// cell containing the step midpoint.
  std::size_t slice_for_step(double t_from, double t_to) const noexcept;

  /// Value on grid cell k, i.e. the cell average used by quadratures: the
  /// cell slice itself, or the mean of the bounding nodes.
  GridField cell_value(int k) const;
  /// Value at node k: the node slice, or the cell slice adjacent to it
  /// (cell k, or cell M-1 at the terminal node).
  const GridField& node_value(int k) const noexcept;

  /// Time reversal t -> T - t.
  TimeIndexedField reversed() const;

  void set_exponents(double q, double alpha);

 private:
  TimeGrid grid_;
  TimeSampling sampling_;
  std::vector<GridField> slices_;
  double q_;
  double alpha_;
};

}  // namespace roughflow
