#pragma once

#include <cstdint>
#include <vector>

#include "roughflow/grid.hpp"

namespace roughflow {

/// Counter-based seed for stream `index` of a base seed (splitmix64).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Pre-sampled Brownian increments on a fine time grid, one independent
/// stream per path keyed by (seed, path). Immutable after construction;
/// backward integration reads the same increments in reverse order.
class BrownianDriver {
 public:
  BrownianDriver(std::uint64_t seed, TimeGrid grid, int dimension, int paths);

  std::uint64_t seed() const noexcept { return seed_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  int dimension() const noexcept { return dim_; }
  int paths() const noexcept { return paths_; }

  /// Increment W_{t_{k+1}} - W_{t_k} of one component.
  double increment(int path, int step, int component) const noexcept {
    return dw_[(static_cast<std::size_t>(path) * grid_.steps() + step) * dim_ + component];
  }
  /// W_{t_to} - W_{t_from} for fine indices from <= to, summed in step order.
  Point increment_between(int path, int from, int to) const noexcept;

 private:
  std::uint64_t seed_;
  TimeGrid grid_;
  int dim_;
  int paths_;
  std::vector<double> dw_;
};

}  // namespace roughflow
