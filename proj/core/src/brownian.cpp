#include "roughflow/brownian.hpp"

#include <cmath>
#include <random>

#include "roughflow/error.hpp"
#include "roughflow/parallel.hpp"

namespace roughflow {

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

BrownianDriver::BrownianDriver(std::uint64_t seed, TimeGrid grid, int dimension, int paths)
    : seed_(seed), grid_(grid), dim_(dimension), paths_(paths) {
  require(dimension >= 1 && dimension <= kMaxDim, "driver dimension must be 1 or 2");
  require(paths >= 1, "driver needs at least one path");
  const std::size_t per_path = static_cast<std::size_t>(grid.steps()) * dimension;
  dw_.resize(per_path * paths);
  const double sd = std::sqrt(grid.dt());
  parallel_for(static_cast<std::size_t>(paths), [&](std::size_t p) {
    std::mt19937_64 rng(stream_seed(seed, p));
    std::normal_distribution<double> normal(0.0, sd);
    double* out = dw_.data() + p * per_path;
    for (std::size_t i = 0; i < per_path; ++i) out[i] = normal(rng);
  });
}

Point BrownianDriver::increment_between(int path, int from, int to) const noexcept {
  Point w{0.0, 0.0};
  for (int k = from; k < to; ++k)
    for (int c = 0; c < dim_; ++c) w[c] += increment(path, k, c);
  return w;
}

}  // namespace roughflow
