#include "roughflow/grid.hpp"

#include <algorithm>
#include <cmath>

#include "roughflow/error.hpp"

namespace roughflow {

Torus::Torus(int dimension, double length, int points)
    : dim_(dimension), length_(length), n_(points) {
  require(dimension == 1 || dimension == 2, "torus dimension must be 1 or 2");
  require(length > 0.0 && std::isfinite(length), "torus length must be positive");
  require(points >= 2 && (points & (points - 1)) == 0, "points per axis must be a power of two");
}

std::size_t Torus::size() const noexcept {
  return dim_ == 1 ? static_cast<std::size_t>(n_)
                   : static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
}

double Torus::cell_volume() const noexcept {
  const double h = spacing();
  return dim_ == 1 ? h : h * h;
}

Point Torus::coordinate(std::size_t idx) const noexcept {
  const auto ij = axis_indices(idx);
  const double h = spacing();
  return {ij[0] * h, ij[1] * h};
}

std::array<int, kMaxDim> Torus::axis_indices(std::size_t idx) const noexcept {
  if (dim_ == 1) return {static_cast<int>(idx), 0};
  return {static_cast<int>(idx / n_), static_cast<int>(idx % n_)};
}

std::size_t Torus::flat_index(int i, int j) const noexcept {
  auto m = [this](int a) { return static_cast<std::size_t>(((a % n_) + n_) % n_); };
  return dim_ == 1 ? m(i) : m(i) * n_ + m(j);
}

double Torus::wrap(double x) const noexcept {
  double r = std::fmod(x, length_);
  if (r < 0.0) r += length_;
  if (r >= length_) r = 0.0;
  return r;
}

Point Torus::wrap(const Point& p) const noexcept {
  Point q{};
  for (int i = 0; i < dim_; ++i) q[i] = wrap(p[i]);
  return q;
}

double Torus::displacement(double a, double b) const noexcept {
  double d = std::fmod(a - b, length_);
  if (d > 0.5 * length_) d -= length_;
  if (d < -0.5 * length_) d += length_;
  return d;
}

double Torus::distance(const Point& a, const Point& b) const noexcept {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double d = displacement(a[i], b[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

TimeGrid::TimeGrid(double horizon, int steps) : horizon_(horizon), steps_(steps) {
  require(horizon > 0.0 && std::isfinite(horizon), "time horizon must be positive");
  require(steps >= 1, "time grid needs at least one step");
}

GridField::GridField(Torus torus, int components)
    : torus_(torus), components_(components), values_(torus.size() * components, 0.0) {
  require(components >= 1, "field needs at least one component");
}

GridField::GridField(Torus torus, int components, std::vector<double> values)
    : torus_(torus), components_(components), values_(std::move(values)) {
  require(components >= 1, "field needs at least one component");
  require(values_.size() == torus_.size() * components, "field payload has wrong length");
}

std::vector<double> GridField::component(int c) const {
  std::vector<double> out(points());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = at(p, c);
  return out;
}

void GridField::set_component(int c, std::span<const double> data) {
  require(data.size() == points(), "component length mismatch");
  for (std::size_t p = 0; p < data.size(); ++p) at(p, c) = data[p];
}

double GridField::sup_norm() const noexcept {
  double best = 0.0;
  for (std::size_t p = 0; p < points(); ++p) {
    double s = 0.0;
    for (int c = 0; c < components_; ++c) s += at(p, c) * at(p, c);
    if (std::isnan(s)) return s;
    best = std::max(best, s);
  }
  return std::sqrt(best);
}

bool GridField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

GridField& GridField::operator+=(const GridField& other) {
  require(other.torus_ == torus_ && other.components_ == components_, "field layout mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& other) {
  require(other.torus_ == torus_ && other.components_ == components_, "field layout mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridField& GridField::operator*=(double s) noexcept {
  for (auto& v : values_) v *= s;
  return *this;
}

GridField operator+(GridField a, const GridField& b) { return a += b; }
GridField operator-(GridField a, const GridField& b) { return a -= b; }
GridField operator*(double s, GridField a) { return a *= s; }

TimeIndexedField::TimeIndexedField(TimeGrid grid, TimeSampling sampling,
                                   std::vector<GridField> slices, double q, double alpha)
    : grid_(grid), sampling_(sampling), slices_(std::move(slices)), q_(q), alpha_(alpha) {
  const std::size_t expected =
      sampling == TimeSampling::nodes ? static_cast<std::size_t>(grid.steps()) + 1
                                      : static_cast<std::size_t>(grid.steps());
  require(slices_.size() == expected, "slice count does not match time grid");
  for (const auto& s : slices_) {
    require(s.torus() == slices_.front().torus(), "slices must share one torus");
    require(s.components() == slices_.front().components(), "slices must share component count");
  }
  set_exponents(q, alpha);
}

TimeIndexedField TimeIndexedField::zeros(const Torus& torus, TimeGrid grid, TimeSampling sampling,
                                         int components, double q, double alpha) {
  const std::size_t n = sampling == TimeSampling::nodes ? grid.steps() + 1 : grid.steps();
  return TimeIndexedField(grid, sampling, std::vector<GridField>(n, GridField(torus, components)),
                          q, alpha);
}

void TimeIndexedField::set_exponents(double q, double alpha) {
  require(q >= 2.0, "time exponent q must be >= 2");
  require(alpha > 0.0 && alpha < 1.0, "Hoelder exponent must lie in (0,1)");
  q_ = q;
  alpha_ = alpha;
}

double TimeIndexedField::slice_time(std::size_t k) const noexcept {
  return sampling_ == TimeSampling::nodes ? grid_.node(static_cast<int>(k))
                                          : grid_.midpoint(static_cast<int>(k));
}

std::size_t TimeIndexedField::slice_for_step(double t_from, double t_to) const noexcept {
  const double dt = grid_.dt();
  const int m = grid_.steps();
  if (sampling_ == TimeSampling::cells) {
    const double mid = 0.5 * (t_from + t_to);
    const int k = static_cast<int>(std::floor(mid / dt));
    return static_cast<std::size_t>(std::clamp(k, 0, m - 1));
  }
  const double x = t_from / dt;
  const double eps = 1e-9;
  int k = t_to >= t_from ? static_cast<int>(std::floor(x + eps)) : static_cast<int>(std::ceil(x - eps));
  return static_cast<std::size_t>(std::clamp(k, 0, m));
}

GridField TimeIndexedField::cell_value(int k) const {
  if (sampling_ == TimeSampling::cells) return slices_[k];
  GridField out = slices_[k];
  out += slices_[k + 1];
  out *= 0.5;
  return out;
}

const GridField& TimeIndexedField::node_value(int k) const noexcept {
  if (sampling_ == TimeSampling::nodes) return slices_[k];
  return slices_[std::min(k, grid_.steps() - 1)];
}

TimeIndexedField TimeIndexedField::reversed() const {
  std::vector<GridField> r(slices_.rbegin(), slices_.rend());
  return TimeIndexedField(grid_, sampling_, std::move(r), q_, alpha_);
}

}  // namespace roughflow
