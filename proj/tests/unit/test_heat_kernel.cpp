#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "roughflow/error.hpp"
#include "roughflow/heat_kernel.hpp"
#include "roughflow/holder.hpp"

using namespace roughflow;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double mass(const GridField& k) {
  double s = 0.0;
  for (double v : k.values()) s += v;
  return s * k.torus().cell_volume();
}

// Poisson-summed form (1/L) sum_m exp(-k_m^2 t) cos(k_m x).
double fourier_kernel_1d(double x, double t, double L) {
  double s = 1.0;
  for (int m = 1; m < 2000; ++m) {
    const double k = kTwoPi * m / L;
    const double term = std::exp(-k * k * t);
    if (term < 1e-18) break;
    s += 2.0 * term * std::cos(k * x);
  }
  return s / L;
}

}  // namespace

TEST_CASE("kernel peak dominates the free-space value") {
  const Torus t(1, kTwoPi, 256);
  const auto k = kernel_values({t, 0.1});
  CHECK(k.at(0) >= 1.0 / std::sqrt(4.0 * std::numbers::pi * 0.1));
  CHECK(k.at(0) == doctest::Approx(0.8921).epsilon(1e-4));
}

TEST_CASE("kernel rejects nonpositive times") {
  const Torus t(1, kTwoPi, 16);
  CHECK_THROWS_AS(kernel_values({t, 0.0}), Error);
  CHECK_THROWS_AS(kernel_values({t, -1.0}), Error);
  CHECK_THROWS_AS(kernel_values({t, 0.1, 2}), Error);
}

TEST_CASE("kernel has unit mass and is positive") {
  const Torus t1(1, kTwoPi, 1024);
  for (double t : {1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0}) {
    const auto k = kernel_values({t1, t});
    CHECK(std::abs(mass(k) - 1.0) < 1e-8);
    // Below t ~ 4e-3 the far-field value exp(-L^2 / 16 t) underflows double.
    const double lo = *std::min_element(k.values().begin(), k.values().end());
    if (t >= 1e-2) CHECK(lo > 0.0);
    else CHECK(lo >= 0.0);
  }
  const Torus t2(2, kTwoPi, 128);
  for (double t : {1e-2, 1.0, 100.0}) {
    const auto k = kernel_values({t2, t});
    CHECK(std::abs(mass(k) - 1.0) < 1e-8);
    CHECK(*std::min_element(k.values().begin(), k.values().end()) > 0.0);
  }
}

TEST_CASE("kernel matches its Fourier series") {
  const Torus t(1, 3.0, 64);
  for (double time : {0.01, 0.3, 2.0}) {
    const auto k = kernel_values({t, time});
    for (int i = 0; i < 64; ++i) {
      const double x = i < 32 ? i * t.spacing() : (i - 64) * t.spacing();
      CHECK(k.at(i) == doctest::Approx(fourier_kernel_1d(x, time, 3.0)).epsilon(1e-10));
    }
  }
}

TEST_CASE("long times equilibrate to the uniform density") {
  const Torus t(1, kTwoPi, 128);
  const auto k = kernel_values({t, 100.0});
  for (double v : k.values()) CHECK(std::abs(v - 1.0 / kTwoPi) < 1e-6);
  const Torus t2(2, kTwoPi, 32);
  const auto k2 = kernel_values({t2, 100.0});
  for (double v : k2.values()) CHECK(std::abs(v - 1.0 / (kTwoPi * kTwoPi)) < 1e-6);
}

TEST_CASE("image radius defaults") {
  const Torus t(1, kTwoPi, 64);
  CHECK(default_image_radius(t, 0.1) == 6);
  CHECK(image_tail_bound(t, 100.0, default_image_radius(t, 100.0)) < 1e-12);
  CHECK(default_image_radius(t, 100.0) > 6);
  CHECK(image_tail_bound(t, 1.0, 3) > image_tail_bound(t, 1.0, 4));
}

TEST_CASE("convolution fixes constants and damps modes exactly") {
  const Torus t(1, 5.0, 128);
  GridField c(t, 1);
  for (auto& v : c.values()) v = 2.5;
  const auto hc = heat_convolve(c, 0.7);
  for (double v : hc.values()) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));

  GridField s(t, 1);
  const double k = kTwoPi / t.length();
  for (std::size_t p = 0; p < t.size(); ++p) s.at(p) = std::sin(k * t.coordinate(p)[0]);
  for (double time : {0.0, 0.01, 0.5, 3.0}) {
    const auto hs = heat_convolve(s, time);
    for (std::size_t p = 0; p < t.size(); ++p)
      CHECK(std::abs(hs.at(p) - std::exp(-k * k * time) * s.at(p)) < 1e-10);
  }
  CHECK_THROWS_AS(heat_convolve(s, -1.0), Error);
}

TEST_CASE("spectral convolution equals direct circular convolution") {
  const Torus t(1, kTwoPi, 128);
  GridField f(t, 1);
  for (std::size_t p = 0; p < t.size(); ++p) {
    const double x = t.coordinate(p)[0];
    f.at(p) = std::exp(std::sin(x)) + 0.2 * std::cos(5 * x);
  }
  const double time = 0.05;
  const auto k = kernel_values({t, time});
  const auto h = heat_convolve(f, time);
  for (int i = 0; i < 128; ++i) {
    double s = 0.0;
    for (int j = 0; j < 128; ++j) s += k.at(t.flat_index(i - j)) * f.at(j);
    CHECK(std::abs(s * t.spacing() - h.at(i)) < 1e-10);
  }
}

TEST_CASE("semigroup, maximum principle and seminorm contraction") {
  const Torus t(2, kTwoPi, 32);
  GridField f(t, 1);
  for (std::size_t p = 0; p < t.size(); ++p) {
    const Point x = t.coordinate(p);
    f.at(p) = std::pow(std::abs(std::sin(x[0])), 0.5) - std::cos(3 * x[1]) * std::sin(x[0] + x[1]);
  }
  const auto ab = heat_convolve(heat_convolve(f, 0.1), 0.25);
  const auto direct = heat_convolve(f, 0.35);
  for (std::size_t p = 0; p < t.size(); ++p) CHECK(std::abs(ab.at(p) - direct.at(p)) < 1e-10);

  const auto [lo, hi] = std::minmax_element(f.values().begin(), f.values().end());
  for (double time : {1e-3, 0.1, 1.0}) {
    const auto g = heat_convolve(f, time);
    for (double v : g.values()) {
      CHECK(v >= *lo - 1e-10);
      CHECK(v <= *hi + 1e-10);
    }
    CHECK(estimate_holder_seminorm(g, 0.5) <= estimate_holder_seminorm(f, 0.5) + 1e-9);
  }
}

TEST_CASE("derivative scaling at alpha = 0.5") {
  ScalingOptions opt;
  opt.points = 1024;
  opt.realizations = 16;
  const auto reps = verify_derivative_scaling(0.5, {1, 2}, opt);
  REQUIRE(reps.size() == 2);
  for (const auto& r : reps) {
    CHECK(std::abs(r.fitted_slope - r.expected_slope()) < 0.05);
    CHECK(r.r_squared > 0.98);
    CHECK(r.implied_C > 0.0);
    CHECK(r.to_json().find("\"fitted_slope\"") != std::string::npos);
  }
}

TEST_CASE("smooth control shows no blow-up") {
  ScalingOptions opt;
  opt.points = 1024;
  opt.smooth_control = true;
  for (const auto& r : verify_derivative_scaling(0.5, {1, 2, 3}, opt)) CHECK(std::abs(r.fitted_slope) < 0.01);
}

TEST_CASE("poor fits are rejected") {
  ScalingOptions opt;
  opt.points = 256;
  opt.realizations = 2;
  opt.min_r_squared = 1.1;
  CHECK_THROWS_AS(verify_derivative_scaling(0.5, {1}, opt), Error);
  CHECK_THROWS_AS(verify_derivative_scaling(0.5, {4}, opt), Error);
}
