#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "roughflow/error.hpp"
#include "roughflow/holder.hpp"

using namespace roughflow;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

GridField sample(const Torus& t, auto fn) {
  GridField f(t, 1);
  for (std::size_t p = 0; p < t.size(); ++p) f.at(p) = fn(t.coordinate(p));
  return f;
}

// Reference: explicit double loop over coordinates.
double brute_force_seminorm(const GridField& f, double alpha) {
  const Torus& t = f.torus();
  double best = 0.0;
  for (std::size_t p = 0; p < t.size(); ++p)
    for (std::size_t q = 0; q < t.size(); ++q) {
      if (p == q) continue;
      const double dist = t.distance(t.coordinate(p), t.coordinate(q));
      best = std::max(best, std::abs(f.at(p) - f.at(q)) / std::pow(dist, alpha));
    }
  return best;
}

}  // namespace

TEST_CASE("holder seminorm of a constant is zero") {
  const Torus t(1, kTwoPi, 64);
  CHECK(estimate_holder_seminorm(sample(t, [](Point) { return 5.0; }), 0.5) == 0.0);
}

TEST_CASE("holder seminorm rejects bad exponents") {
  const Torus t(1, kTwoPi, 16);
  GridField f(t, 1);
  CHECK_THROWS_AS(estimate_holder_seminorm(f, 0.0), Error);
  CHECK_THROWS_AS(estimate_holder_seminorm(f, 1.0), Error);
  CHECK_THROWS_AS(estimate_zygmund_seminorm(f, 3, 0.5), Error);
}

TEST_CASE("cusp field attains ratio one") {
  const Torus t(1, kTwoPi, 256);
  const double c = t.length() / 2;
  auto f = sample(t, [c](Point x) { return std::pow(std::abs(x[0] - c), 0.5); });
  const double est = estimate_holder_seminorm(f, 0.5);
  CHECK(est == doctest::Approx(brute_force_seminorm(f, 0.5)).epsilon(1e-12));
  CHECK(est == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("tent field: ratio maximized at the farthest pair") {
  const Torus t(1, kTwoPi, 128);
  const double m = 0.7;
  const double L = t.length();
  auto f = sample(t, [&](Point x) { return m * std::min(x[0], L - x[0]); });
  for (double a : {0.2, 0.5, 0.8}) {
    const double est = estimate_holder_seminorm(f, a);
    CHECK(est == doctest::Approx(m * std::pow(L / 2, 1 - a)).epsilon(1e-12));
    CHECK(est == doctest::Approx(brute_force_seminorm(f, a)).epsilon(1e-12));
  }
}

TEST_CASE("2D vector field agrees with brute force") {
  const Torus t(2, kTwoPi, 8);
  GridField f(t, 2);
  for (std::size_t p = 0; p < t.size(); ++p) {
    const Point x = t.coordinate(p);
    f.at(p, 0) = std::sin(x[0]) * std::cos(2 * x[1]);
    f.at(p, 1) = std::cos(3 * x[0] + x[1]);
  }
  double brute = 0.0;
  for (std::size_t p = 0; p < t.size(); ++p)
    for (std::size_t q = 0; q < t.size(); ++q) {
      if (p == q) continue;
      const double d0 = f.at(p, 0) - f.at(q, 0), d1 = f.at(p, 1) - f.at(q, 1);
      brute = std::max(brute, std::hypot(d0, d1) / std::pow(t.distance(t.coordinate(p), t.coordinate(q)), 0.4));
    }
  CHECK(estimate_holder_seminorm(f, 0.4) == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("seminorm is invariant under translation and reflection") {
  const Torus t(1, kTwoPi, 64);
  auto f = sample(t, [](Point x) { return std::sin(x[0]) + 0.3 * std::pow(std::abs(std::sin(2 * x[0])), 0.6); });
  GridField shifted(t, 1), mirrored(t, 1);
  for (int i = 0; i < 64; ++i) {
    shifted.at(t.flat_index(i + 11)) = f.at(i);
    mirrored.at(t.flat_index(-i)) = f.at(i);
  }
  const double s = estimate_holder_seminorm(f, 0.6);
  CHECK(estimate_holder_seminorm(shifted, 0.6) == doctest::Approx(s).epsilon(1e-14));
  CHECK(estimate_holder_seminorm(mirrored, 0.6) == doctest::Approx(s).epsilon(1e-14));
}

TEST_CASE("lower exponents are controlled by the diameter") {
  const Torus t(2, kTwoPi, 16);
  GridField f(t, 1);
  for (std::size_t p = 0; p < t.size(); ++p) {
    const Point x = t.coordinate(p);
    f.at(p) = std::pow(std::abs(std::sin(x[0] - x[1])), 0.7) + std::cos(x[1]);
  }
  const double diam = std::sqrt(2.0) * t.length() / 2;
  for (auto [lo, hi] : {std::pair{0.2, 0.5}, std::pair{0.5, 0.9}, std::pair{0.1, 0.3}}) {
    CHECK(estimate_holder_seminorm(f, lo) <= estimate_holder_seminorm(f, hi) * std::pow(diam, hi - lo) + 1e-12);
  }
}

TEST_CASE("estimator converges under refinement for a Lipschitz field") {
  std::vector<double> est;
  for (int n : {64, 128, 256}) {
    const Torus t(1, kTwoPi, n);
    est.push_back(estimate_holder_seminorm(sample(t, [](Point x) { return std::sin(x[0]) + 0.5 * std::cos(2 * x[0]); }), 0.5));
  }
  CHECK(std::abs(est[2] - est[1]) <= std::abs(est[1] - est[0]) + 1e-12);
}

TEST_CASE("large grids use the sampled estimator deterministically") {
  const Torus t(2, kTwoPi, 128);
  GridField f(t, 1);
  for (std::size_t p = 0; p < t.size(); ++p) f.at(p) = std::sin(t.coordinate(p)[0]);
  const double a = estimate_holder_seminorm(f, 0.5);
  const double b = estimate_holder_seminorm(f, 0.5);
  CHECK(a == b);
  CHECK(a > 0.5);
  CHECK(a <= std::pow(t.length() / 2, 0.5) + 1e-12);
}

TEST_CASE("zygmund seminorm") {
  const Torus t(1, kTwoPi, 256);
  CHECK(estimate_zygmund_seminorm(sample(t, [](Point) { return 3.0; }), 1, 0.5) == 0.0);
  CHECK(estimate_zygmund_seminorm(sample(t, [](Point) { return 3.0; }), 2, 0.5) == 0.0);

  // Side 2 keeps every pair within the |h| <= 1 shift range.
  const Torus small(1, 2.0, 256);
  const double L = small.length();
  auto f = sample(small, [L](Point x) { return std::sin(kTwoPi * x[0] / L); });
  auto fp = sample(small, [L](Point x) { return kTwoPi / L * std::cos(kTwoPi * x[0] / L); });
  for (double a : {0.3, 0.5, 0.7}) {
    const double z = estimate_zygmund_seminorm(f, 1, a);
    const double h = estimate_holder_seminorm(fp, a);
    CHECK(std::abs(z - h) <= 0.1 * h);
  }

  const double k = 8 * std::numbers::pi / t.length();
  auto g = sample(t, [k](Point x) { return std::cos(k * x[0]); });
  for (int order : {1, 2}) {
    const double ratio = estimate_zygmund_seminorm(g, order, 0.5) / std::pow(k, order + 0.5);
    CHECK(ratio > 0.1);
    CHECK(ratio < 10.0);
  }
}

TEST_CASE("holder report parts") {
  const Torus t(1, kTwoPi, 128);
  auto f = sample(t, [](Point x) { return 2.0 * std::sin(x[0]); });
  const auto r = holder_report(f, 2, 0.5);
  CHECK(r.sup_norm == doctest::Approx(2.0).epsilon(1e-3));
  REQUIRE(r.derivative_sup.size() == 2);
  CHECK(r.derivative_sup[0] == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(r.derivative_sup[1] == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(r.seminorm >= 0.0);
  CHECK(r.zygmund >= 0.0);
  CHECK(r.norm() == doctest::Approx(r.sup_norm + r.derivative_sup[0] + r.derivative_sup[1] + r.derivative_seminorms[1]));
  CHECK(slice_norm(f, NormKind::C1, 0.5) == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("time norms") {
  const Torus t(1, kTwoPi, 8);
  const TimeGrid g(1.0, 64);
  auto zero = TimeIndexedField::zeros(t, g, TimeSampling::nodes, 1);
  CHECK(lq_time_norm(zero, NormKind::C0a) == 0.0);

  for (auto s : {TimeSampling::nodes, TimeSampling::cells}) {
    auto one = TimeIndexedField::zeros(t, g, s, 1);
    for (std::size_t k = 0; k < one.size(); ++k)
      for (auto& v : one.slice(k).values()) v = 1.0;
    CHECK(lq_time_norm(one, NormKind::C0a) == doctest::Approx(1.0).epsilon(1e-14));
  }

  // Singular profile t^{-0.9/q}: int_0^1 t^{-0.9} dt = 10.
  auto sing = TimeIndexedField::zeros(t, g, TimeSampling::cells, 1);
  for (std::size_t k = 0; k < sing.size(); ++k)
    for (auto& v : sing.slice(k).values()) v = std::pow(sing.slice_time(k), -0.45);
  const double n = lq_time_norm(sing, NormKind::C0a);
  CHECK(std::abs(n * n - 10.0) <= 0.01 * 10.0);

  auto bad = TimeIndexedField::zeros(t, g, TimeSampling::nodes, 1);
  bad.slice(3).at(0) = NAN;
  CHECK_THROWS_AS(lq_time_norm(bad, NormKind::C0), Error);
}

TEST_CASE("L2 in time is dominated by Lq") {
  const TimeGrid g(2.0, 40);
  std::vector<double> norms(41);
  for (int k = 0; k <= 40; ++k) norms[k] = 1.0 + std::sin(0.7 * k) * std::sin(0.7 * k) * k / 10.0;
  const double T = g.horizon();
  for (double q : {2.0, 3.0, 6.0}) {
    const double l2 = lq_time_norm(norms, g, TimeSampling::nodes, 2.0);
    const double lq = lq_time_norm(norms, g, TimeSampling::nodes, q);
    CHECK(l2 <= std::pow(T, 0.5 - 1.0 / q) * lq + 1e-12);
  }
}
