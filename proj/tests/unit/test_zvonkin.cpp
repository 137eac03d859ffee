#include <doctest.h>

#include <cmath>
#include <random>

#include "roughflow/drift.hpp"
#include "roughflow/error.hpp"
#include "roughflow/zvonkin.hpp"
#include "test_support.hpp"

using namespace roughflow;
using namespace rftest;

namespace {

ZvonkinMap map_from_profile(double amp) {
  const Torus torus(1, kTwoPi, 64);
  const TimeGrid grid(1.0, 4);
  auto v = make_field(torus, grid, TimeSampling::nodes, 1,
                      [amp](double, const Point& x, int) { return amp * std::sin(x[0]); });
  auto g = make_field(torus, grid, TimeSampling::nodes, 1,
                      [amp](double, const Point& x, int) { return amp * std::cos(x[0]); });
  PdeSolution s{std::move(v), std::move(g)};
  s.grad_sup = amp;
  s.linf_c1 = 2 * amp;
  return ZvonkinMap(Direction::forward, 1.0, 0.5, std::move(s), {});
}

double bisect(double y, double amp) {
  double lo = y - 1.0, hi = y + 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid + amp * std::sin(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TimeIndexedField weierstrass(int n, int m, double alpha, int J, std::uint64_t seed = 3) {
  DriftSpec spec;
  spec.alpha = alpha;
  spec.J = J;
  spec.seed = seed;
  return generate_drift(spec, Torus(1, kTwoPi, n), TimeGrid(1.0, m));
}

}  // namespace

TEST_CASE("zero drift gives the identity map") {
  const Torus torus(1, kTwoPi, 32);
  const auto b = constant_field(torus, TimeGrid(1.0, 16), 1, 0.0);
  for (Direction dir : {Direction::forward, Direction::backward}) {
    const ZvonkinMap m = build_map(b, dir, 0.5);
    CHECK(m.lambda() == doctest::Approx(1.0));
    CHECK(m.margin() == 0.0);
    const Point x{1.234, 0.0};
    CHECK(invert_map(m, 5, x)[0] == doctest::Approx(1.234).epsilon(1e-14));
    CHECK(m.apply(3, x)[0] == doctest::Approx(1.234).epsilon(1e-14));
  }
}

TEST_CASE("constant drift matches the scalar ODE") {
  const Torus torus(1, kTwoPi, 16);
  const TimeGrid grid(1.0, 32);
  const double c = 0.7, lam = 3.0;
  const auto b = constant_field(torus, grid, 1, c);
  const ZvonkinMap f = build_map_fixed(b, Direction::forward, lam, 0.5);
  const ZvonkinMap bw = build_map_fixed(b, Direction::backward, lam, 0.5);
  for (int k = 0; k <= grid.steps(); ++k) {
    const double t = grid.node(k);
    const double vf = c / lam * (1.0 - std::exp(-lam * (1.0 - t)));
    const double vb = -c / lam * (1.0 - std::exp(-lam * t));
    CHECK(f.pde().v.slice(k).at(3) == doctest::Approx(vf).epsilon(1e-10));
    CHECK(bw.pde().v.slice(k).at(7) == doctest::Approx(vb).epsilon(1e-10));
  }
  const auto tc = transform_coefficients(f);
  CHECK(tc.drift.slice(0).at(0) == doctest::Approx(lam * c / lam * (1.0 - std::exp(-lam))).epsilon(1e-10));
  CHECK(tc.sigma_deviation < 1e-12);
  const auto tb = transform_coefficients(bw);
  CHECK(tb.drift.slice(grid.steps()).at(0) == doctest::Approx(c * (1.0 - std::exp(-lam))).epsilon(1e-10));
}

TEST_CASE("Newton inversion agrees with bisection") {
  const ZvonkinMap m = map_from_profile(0.1);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double y = u(rng);
    CHECK(std::abs(invert_map(m, 2, Point{y, 0.0})[0] - bisect(y, 0.1)) < 1e-10);
  }
  CHECK(std::abs(invert_map(m, 0, Point{1.0, 0.0})[0] - bisect(1.0, 0.1)) < 1e-12);
}

TEST_CASE("Newton divergence is reported") {
  // g(x) = x + 5 sin x is not monotone; Newton from y wanders between branches
  // for some targets and must stop with NewtonDivergence, never loop.
  const ZvonkinMap m = map_from_profile(5.0);
  int diverged = 0;
  for (int i = 0; i < 200; ++i) {
    try {
      const Point x = invert_map(m, 1, Point{0.05 * i, 0.0});
      CHECK(std::abs(x[0] + 5.0 * std::sin(x[0]) - 0.05 * i) < 1e-10);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::newton_divergence);
      ++diverged;
    }
  }
  CHECK(diverged > 0);
}

TEST_CASE("rough drift map is certified and invertible") {
  const auto b = weierstrass(128, 64, 0.5, 4);
  const double eta = 0.5;
  const ZvonkinPair maps = build_maps(b, eta);
  for (const ZvonkinMap* m : {&maps.forward, &maps.backward}) {
    CHECK(m->certified());
    CHECK(m->margin() <= eta);
    CHECK(diagonal_dominance(*m) >= 1.0 - eta);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const int k = static_cast<int>(rng() % 65);
      const Point x{u(rng), 0.0};
      worst = std::max(worst, std::abs(invert_map(*m, k, m->apply(k, x))[0] - x[0]));
    }
    CHECK(worst < 1e-9);
    const auto c = transform_coefficients(*m);
    CHECK(c.sigma_deviation <= eta);
  }
  const auto& curve = maps.forward.lambda_curve();
  REQUIRE(!curve.empty());
  CHECK(curve.back().second <= eta);
}

TEST_CASE("transformed drift evaluated at mapped points") {
  const auto b = weierstrass(64, 32, 0.5, 3);
  const ZvonkinMap m = build_map(b, Direction::forward, 0.5);
  const auto c = transform_coefficients(m);
  const Torus& t = m.torus();
  for (int k : {0, 10, 32}) {
    for (std::size_t p = 0; p < t.size(); p += 7) {
      const Point x = invert_map(m, k, t.coordinate(p));
      double v = 0.0, g = 0.0;
      m.evaluate(k, x, &v, &g, nullptr);
      CHECK(c.drift.slice(k).at(p) == doctest::Approx(m.lambda() * v).epsilon(1e-12));
      CHECK(c.diffusion.slice(k).at(p) == doctest::Approx(1.0 + g).epsilon(1e-12));
      CHECK(m.apply(k, x)[0] == doctest::Approx(t.coordinate(p)[0]).epsilon(1e-10));
    }
  }
  CHECK(std::isfinite(transformed_drift_regularity(c, 0.5)));
}

TEST_CASE("2D map certifies with eta = 1/4") {
  DriftSpec spec;
  spec.J = 2;
  const auto b = generate_drift(spec, Torus(2, kTwoPi, 32), TimeGrid(1.0, 16));
  const ZvonkinMap m = build_map(b, Direction::forward, 0.25);
  CHECK(m.margin() <= 0.25);
  CHECK(diagonal_dominance(m) >= 0.5);
  const Point y{1.0, 2.0};
  const Point x = invert_map(m, 4, y);
  const Point z = m.apply(4, x);
  CHECK(std::abs(z[0] - y[0]) + std::abs(z[1] - y[1]) < 1e-10);
  CHECK_THROWS_AS(build_map(b, Direction::forward, 0.3), Error);
}
