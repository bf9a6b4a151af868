#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "msde/filter.hpp"
#include "msde/simulate.hpp"

using namespace msde;

namespace {

std::vector<double> run(Filter f, const std::vector<double>& x) {
  std::vector<double> z;
  for (double v : x) z.push_back(f.step(v));
  return z;
}

std::vector<double> random_path(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<double> x{0.0};
  for (std::size_t i = 1; i < n; ++i) x.push_back(x.back() + 0.1 * nd(gen));
  return x;
}

// Moving average recomputed from scratch at every step.
std::vector<double> brute_moving_average(const std::vector<double>& x, double delta, double dt) {
  const std::size_t S = static_cast<std::size_t>(std::floor(delta / dt + 1e-9));
  std::vector<double> z(x.size(), 0.0);
  for (std::size_t n = 1; n < x.size(); ++n) {
    double s = 0.0;
    if (n < S) {
      for (std::size_t i = 0; i <= n; ++i) s += x[i] * dt;
      z[n] = s / (static_cast<double>(n) * dt);
    } else {
      for (std::size_t i = n - S; i < n; ++i) s += x[i] * dt;
      z[n] = s / delta;
    }
  }
  return z;
}

}  // namespace

TEST_CASE("pass-through filter") {
  const std::vector<double> x = random_path(100, 1);
  CHECK(run(Filter(FilterKind::none, 1.0, 1e-2), x) == x);
}

TEST_CASE("moving average of a constant") {
  const double c = 3.5;
  SUBCASE("delta a multiple of dt") {
    Filter f(FilterKind::moving_average, 0.1, 1e-2);
    CHECK(f.window() == 10);
    double z = f.step(c);
    CHECK(z == 0.0);
    for (int n = 1; n < 50; ++n) z = f.step(c);
    CHECK(z == doctest::Approx(c).epsilon(1e-14));
  }
  SUBCASE("delta not a multiple of dt") {
    Filter f(FilterKind::moving_average, 0.105, 1e-2);
    CHECK(f.window() == 10);
    double z = 0.0;
    for (int n = 0; n < 50; ++n) z = f.step(c);
    CHECK(z == doctest::Approx(c * 10 * 1e-2 / 0.105).epsilon(1e-14));
  }
}

TEST_CASE("exponential filter fixed point") {
  const double c = 2.0, dt = 1e-2, delta = 0.5;
  Filter f(FilterKind::exponential, delta, dt);
  CHECK(f.step(c) == 0.0);
  CHECK(f.step(c) == doctest::Approx(c * dt / delta * std::exp(-dt / delta)));
  double z = 0.0;
  for (int n = 0; n < 5000; ++n) z = f.step(c);
  const double q = std::exp(-dt / delta);
  CHECK(z == doctest::Approx(c * (dt / delta) * q / (1.0 - q)).epsilon(1e-12));
  CHECK(std::abs(z - c) < 0.02 * c);
}

TEST_CASE("exponential recurrence by hand") {
  const double dt = 0.1, delta = 1.0, q = std::exp(-0.1);
  Filter f(FilterKind::exponential, delta, dt);
  const std::vector<double> x{1.0, -2.0, 0.5};
  CHECK(f.step(3.0) == 0.0);
  double z = 0.0;
  for (double v : x) {
    z = q * z + q * v * dt / delta;
    CHECK(f.step(v) == doctest::Approx(z).epsilon(1e-15));
  }
}

TEST_CASE("filters are linear") {
  const std::vector<double> x = random_path(3000, 2), y = random_path(3000, 3);
  const double a = 1.7, b = -0.4;
  std::vector<double> mix;
  for (std::size_t i = 0; i < x.size(); ++i) mix.push_back(a * x[i] + b * y[i]);
  for (FilterKind k : {FilterKind::none, FilterKind::exponential, FilterKind::moving_average}) {
    const std::vector<double> zx = run(Filter(k, 0.5, 1e-3), x);
    const std::vector<double> zy = run(Filter(k, 0.5, 1e-3), y);
    const std::vector<double> zm = run(Filter(k, 0.5, 1e-3), mix);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(zm[i] - (a * zx[i] + b * zy[i])));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("ring buffer matches a brute-force window sum") {
  for (double delta : {0.05, 0.1, 0.137, 0.5}) {
    const double dt = 1e-3;
    const std::vector<double> x = random_path(1000, 4);
    const std::vector<double> fast = run(Filter(FilterKind::moving_average, delta, dt), x);
    const std::vector<double> slow = brute_moving_average(x, delta, dt);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(fast[i] - slow[i]));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("ring buffer stays exact over many wraps") {
  const double dt = 1e-3, delta = 0.01;
  const std::vector<double> x = random_path(200000, 5);
  Filter f(FilterKind::moving_average, delta, dt);
  double z = 0.0;
  for (double v : x) z = f.step(v);
  double s = 0.0;
  for (std::size_t i = x.size() - 11; i < x.size() - 1; ++i) s += x[i] * dt;
  CHECK(std::abs(z - s / delta) < 1e-12);
}

TEST_CASE("filtered path has small quadratic variation") {
  const MultiscaleModel m{SlowPotential::quadratic(1.0), FastPotential::sine(), 0.1, 0.5};
  const TimeGrid g = TimeGrid::from_final_time(200.0, 1e-3);
  PathStream path = simulate_multiscale(m, g, 9);
  Filter f(FilterKind::exponential, 1.0, g.dt);
  double x = path.state(), z = f.step(x);
  double qx = 0.0, qz = 0.0;
  while (!path.done()) {
    const double xn = path.advance();
    const double zn = f.step(xn);
    qx += (xn - x) * (xn - x);
    qz += (zn - z) * (zn - z);
    x = xn;
    z = zn;
  }
  CHECK(qz < 0.01 * qx);
}

TEST_CASE("effective filter width") {
  CHECK(effective_delta({FilterKind::exponential, 1.0, 0.0}, 0.1) == 1.0);
  CHECK(effective_delta({FilterKind::exponential, 1.0, std::nullopt}, 0.1) == 1.0);
  CHECK(effective_delta({FilterKind::exponential, 1.0, 1.0}, 0.025) == doctest::Approx(0.025));
  CHECK(effective_delta({FilterKind::exponential, 1.0, 2.0}, 0.1) == doctest::Approx(0.01));
  CHECK(effective_delta({FilterKind::moving_average, 0.3, std::nullopt}, 0.1) == 0.3);
}

TEST_CASE("filter validation") {
  CHECK_THROWS_AS(Filter(FilterKind::exponential, 0.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(Filter(FilterKind::exponential, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Filter(FilterKind::moving_average, 5e-4, 1e-3), std::invalid_argument);
  CHECK(parse_filter_kind(to_string(FilterKind::moving_average)) == FilterKind::moving_average);
  CHECK_THROWS_AS(parse_filter_kind("gaussian"), std::invalid_argument);
}
