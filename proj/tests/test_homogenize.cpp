#include <doctest.h>

#include <cmath>
#include <numbers>

#include "msde/bessel.hpp"
#include "msde/homogenize.hpp"

using namespace msde;

namespace {

MultiscaleModel sine_model(double sigma = 0.5) {
  return {SlowPotential::quadratic(1.0), FastPotential::sine(), 0.1, sigma};
}

MultiscaleModel modulated_model(double sigma = 2.0) {
  return {SlowPotential::double_well(1.0, 1.0), FastPotential::modulated_cosine(), 0.1, sigma};
}

// K from composite Simpson on [0, 2 pi], independent of the library's trapezoid rule.
double k_simpson(const FastPotential& p, double x, double sigma) {
  const int m = 4000;
  const double L = p.period();
  const double h = L / m;
  double minus = 0.0, plus = 0.0;
  for (int j = 0; j <= m; ++j) {
    const double w = (j == 0 || j == m) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    const double v = p.value(x, j * h) / sigma;
    minus += w * std::exp(-v);
    plus += w * std::exp(v);
  }
  minus *= h / 3;
  plus *= h / 3;
  return L * L / (minus * plus);
}

std::vector<double> grid61(double lo, double hi) {
  std::vector<double> x;
  for (int i = 0; i < 61; ++i) x.push_back(lo + (hi - lo) * i / 60.0);
  return x;
}

}  // namespace

TEST_CASE("K for a vanishing fast potential is one") {
  const MultiscaleModel m{SlowPotential::quadratic(1.0), FastPotential::none(), 0.1, 0.5};
  CHECK(k_effective_quadrature(m, 0.7) == 1.0);
  CHECK(k_effective_quadrature(modulated_model(), 3.0) == 1.0);
}

TEST_CASE("K for the sine potential is 1/I0(1/sigma)^2") {
  // mpmath: 1/besseli(0, 2)^2
  CHECK(k_effective_quadrature(sine_model(), 0.0) == doctest::Approx(0.19243687849167269).epsilon(1e-12));
  for (double sigma : {0.25, 0.5, 1.0, 3.0}) {
    const double i0 = bessel_i(0, 1.0 / sigma);
    CHECK(std::abs(k_effective_quadrature(sine_model(sigma), 1.3) - 1.0 / (i0 * i0)) < 1e-8);
  }
}

TEST_CASE("quadrature K against an independent Simpson rule") {
  for (double x : {-1.8, -0.5, 0.9, 1.5}) {
    CHECK(k_effective_quadrature(modulated_model(), x) ==
          doctest::Approx(k_simpson(FastPotential::modulated_cosine(), x, 2.0)).epsilon(1e-10));
  }
  // mpmath: 1/besseli(0, 1.5^2/4)^2
  CHECK(k_effective_quadrature(modulated_model(), 1.5) == doctest::Approx(0.8562607923258127).epsilon(1e-12));
}

TEST_CASE("K lies in (0, 1] on sampled grids") {
  for (double sigma : {0.3, 0.5, 2.0}) {
    const MultiscaleModel m = modulated_model(sigma);
    for (double x : grid61(-3.0, 3.0)) {
      const double k = k_effective_quadrature(m, x);
      CHECK(k > 0.0);
      CHECK(k <= 1.0 + 1e-12);
      if (!m.fast.vanishes_at(x)) CHECK(k < 1.0);
    }
    const double ks = k_effective_quadrature(sine_model(sigma), 0.2);
    CHECK(ks > 0.0);
    CHECK(ks < 1.0);
  }
}

TEST_CASE("doubling the node count leaves K unchanged") {
  for (double x : {-1.7, 0.4, 1.95}) {
    const double k = k_effective_quadrature(modulated_model(), x, 1024);
    CHECK(std::abs(k_effective_quadrature(modulated_model(), x, 2048) - k) < 1e-10);
  }
  CHECK(std::abs(k_effective_quadrature(sine_model(), 0.0, 4096) - k_effective_quadrature(sine_model(), 0.0)) < 1e-10);
}

TEST_CASE("quadrature K against the Bessel closed form on the modulated model") {
  const MultiscaleModel m = modulated_model();
  for (double x : grid61(-3.0, 3.0)) {
    const double z = x * x / (2 * m.sigma);
    const double i0 = bessel_i(0, z);
    const double closed = std::abs(x) <= 2.0 ? 1.0 / (i0 * i0) : 1.0;
    CHECK(std::abs(k_effective_quadrature(m, x) - closed) < 1e-8);
  }
}

TEST_CASE("homogenized drift examples") {
  CHECK(homogenized_drift(sine_model(), 1.0) == doctest::Approx(0.19243687849167269).epsilon(1e-10));
  CHECK(std::abs(homogenized_drift(modulated_model(), 0.0)) < 1e-12);
  CHECK(homogenized_drift(modulated_model(), 3.0) == doctest::Approx(24.0));
}

TEST_CASE("closed-form modulated drift") {
  CHECK(modulated_double_well_drift(0.0, 2.0) == 0.0);
  CHECK(modulated_double_well_drift(3.0, 2.0) == 24.0);
  // mpmath evaluation of V' I0^-2 + x I1 I0^-3
  CHECK(modulated_double_well_drift(1.0, 2.0) == doctest::Approx(0.12023196700987925).epsilon(1e-13));
  CHECK(modulated_double_well_drift(0.5, 2.0) == doctest::Approx(-0.35868156122283567).epsilon(1e-13));
  CHECK(modulated_double_well_drift(-1.2, 2.0) == doctest::Approx(-0.6944665526920473).epsilon(1e-13));
  CHECK(modulated_double_well_drift(1.5, 2.0) == doctest::Approx(1.9531514530138795).epsilon(1e-13));
  CHECK(std::abs(modulated_double_well_drift(1.0, 2.0) - homogenized_drift(modulated_model(), 1.0)) < 1e-6);
}

TEST_CASE("quadrature drift against the closed form away from the cutoff") {
  const MultiscaleModel m = modulated_model();
  for (double x : grid61(-3.0, 3.0)) {
    if (std::abs(std::abs(x) - 2.0) < 1e-9) continue;
    CHECK(std::abs(homogenized_drift(m, x) - modulated_double_well_drift(x, m.sigma)) < 1e-6);
  }
}

TEST_CASE("drift is odd for the modulated model") {
  const MultiscaleModel m = modulated_model();
  for (double x : {0.3, 1.1, 1.9, 2.4}) {
    CHECK(homogenized_drift(m, -x) == doctest::Approx(-homogenized_drift(m, x)).epsilon(1e-9));
  }
}

TEST_CASE("one-sided stencils near the cutoff") {
  const MultiscaleModel m = modulated_model();
  const double inside = 2.0 - 5e-5;
  const double outside = 2.0 + 5e-5;
  CHECK(std::abs(homogenized_drift(m, inside) - modulated_double_well_drift(inside, m.sigma)) < 1e-6);
  CHECK(homogenized_drift(m, outside) == doctest::Approx(outside * outside * outside - outside));
}

TEST_CASE("effective models") {
  const EffectiveModel q = effective_model_quadrature(modulated_model());
  const auto c = effective_model_closed_form(modulated_model());
  REQUIRE(c);
  CHECK(q.provenance == EffectiveModel::Provenance::quadrature);
  CHECK(c->provenance == EffectiveModel::Provenance::closed_form);
  for (double x : {-1.0, 0.5, 2.5}) {
    CHECK(std::abs(q.K(x) - c->K(x)) < 1e-8);
    CHECK(std::abs(q.b(x) - c->b(x)) < 1e-6);
    CHECK(q.Sigma(x) == doctest::Approx(2.0 * q.K(x)));
  }
  const auto s = effective_model_closed_form(sine_model());
  REQUIRE(s);
  CHECK(s->b(2.0) == doctest::Approx(2.0 * 0.19243687849167269).epsilon(1e-12));

  FastPotential::Custom custom;
  custom.value = [](double, double y) { return std::sin(y); };
  custom.dy = [](double, double y) { return std::cos(y); };
  CHECK_FALSE(effective_model_closed_form({SlowPotential::quadratic(1.0), FastPotential::custom(custom), 0.1, 0.5}));
}

TEST_CASE("homogenized parameters") {
  const Eigen::VectorXd a = homogenized_parameters({SlowPotential::double_well(1.0, 2.0), FastPotential::sine(), 0.1, 0.5});
  REQUIRE(a.size() == 2);
  // 1/I0(2)^2 and 2/I0(2)^2
  CHECK(a[0] == doctest::Approx(0.19243687849167269).epsilon(1e-12));
  CHECK(a[1] == doctest::Approx(0.38487375698334539).epsilon(1e-12));
  CHECK_THROWS_AS(homogenized_parameters(modulated_model()), std::invalid_argument);
}

TEST_CASE("quadrature argument checks") {
  CHECK_THROWS_AS(k_effective_quadrature(sine_model(), 0.0, 15), std::invalid_argument);
  CHECK_THROWS_AS(k_effective_quadrature(sine_model(), 0.0, 1001), std::invalid_argument);
  CHECK_THROWS_AS(k_effective_quadrature(sine_model(0.0), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(k_effective_quadrature(sine_model(1e-3), 0.0), std::overflow_error);
  CHECK_THROWS_AS(homogenized_drift(sine_model(), 0.0, 2048, 0.0), std::invalid_argument);
}
