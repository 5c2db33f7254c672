#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ecsq/periodic.hpp"
#include "oracles.hpp"

using ecsq::kTwoPi;
using ecsq::PeriodicGridFunction;

namespace {

PeriodicGridFunction cosine(double p = 1.0, int n = 64) {
  return PeriodicGridFunction::from_callable([p](double t) { return std::cos(kTwoPi * t / p); }, p, n);
}

// random band-limited function with harmonics up to max_mode
PeriodicGridFunction random_trig(std::mt19937_64& rng, double p, int n, int max_mode) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(max_mode) + 1), b(static_cast<std::size_t>(max_mode) + 1);
  for (auto& v : a) v = u(rng);
  for (auto& v : b) v = u(rng);
  return PeriodicGridFunction::from_callable(
      [&, p](double t) {
        double acc = a[0];
        for (int m = 1; m <= max_mode; ++m)
          acc += a[static_cast<std::size_t>(m)] * std::cos(kTwoPi * m * t / p) +
                 b[static_cast<std::size_t>(m)] * std::sin(kTwoPi * m * t / p);
        return acc;
      },
      p, n);
}

}  // namespace

TEST_CASE("from_callable samples the grid") {
  const auto c7 = PeriodicGridFunction::constant(7.0, 1.0, 16);
  for (double v : c7.samples()) REQUIRE(v == 7.0);

  const auto c = cosine();
  REQUIRE(std::abs(c.samples()[16]) < 1e-12);  // quarter period

  const auto shifted = 2.0 + cosine();
  REQUIRE(shifted.min_value() == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(shifted.max_value() == Catch::Approx(3.0).margin(1e-12));
}

TEST_CASE("invalid inputs are rejected") {
  REQUIRE_THROWS_AS(PeriodicGridFunction::constant(1.0, -1.0, 64), std::invalid_argument);
  REQUIRE_THROWS_AS(PeriodicGridFunction::constant(1.0, 1.0, 48), std::invalid_argument);
  REQUIRE_THROWS_AS(PeriodicGridFunction::constant(1.0, 1.0, 8), std::invalid_argument);
  REQUIRE_THROWS_AS(PeriodicGridFunction::from_callable(
                        [](double t) { return t == 0.0 ? 1.0 / 0.0 : 0.0; }, 1.0, 16),
                    std::invalid_argument);
}

TEST_CASE("periodicity is exact in index arithmetic") {
  std::mt19937_64 rng(7);
  const auto g = random_trig(rng, 2.0, 64, 5);
  for (long i = 0; i < 64; ++i) {
    REQUIRE(g.sample(i) == g.sample(i + 64));
    REQUIRE(g.sample(i) == g.sample(i - 64));
  }
  // continuous evaluation is periodic after modular reduction
  for (double t : {0.13, 0.77, 1.991}) REQUIRE(g(t) == Catch::Approx(g(t + 2.0)).margin(1e-12));
}

TEST_CASE("interpolation reproduces nodes and harmonics") {
  const auto c = cosine(1.0, 64);
  for (int i = 0; i < 64; ++i) REQUIRE(c(c.node(i)) == Catch::Approx(c.samples()[i]).margin(1e-12));
  for (double t : {0.111, 0.318, 0.5, 0.9321})
    REQUIRE(c(t) == Catch::Approx(std::cos(kTwoPi * t)).margin(1e-12));
}

TEST_CASE("spectral derivative") {
  const auto zero = PeriodicGridFunction::constant(4.0, 1.0, 32).derivative();
  REQUIRE(zero.max_abs() < 1e-13);

  const auto s = PeriodicGridFunction::from_callable(
      [](double t) { return std::sin(kTwoPi * t); }, 1.0, 64);
  const auto ds = s.derivative();
  for (int i = 0; i < 64; ++i)
    REQUIRE(ds.samples()[i] ==
            Catch::Approx(kTwoPi * std::cos(kTwoPi * s.node(i))).margin(1e-10));

  const auto g = 2.0 + cosine(1.0, 64);
  REQUIRE(g.derivative()(0.25) == Catch::Approx(-kTwoPi).margin(1e-9));

  // pure harmonics below N/4 differentiate to relative accuracy 1e-10
  const int n = 64;
  for (int m : {1, 3, 7, 15}) {
    const auto h = PeriodicGridFunction::from_callable(
        [m](double t) { return std::cos(kTwoPi * m * t); }, 1.0, n);
    const auto dh = h.derivative();
    const double scale = kTwoPi * m;
    for (int i = 0; i < n; ++i)
      REQUIRE(dh.samples()[i] ==
              Catch::Approx(-scale * std::sin(kTwoPi * m * h.node(i))).margin(1e-10 * scale));
  }
}

TEST_CASE("period integral") {
  REQUIRE(std::abs(cosine().integrate_period()) < 1e-14);
  REQUIRE(PeriodicGridFunction::constant(3.0, 2.0, 32).integrate_period() == Catch::Approx(6.0));

  // oracle: adaptive quadrature of 1/(2+cos(2 pi t)) agrees with 1/sqrt(3)
  const auto f = [](double t) { return 1.0 / (2.0 + std::cos(kTwoPi * t)); };
  const double by_quadrature = oracles::adaptive_simpson(f, 0.0, 1.0);
  const double closed_form = 1.0 / std::sqrt(3.0);
  REQUIRE(by_quadrature == Catch::Approx(closed_form).margin(1e-12));

  const auto g = PeriodicGridFunction::from_callable(f, 1.0, 64);
  REQUIRE(g.integrate_period() == Catch::Approx(by_quadrature).margin(1e-12));
  REQUIRE(g.integrate_period() == Catch::Approx(closed_form).margin(1e-12));
}

TEST_CASE("antiderivative splits secular and periodic parts") {
  const auto c = cosine(1.0, 64);
  const auto anti = c.antiderivative();
  REQUIRE(std::abs(anti.mean) < 1e-14);
  for (int i = 0; i < 64; ++i)
    REQUIRE(anti.periodic_part.samples()[i] ==
            Catch::Approx(std::sin(kTwoPi * c.node(i)) / kTwoPi).margin(1e-10));

  const auto k = PeriodicGridFunction::constant(5.5, 1.0, 32).antiderivative();
  REQUIRE(k.mean == Catch::Approx(5.5));
  REQUIRE(k.periodic_part.max_abs() < 1e-13);

  const auto mixed = (2.0 + cosine(1.0, 64)).antiderivative();
  REQUIRE(mixed.mean == Catch::Approx(2.0));
  REQUIRE(mixed.periodic_part(0.25) == Catch::Approx(std::sin(kTwoPi * 0.25) / kTwoPi).margin(1e-10));

  // integral_to matches direct quadrature
  const auto rho = 2.0 + cosine(1.0, 64);
  const auto anti_rho = rho.antiderivative();
  for (double t : {0.2, 0.85, 1.3}) {
    const double direct = oracles::adaptive_simpson(
        [](double tau) { return 2.0 + std::cos(kTwoPi * tau); }, 0.0, t);
    REQUIRE(anti_rho.integral_to(t) == Catch::Approx(direct).margin(1e-11));
  }
}

TEST_CASE("calculus round trips") {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 10; ++rep) {
    const auto g = random_trig(rng, 1.0, 256, 20);
    const auto anti = g.antiderivative();
    const auto back = anti.periodic_part.derivative() + anti.mean;
    REQUIRE((back - g).max_abs() < 1e-9);
    REQUIRE(std::abs(g.derivative().integrate_period()) < 1e-12);
  }
}

TEST_CASE("spectral convergence: doubling N leaves the integral unchanged") {
  const auto f = [](double t) { return 1.0 / (2.0 + std::cos(kTwoPi * t)); };
  const double coarse = PeriodicGridFunction::from_callable(f, 1.0, 256).integrate_period();
  const double fine = PeriodicGridFunction::from_callable(f, 1.0, 512).integrate_period();
  REQUIRE(std::abs(coarse - fine) < 1e-12);
}

TEST_CASE("resampling is exact for band-limited data") {
  std::mt19937_64 rng(3);
  const auto g = random_trig(rng, 1.0, 64, 10);
  const auto up = g.resample(256);
  for (int i = 0; i < 64; ++i)
    REQUIRE(up.samples()[static_cast<std::size_t>(4 * i)] ==
            Catch::Approx(g.samples()[static_cast<std::size_t>(i)]).margin(1e-12));
  const auto down = up.resample(64);
  REQUIRE((down - g).max_abs() < 1e-12);
}
