#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "ecsq/septuple.hpp"
#include "ecsq/specsolve.hpp"

using namespace ecsq;

namespace {

double poly(std::int64_t k, std::int64_t l, double t) {
  return -t * t * t + double(k) * t * t - double(l) * t + 1.0;
}

// independent root oracle: plain bisection to 1e-13
double bisect_root(std::int64_t k, std::int64_t l, double lo, double hi) {
  double flo = poly(k, l, lo);
  for (int i = 0; i < 120; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = poly(k, l, mid);
    if (flo * fm <= 0.0)
      hi = mid;
    else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<std::pair<std::int64_t, std::int64_t>> valid_pairs(std::int64_t kmin, std::int64_t kmax) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (std::int64_t k = kmin; k <= kmax; ++k)
    for (std::int64_t l = k + 1; 4 * l <= k * k; ++l) out.push_back({k, l});
  return out;
}

}  // namespace

TEST_CASE("cubic sign pattern matches the bracketing argument") {
  REQUIRE(poly(5, 6, 1.0 / 6.0) > 0.0);
  REQUIRE(poly(5, 6, 1.0) == Catch::Approx(-1.0));
  REQUIRE(poly(5, 6, 2.5) >= 1.0);
  REQUIRE(poly(5, 6, 5.0) < 0.0);
}

TEST_CASE("cubic roots for (5, 6)") {
  const CubicSpec spec = cubic_roots(5, 6);
  const auto& r = spec.roots;

  // bracket membership
  REQUIRE(r.lambda > 1.0 / 6.0);
  REQUIRE(r.lambda < 1.0);
  REQUIRE(r.mu > 1.0);
  REQUIRE(r.mu < 2.5);
  REQUIRE(r.nu > 2.5);
  REQUIRE(r.nu < 5.0);

  // independent bisection oracle
  REQUIRE(r.lambda == Catch::Approx(bisect_root(5, 6, 1.0 / 6.0, 1.0)).margin(1e-10));
  REQUIRE(r.mu == Catch::Approx(bisect_root(5, 6, 1.0, 2.5)).margin(1e-10));
  REQUIRE(r.nu == Catch::Approx(bisect_root(5, 6, 2.5, 5.0)).margin(1e-10));

  REQUIRE(std::abs(r.lambda * r.mu * r.nu - 1.0) < 1e-12);
  REQUIRE(std::abs(r.lambda + r.mu + r.nu - 5.0) < 1e-10);
}

TEST_CASE("precondition rejections") {
  REQUIRE_THROWS_AS(cubic_roots(5, 7), std::invalid_argument);  // 7 > 25/4
  REQUIRE_THROWS_AS(cubic_roots(4, 4), std::invalid_argument);  // k < l fails
  REQUIRE_THROWS_AS(cubic_roots(1, 2), std::invalid_argument);
}

TEST_CASE("multiplier inequality report") {
  const LmnReport ok = verify_lmn(SpecTriple{std::exp(-2.0), std::exp(-1.0), std::exp(3.0)});
  REQUIRE(ok.pass);
  for (const auto& c : ok.checks)
    if (c.name == "lambda_nu_ne_one") REQUIRE(c.margin == Catch::Approx(std::exp(1.0) - 1.0));

  const LmnReport bad = verify_lmn(SpecTriple{0.5, 1.0, 2.0});
  REQUIRE_FALSE(bad.pass);
  for (const auto& c : bad.checks)
    if (c.name == "lambda_nu_ne_one") REQUIRE_FALSE(c.pass);

  REQUIRE(verify_lmn(cubic_roots(5, 6).roots).pass);
}

TEST_CASE("constant-chart guess satisfies the constant-family inequalities") {
  // over every valid (k, l) with k <= 20
  for (const auto& [k, l] : valid_pairs(5, 20)) {
    const CubicSpec spec = cubic_roots(k, l);
    REQUIRE(std::abs(spec.roots.lambda * spec.roots.mu * spec.roots.nu - 1.0) < 1e-12);
    const double p = 1.0;
    const ConstantGuess g = constant_slice_guess(spec.roots, p);
    const double alpha = -std::log(spec.roots.lambda) / p;
    const double beta = -std::log(spec.roots.mu) / p;
    const double gamma = -std::log(spec.roots.nu) / p;
    REQUIRE(alpha > beta);
    REQUIRE(beta > gamma);
    REQUIRE(std::abs(beta) < alpha);
    REQUIRE(std::abs(beta) < -gamma);
    REQUIRE(-gamma != alpha);
    REQUIRE(g.r > 0.0);
    REQUIRE(g.s > 0.0);
    REQUIRE(g.r != g.s);
  }
}

TEST_CASE("constant guess is the exact fixed point for a constant-family target") {
  const SpecTriple target{std::exp(-2.0), std::exp(-1.0), std::exp(3.0)};
  const ConstantGuess g = constant_slice_guess(target, 1.0);
  REQUIRE(g.x0 == Catch::Approx(std::log(4.0)).margin(1e-13));
  REQUIRE(g.r == Catch::Approx(3.0).margin(1e-12));
  REQUIRE(g.s == Catch::Approx(8.0).margin(1e-12));
}

TEST_CASE("spectrum inversion on the (5, 6) roots") {
  const CubicSpec spec = cubic_roots(5, 6);
  const InvertResult res = invert_spec(spec.roots, 1.0, 0.3, 256);
  REQUIRE(res.converged);
  REQUIRE(res.iterations <= 30);
  REQUIRE(res.residual < 1e-9);

  const auto [rho, sigma] = xrs_to_rho_sigma(res.xrs);
  const Septuple sept = rho_sigma_to_septuple(rho, sigma, res.xrs.r(), res.xrs.s());
  REQUIRE(sept.riccati_residual() < 1e-7);
  REQUIRE(sept.nonconstancy_margin() > 1e-3);

  // the spectrum of the solution hits the target through the direct route too
  const SpecTriple direct = spec_of(sept);
  REQUIRE(std::log(direct.lambda) == Catch::Approx(std::log(spec.roots.lambda)).margin(1e-9));
  REQUIRE(std::log(direct.mu) == Catch::Approx(std::log(spec.roots.mu)).margin(1e-9));
  REQUIRE(std::log(direct.nu) == Catch::Approx(std::log(spec.roots.nu)).margin(1e-9));
}

TEST_CASE("inversion preconditions") {
  const SpecTriple roots = cubic_roots(5, 6).roots;
  REQUIRE_THROWS_AS(invert_spec(roots, 1.0, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(invert_spec(roots, -1.0, 0.3), std::invalid_argument);
  REQUIRE_THROWS_AS(invert_spec(SpecTriple{0.5, 1.0, 2.0}, 1.0, 0.3), std::invalid_argument);
}

TEST_CASE("Newton converges across the (k, l) range at eta = 0.5") {
  for (const auto& [k, l] : valid_pairs(5, 12)) {
    const CubicSpec spec = cubic_roots(k, l);
    const InvertResult res = invert_spec(spec.roots, 1.0, 0.5, 256);
    INFO("k=" << k << " l=" << l << " iterations=" << res.iterations
              << " residual=" << res.residual);
    REQUIRE(res.converged);
    REQUIRE(res.iterations <= 30);
    const auto [rho, sigma] = xrs_to_rho_sigma(res.xrs);
    const Septuple sept = rho_sigma_to_septuple(rho, sigma, res.xrs.r(), res.xrs.s());
    REQUIRE(sept.nonconstancy_margin() > 1e-6);
  }
}
