#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ecsq/odespace.hpp"
#include "ecsq/septuple.hpp"
#include "ecsq/specsolve.hpp"
#include "oracles.hpp"

using namespace ecsq;

namespace {

// the worked constant block: (alpha, beta, gamma) = (2, 1, -3), p = 1
DiagonalOperatorPath worked_block(int j = 1) {
  return DiagonalOperatorPath::from_septuple_blocks(constant_septuple(2.0, 1.0, -3.0, 1.0), j);
}

DiagonalOperatorPath zero_path(int dim = 2) {
  std::vector<PeriodicGridFunction> b(static_cast<std::size_t>(dim),
                                      PeriodicGridFunction::constant(0.0, 1.0, 64));
  return DiagonalOperatorPath(PeriodicGridFunction::constant(0.0, 1.0, 64), std::move(b),
                              std::vector<double>(static_cast<std::size_t>(dim), 0.0));
}

}  // namespace

TEST_CASE("first-order closed form") {
  const FirstOrderSpace trivial(zero_path());
  Eigen::VectorXd u0(2);
  u0 << 1.5, -0.25;
  REQUIRE((solve_first_order(trivial, u0, 0.77) - u0).cwiseAbs().maxCoeff() < 1e-14);
  REQUIRE((translation_operator(trivial) - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-14);

  const FirstOrderSpace space(worked_block());
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
  e1[0] = 1.0;
  // constant b = 2: u(t) = e^{2t}
  REQUIRE(solve_first_order(space, e1, 0.6)[0] == Catch::Approx(std::exp(1.2)).margin(1e-12));
  // u(p)/u(0) = e^{int alpha} = 1/lambda
  REQUIRE(solve_first_order(space, e1, 1.0)[0] == Catch::Approx(std::exp(2.0)).margin(1e-10));
}

TEST_CASE("closed form vs Runge-Kutta route") {
  // nonconstant block from the spectrum inversion
  const auto roots = cubic_roots(5, 6).roots;
  const auto inv = invert_spec(roots, 1.0, 0.3, 256);
  const auto rs = xrs_to_rho_sigma(inv.xrs);
  const auto sept = rho_sigma_to_septuple(rs.rho, rs.sigma, inv.xrs.r(), inv.xrs.s());
  const auto path = DiagonalOperatorPath::from_septuple_blocks(sept, 1);
  const FirstOrderSpace space(path);

  Eigen::VectorXd u0(3);
  u0 << 1.0, 1.0, 1.0;
  for (double t : {0.25, 0.5, 1.0}) {
    const Eigen::VectorXd closed = solve_first_order(space, u0, t);
    const Eigen::VectorXd rk = solve_first_order_rk4(path, u0, t, 256);
    REQUIRE(((closed - rk).cwiseAbs().cwiseQuotient(closed.cwiseAbs())).maxCoeff() < 1e-7);
  }

  // translation operator: diagonal closed form vs dense monodromy
  const Eigen::MatrixXd t_diag = translation_operator(space);
  const Eigen::MatrixXd t_rk4 = translation_operator_rk4(path, 2048);
  REQUIRE((t_diag - t_rk4).cwiseAbs().maxCoeff() < 1e-8);

  // multipliers are the target spectrum
  REQUIRE(t_diag(0, 0) == Catch::Approx(roots.lambda).margin(1e-9));
  REQUIRE(t_diag(1, 1) == Catch::Approx(roots.mu).margin(1e-9));
  REQUIRE(t_diag(2, 2) == Catch::Approx(roots.nu).margin(1e-9));

  // det T = exp(-int tr B)
  double tr = 0.0;
  for (int i = 0; i < 3; ++i) tr += path.b(i).integrate_period();
  REQUIRE(t_rk4.determinant() == Catch::Approx(std::exp(-tr)).margin(1e-8));

  REQUIRE(space.min_evaluation_singular_value() > 1e-8);
}

TEST_CASE("worked block translation operator") {
  const FirstOrderSpace space(worked_block());
  const Eigen::MatrixXd t = translation_operator(space);
  REQUIRE(t(0, 0) == Catch::Approx(std::exp(-2.0)).margin(1e-12));
  REQUIRE(t(1, 1) == Catch::Approx(std::exp(-1.0)).margin(1e-12));
  REQUIRE(t(2, 2) == Catch::Approx(std::exp(3.0)).margin(1e-11));
  REQUIRE(t.determinant() == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("omega on the first-order basis") {
  const FirstOrderSpace space(worked_block());
  const InnerSpace inner({1, -1, 1});

  // u = w gives zero; distinct axis solutions give zero
  const auto r_self = omega(basis_state(space, 0), basis_state(space, 0), inner, 1.0, 64);
  REQUIRE(r_self.value == 0.0);
  const auto r_axes = omega(basis_state(space, 0), basis_state(space, 2), inner, 1.0, 64);
  REQUIRE(std::abs(r_axes.value) < 1e-14);
  REQUIRE(r_axes.constancy_residual < 1e-14);

  REQUIRE(lagrangian_residual(space, inner) < 1e-9);

  // a non-solution pair is rejected
  const StateEval fake = [](double t) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(3), du = Eigen::VectorXd::Zero(3);
    u[0] = std::cos(kTwoPi * t);
    du[1] = 1.0;
    return std::make_pair(u, du);
  };
  REQUIRE_THROWS_AS(omega(fake, basis_state(space, 0), inner, 1.0, 64), std::runtime_error);
}

TEST_CASE("non-self-adjoint fixture has a nonzero Lagrangian residual") {
  // B = [[1, 1], [0, -1]] constant; solutions (e^t, 0) and (-e^{-t}/2, e^{-t})
  const StateEval ua = [](double t) {
    Eigen::VectorXd u(2), du(2);
    u << std::exp(t), 0.0;
    du << std::exp(t), 0.0;
    return std::make_pair(u, du);
  };
  const StateEval ub = [](double t) {
    Eigen::VectorXd u(2), du(2);
    u << -0.5 * std::exp(-t), std::exp(-t);
    du << 0.5 * std::exp(-t), -std::exp(-t);
    return std::make_pair(u, du);
  };
  const InnerSpace inner({1, 1});
  const double res = lagrangian_residual({ua, ub}, inner, 1.0, 64);
  REQUIRE(res == Catch::Approx(1.0).margin(1e-12));

  // residual is stable under a basis change u_b -> u_a + u_b
  const StateEval uc = [&](double t) {
    auto [u1, du1] = ua(t);
    auto [u2, du2] = ub(t);
    return std::make_pair(Eigen::VectorXd(u1 + u2), Eigen::VectorXd(du1 + du2));
  };
  const double res2 = lagrangian_residual({ua, uc}, inner, 1.0, 64);
  REQUIRE(res2 == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("companion matrix and basis") {
  const auto roots = cubic_roots(5, 6).roots;
  const Eigen::Matrix3d t = companion_matrix(5, 6);
  REQUIRE(t.determinant() == Catch::Approx(1.0).margin(1e-12));

  // eigenvector relation T (r^2, r, 1)^T = r (r^2, r, 1)^T via r^3 = k r^2 - l r + 1
  for (double r : {roots.lambda, roots.mu, roots.nu}) {
    const Eigen::Vector3d v(r * r, r, 1.0);
    REQUIRE(((t * v) - r * v).cwiseAbs().maxCoeff() < 1e-10);
  }

  const Eigen::Matrix3d cob = companion_basis(roots, 5, 6);
  const Eigen::Vector3d d(roots.lambda, roots.mu, roots.nu);
  const Eigen::Matrix3d conj = cob * d.asDiagonal() * cob.inverse();
  REQUIRE((conj - t).cwiseAbs().maxCoeff() < 1e-8);
  REQUIRE(conj(0, 0) == Catch::Approx(5.0).margin(1e-8));
  REQUIRE(conj(0, 1) == Catch::Approx(-6.0).margin(1e-8));
  REQUIRE(conj(0, 2) == Catch::Approx(1.0).margin(1e-8));

  // nearly coincident roots are rejected
  REQUIRE_THROWS_AS(companion_basis(SpecTriple{0.5, 0.5 + 1e-10, 2.0}, 5, 6),
                    std::invalid_argument);
}

TEST_CASE("translation-invariant lattice") {
  // constant block whose spectrum is exactly the (5, 6) roots
  const auto roots = cubic_roots(5, 6).roots;
  const double alpha = -std::log(roots.lambda), beta = -std::log(roots.mu),
               gamma = -std::log(roots.nu);
  const Septuple sept = constant_septuple(alpha, beta, gamma, 1.0);
  const FirstOrderSpace block(DiagonalOperatorPath::from_septuple_blocks(sept, 1));
  const Eigen::Matrix3d cob = companion_basis(roots, 5, 6);

  const IntegerLattice l1 = build_lattice(1, block, cob);
  REQUIRE(l1.integer_residual < 1e-6);
  REQUIRE(l1.det_error < 1e-8);
  Eigen::Matrix3i expected;
  expected << 5, -6, 1, 1, 0, 0, 0, 1, 0;
  REQUIRE(l1.monodromy_int == expected);

  const IntegerLattice l2 = build_lattice(2, block, cob);
  REQUIRE(l2.monodromy_int.rows() == 6);
  REQUIRE(l2.integer_residual < 1e-6);
  REQUIRE(std::abs(l2.monodromy_real.determinant() - 1.0) < 1e-8);

  // T-invariance: integer vectors stay integer under the monodromy
  Eigen::VectorXi vec(6);
  vec << 1, -2, 3, 0, 7, -1;
  const Eigen::VectorXi image = l2.monodromy_int * vec;
  const Eigen::VectorXd real_image = l2.monodromy_real * vec.cast<double>();
  REQUIRE((real_image - image.cast<double>()).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("dimension-4 obstruction") {
  const auto rho = PeriodicGridFunction::from_callable(
      [](double t) { return 2.0 + std::cos(kTwoPi * t); }, 1.0, 256);

  const Dim4Result res = dim4_obstruction(rho, 1.0);
  // quadrature oracle for int dt / (2 + cos)
  const double oracle = oracles::adaptive_simpson(
      [](double t) { return 1.0 / (2.0 + std::cos(kTwoPi * t)); }, 0.0, 1.0);
  REQUIRE(res.det_t == Catch::Approx(std::exp(-oracle)).margin(1e-9));
  REQUIRE(res.det_t == Catch::Approx(std::exp(-1.0 / std::sqrt(3.0))).margin(1e-9));
  REQUIRE(res.det_t == Catch::Approx(0.56138).margin(1e-5));
  REQUIRE(std::abs(res.det_t - res.det_t_direct) < 1e-13);
  REQUIRE(res.margin == Catch::Approx(1.0 - res.det_t));
  REQUIRE(res.margin > 0.4);
  REQUIRE(res.riccati_residual < 1e-10);

  // r -> -r inverts the determinant
  const Dim4Result flipped = dim4_obstruction(rho, -1.0);
  REQUIRE(flipped.det_t == Catch::Approx(1.0 / res.det_t).margin(1e-10));

  // rejects r = 0 and sign-changing rho
  REQUIRE_THROWS_AS(dim4_obstruction(rho, 0.0), std::invalid_argument);
  const auto crossing = PeriodicGridFunction::from_callable(
      [](double t) { return std::cos(kTwoPi * t); }, 1.0, 64);
  REQUIRE_THROWS_AS(dim4_obstruction(crossing, 1.0), std::invalid_argument);
}

TEST_CASE("traceless part of F^2") {
  REQUIRE(traceless_square_residual(Eigen::Matrix2d::Identity()) < 1e-15);
  Eigen::Matrix2d nilpotent;
  nilpotent << 0.0, 1.0, 0.0, 0.0;
  REQUIRE(traceless_square_residual(nilpotent) < 1e-15);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 50; ++i) {
    Eigen::Matrix2d f;
    f << u(rng), u(rng), u(rng), u(rng);
    REQUIRE(traceless_square_residual(f) < 1e-12);
  }
}

TEST_CASE("second-order system: constant coefficients") {
  // f = 1, a = (+1/2, -1/2): components satisfy u'' = c u with c = 1.5, 0.5
  const SecondOrderSystem sys(PeriodicGridFunction::constant(1.0, 1.0, 64), {0.5, -0.5});
  Eigen::VectorXd z0(4);
  z0 << 1.0, -2.0, 0.5, 1.0;  // (u1, u2, u1', u2')
  for (double t : {0.3, 0.9, 1.7, -0.6}) {
    const Eigen::VectorXd z = sys.evolve(z0, t);
    int idx = 0;
    for (double c : {1.5, 0.5}) {
      const double w = std::sqrt(c);
      const double expect_u = z0[idx] * std::cosh(w * t) + z0[2 + idx] * std::sinh(w * t) / w;
      const double expect_v = z0[idx] * w * std::sinh(w * t) + z0[2 + idx] * std::cosh(w * t);
      REQUIRE(z[idx] == Catch::Approx(expect_u).margin(1e-10));
      REQUIRE(z[2 + idx] == Catch::Approx(expect_v).margin(1e-10));
      ++idx;
    }
  }
}

TEST_CASE("second-order system: periodic coefficients against an oracle") {
  const auto f = PeriodicGridFunction::from_callable(
      [](double t) { return 14.0 / 3.0 + 0.4 * std::cos(kTwoPi * t) + 0.1 * std::sin(2.0 * kTwoPi * t); },
      1.0, 256);
  const SecondOrderSystem sys(f, {-2.0 / 3.0, -11.0 / 3.0, 13.0 / 3.0});

  Eigen::VectorXd z0(6);
  z0 << 0.3, -0.7, 1.1, 0.2, 0.9, -1.3;
  for (double t : {0.37, 0.81}) {
    const Eigen::VectorXd z = sys.evolve(z0, t);
    for (int i = 0; i < 3; ++i) {
      const double a = sys.a_entries()[static_cast<std::size_t>(i)];
      const auto [u, v] = oracles::hill_rk4([&](double tau) { return f(tau) + a; }, z0[i],
                                            z0[3 + i], t, 1 << 15);
      REQUIRE(z[i] == Catch::Approx(u).margin(1e-10));
      REQUIRE(z[3 + i] == Catch::Approx(v).margin(1e-10));
    }
  }

  // translation: (T^k u)(t) = u(t - k p)
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uu(-1.0, 1.0);
  Eigen::VectorXd z(6);
  for (int i = 0; i < 6; ++i) z[i] = uu(rng);
  for (int k : {1, -2}) {
    const Eigen::VectorXd tz = sys.translate(z, k);
    for (double t : {0.25, 0.6}) {
      const Eigen::VectorXd lhs = sys.evolve(tz, t);
      const Eigen::VectorXd rhs = sys.evolve(z, t - k * 1.0);
      REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  REQUIRE(sys.solution_residual(z) < 1e-7);

  // omega is constant and translation-invariant on random solution pairs
  const InnerSpace inner({1, 1, -1});
  Eigen::VectorXd z2(6);
  for (int i = 0; i < 6; ++i) z2[i] = uu(rng);
  const auto om = omega(sys, z, z2, inner);
  REQUIRE(om.constancy_residual < 1e-9);
  REQUIRE(om.value == Catch::Approx(omega_at_zero(inner, z, z2)).margin(1e-9));
  const double before = omega_at_zero(inner, z, z2);
  const double after = omega_at_zero(inner, sys.translate(z, 1), sys.translate(z2, 1));
  REQUIRE(std::abs(after - before) < 1e-10);
}
