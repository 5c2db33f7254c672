#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <random>

#include "ecsq/geometry.hpp"
#include "ecsq/septuple.hpp"
#include "ecsq/specsolve.hpp"

using namespace ecsq;

namespace {

// nonconstant flagship data: (5, 6) roots, eta = 0.3, one block
struct Flagship {
  Septuple septuple;
  DiagonalOperatorPath path;
  MetricData metric;
  std::shared_ptr<const GroupContext> ctx;
};

const Flagship& flagship() {
  static const Flagship f = [] {
    const auto roots = cubic_roots(5, 6).roots;
    const auto inv = invert_spec(roots, 1.0, 0.3, 256);
    const auto jet = slice_rho_sigma_jet(inv.x0, inv.eta, inv.xrs.r(), inv.xrs.s(), 1.0, 256);
    Septuple sept = rho_sigma_to_septuple(jet, inv.xrs.r(), inv.xrs.s());
    DiagonalOperatorPath path = DiagonalOperatorPath::from_septuple_blocks(sept, 1);
    InnerSpace inner({1, 1, -1});
    MetricData metric(sept.f(), path.a_entries(), inner);
    auto ctx = std::make_shared<const GroupContext>(SecondOrderSystem(sept.f(), path.a_entries()),
                                                    inner, FirstOrderSpace(path));
    return Flagship{std::move(sept), std::move(path), std::move(metric), std::move(ctx)};
  }();
  return f;
}

}  // namespace

TEST_CASE("metric matrix structure") {
  const MetricData& m = flagship().metric;

  // kappa vanishes on the zero section: the (t, s) block is [[0, 1/2], [1/2, 0]]
  const Eigen::MatrixXd g0 = metric_at(m, PointM{0.3, 5.0, Eigen::Vector3d::Zero()});
  REQUIRE(g0(0, 0) == 0.0);
  REQUIRE(g0(0, 1) == 0.5);
  REQUIRE(g0(1, 0) == 0.5);
  REQUIRE(g0(1, 1) == 0.0);
  for (int i = 0; i < 3; ++i) {
    REQUIRE(g0(2 + i, 2 + i) == (i == 2 ? -1.0 : 1.0));
    REQUIRE(g0(0, 2 + i) == 0.0);
    REQUIRE(g0(1, 2 + i) == 0.0);
  }

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int rep = 0; rep < 20; ++rep) {
    const PointM x{u(rng), u(rng), Eigen::Vector3d(u(rng), u(rng), u(rng))};
    const Eigen::MatrixXd g = metric_at(m, x);
    // the determinant is -det(h)/4 at every point (block elimination)
    REQUIRE(g.determinant() == Catch::Approx(-0.25 * (1.0 * 1.0 * -1.0)).margin(1e-12));
    // signature: fibre signs plus one plus and one minus
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    int plus = 0, minus = 0;
    for (int i = 0; i < 5; ++i) (es.eigenvalues()[i] > 0.0 ? plus : minus) += 1;
    REQUIRE(plus == 3);
    REQUIRE(minus == 2);
  }
}

TEST_CASE("flat degenerate fixture has zero curvature") {
  const MetricData flat(PeriodicGridFunction::constant(0.0, 1.0, 64), {0.0, 0.0},
                        InnerSpace({1, -1}));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int rep = 0; rep < 5; ++rep) {
    const PointM x{u(rng), u(rng), Eigen::Vector2d(u(rng), u(rng))};
    const CurvatureJet jet = curvature_jet(flat, x);
    REQUIRE(jet.riemann.max_abs() < 1e-10);
    REQUIRE(jet.ricci.cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("curvature against the closed-form components") {
  const MetricData& m = flagship().metric;
  const auto& a = m.a_diag();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int rep = 0; rep < 10; ++rep) {
    const PointM x{u(rng), u(rng), Eigen::Vector3d(u(rng), u(rng), u(rng))};
    const CurvatureJet jet = curvature_jet(m, x);
    const double ft = m.f_deriv(0, x.t);

    // R_{(2+i) 0 (2+j) 0} = -sign_i (f + a_i) delta_ij
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double expect =
            i == j ? -m.inner().signs()[static_cast<std::size_t>(i)] *
                         (ft + a[static_cast<std::size_t>(i)])
                   : 0.0;
        REQUIRE(jet.riemann(2 + i, 0, 2 + j, 0) == Catch::Approx(expect).margin(1e-9));
      }

    // Ricci = -(n-2) f dt (x) dt and zero scalar curvature
    REQUIRE(jet.ricci(0, 0) == Catch::Approx(-3.0 * ft).margin(1e-9));
    REQUIRE(std::abs(jet.scalar) < 1e-10);
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < 5; ++c)
        if (!(r == 0 && c == 0)) REQUIRE(std::abs(jet.ricci(r, c)) < 1e-10);

    // tensor identities
    REQUIRE(jet.riemann_symmetry_residual() < 1e-9);
    REQUIRE(jet.weyl_trace_residual() < 1e-8);
    REQUIRE(jet.nabla_dt.cwiseAbs().maxCoeff() < 1e-12);

    // parallel Weyl, nonflat Weyl, nonparallel Riemann
    REQUIRE(jet.nabla_weyl.max_abs() < 1e-6);
    REQUIRE(jet.weyl.max_abs() > 1e-4 * jet.riemann.max_abs());
  }
}

TEST_CASE("finite differences agree with the analytic jet at second order") {
  const MetricData& m = flagship().metric;
  const PointM x{0.23, -0.4, Eigen::Vector3d(0.8, -1.2, 0.5)};
  const CurvatureJet exact = curvature_jet(m, x, JetMode::analytic);
  const CurvatureJet fd1 = curvature_jet(m, x, JetMode::finite_difference, 1e-2);
  const CurvatureJet fd2 = curvature_jet(m, x, JetMode::finite_difference, 5e-3);

  double d1 = 0.0, d2 = 0.0;
  for (std::size_t i = 0; i < exact.riemann.v.size(); ++i) {
    d1 = std::max(d1, std::abs(fd1.riemann.v[i] - exact.riemann.v[i]));
    d2 = std::max(d2, std::abs(fd2.riemann.v[i] - exact.riemann.v[i]));
  }
  REQUIRE(d1 < 1e-3);
  REQUIRE(d1 / d2 > 3.0);  // O(h^2) halving
  REQUIRE(d1 / d2 < 5.0);

  const double w1 = fd1.nabla_weyl.max_abs();
  const double w2 = fd2.nabla_weyl.max_abs();
  REQUIRE(w1 / w2 > 3.0);
  REQUIRE(w1 / w2 < 5.0);
}

TEST_CASE("ecs certificate on the flagship metric") {
  const MetricData& m = flagship().metric;
  const auto pts = sample_points(m, 8, 99);
  const EcsReport rep = ecs_certificate(m, pts);
  REQUIRE(rep.pass_nabla_weyl);
  REQUIRE(rep.pass_fd_ratio);
  REQUIRE(rep.pass_weyl_nonzero);
  REQUIRE(rep.pass_nabla_riemann_nonzero);
  REQUIRE(rep.pass_recurrence);
  REQUIRE(rep.pass_nabla_dt);
  REQUIRE(rep.pass_ricci_offtt);
  REQUIRE(rep.pass_ricci_ratio);
  REQUIRE(rep.pass);
  REQUIRE(rep.ricci_ratio == Catch::Approx(-3.0).margin(1e-8));

  // constant f is rejected up front
  const MetricData degenerate(PeriodicGridFunction::constant(1.0, 1.0, 64), {0.5, -0.5},
                              InnerSpace({1, 1}));
  REQUIRE_THROWS_AS(ecs_certificate(degenerate, sample_points(degenerate, 4, 1)),
                    std::invalid_argument);
}

TEST_CASE("isometry residuals") {
  const Flagship& fs = flagship();
  const auto pts = sample_points(fs.metric, 25, 4242);

  // s-translation leaves the metric untouched
  REQUIRE(isometry_residual(fs.metric, GroupElement::central(fs.ctx, 1.0), pts) < 1e-10);

  // t-translation by the period
  const GroupElement shift =
      GroupElement::make(fs.ctx, 1, 0.0, Eigen::VectorXd::Zero(fs.ctx->system().state_dim()));
  REQUIRE(isometry_residual(fs.metric, shift, pts) < 1e-7);

  // generic elements act by isometries
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> kk(-1, 2);
  for (int rep = 0; rep < 4; ++rep) {
    Eigen::VectorXd z(fs.ctx->system().state_dim());
    for (int i = 0; i < z.size(); ++i) z[i] = u(rng);
    const GroupElement g = GroupElement::make(fs.ctx, kk(rng), u(rng), z);
    REQUIRE(isometry_residual(fs.metric, g, pts) < 1e-7);
  }
}
