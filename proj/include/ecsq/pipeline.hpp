#pragma once
// pipeline.hpp — end-to-end construction of the compact-quotient data and its
// machine-checkable certificate, plus the dimension-4 obstruction demo.
//
// Stage order: cubic roots -> multiplier inequalities -> spectrum inversion ->
// septuple assembly -> diagonal operator path and solution spaces ->
// monodromy and symplectic identities -> companion lattice -> criterion
// checks -> group axioms and equivariance -> curvature certificate ->
// isometry suite.  A failing stage marks every later stage as skipped;
// skipped sections fail the overall verdict.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ecsq/certificate.hpp"
#include "ecsq/geometry.hpp"
#include "ecsq/groupg.hpp"
#include "ecsq/odespace.hpp"
#include "ecsq/periodic.hpp"
#include "ecsq/septuple.hpp"
#include "ecsq/specsolve.hpp"
#include "ecsq/tolerances.hpp"

namespace ecsq {

struct BuildConfig {
  int j = 1;
  double p = 1.0;
  std::int64_t k = 5;
  std::int64_t l = 6;
  std::vector<std::array<int, 3>> signs;  // per 3-block; empty means all +1
  double theta = 1.0;
  double eta = 0.3;
  int grid_n = tol::kDefaultGridSize;
  std::uint64_t seed = 42;
  int max_newton_iter = 30;

  // sample counts
  int ecs_points = 50;
  int isometry_elements = 10;
  int isometry_points = 100;
  int group_triples = 1000;
  int equivariance_pairs = 100;
  int omega_pairs = 20;
  double fd_h1 = 1e-2;  // finite-difference oracle step; halved for the ratio test

  int dimension() const { return 3 * j + 2; }

  std::vector<int> sign_pattern() const {
    std::vector<int> out;
    for (int blk = 0; blk < j; ++blk)
      for (int i = 0; i < 3; ++i)
        out.push_back(signs.empty() ? 1 : signs[static_cast<std::size_t>(blk)][static_cast<std::size_t>(i)]);
    return out;
  }

  void validate() const {
    if (j < 1) throw std::invalid_argument("config: requires j >= 1");
    if (!(p > 0.0)) throw std::invalid_argument("config: requires p > 0");
    if (!(2 <= k && k < l && 4 * l <= k * k))
      throw std::invalid_argument("config: requires 2 <= k < l <= k^2/4");
    if (!(theta > 0.0)) throw std::invalid_argument("config: requires theta > 0");
    if (eta == 0.0) throw std::invalid_argument("config: requires eta != 0");
    if (grid_n < 16 || !fft::is_power_of_two(static_cast<std::size_t>(grid_n)))
      throw std::invalid_argument("config: grid size must be a power of two >= 16");
    if (!signs.empty() && static_cast<int>(signs.size()) != j)
      throw std::invalid_argument("config: sign pattern must have one triple per block");
    for (const auto& blk : signs)
      for (int v : blk)
        if (v != 1 && v != -1) throw std::invalid_argument("config: signs must be +1 or -1");
    if (ecs_points < 1 || isometry_elements < 1 || isometry_points < 1 || group_triples < 1 ||
        equivariance_pairs < 1 || omega_pairs < 1)
      throw std::invalid_argument("config: sample counts must be positive");
    if (!(fd_h1 > 0.0)) throw std::invalid_argument("config: fd step must be positive");
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j_out;
    j_out["j"] = j;
    j_out["p"] = p;
    j_out["k"] = k;
    j_out["l"] = l;
    nlohmann::ordered_json s = nlohmann::ordered_json::array();
    for (const auto& blk : signs) s.push_back({blk[0], blk[1], blk[2]});
    j_out["signs"] = std::move(s);
    j_out["theta"] = theta;
    j_out["eta"] = eta;
    j_out["grid_n"] = grid_n;
    j_out["seed"] = seed;
    j_out["max_newton_iter"] = max_newton_iter;
    j_out["ecs_points"] = ecs_points;
    j_out["isometry_elements"] = isometry_elements;
    j_out["isometry_points"] = isometry_points;
    j_out["group_triples"] = group_triples;
    j_out["equivariance_pairs"] = equivariance_pairs;
    j_out["omega_pairs"] = omega_pairs;
    j_out["fd_h1"] = fd_h1;
    return j_out;
  }

  static BuildConfig from_json(const nlohmann::json& j_in) {
    BuildConfig cfg;
    const auto get = [&j_in](const char* key, auto& slot) {
      if (j_in.contains(key)) slot = j_in.at(key).get<std::decay_t<decltype(slot)>>();
    };
    get("j", cfg.j);
    get("p", cfg.p);
    get("k", cfg.k);
    get("l", cfg.l);
    if (j_in.contains("signs")) {
      cfg.signs.clear();
      for (const auto& blk : j_in.at("signs"))
        cfg.signs.push_back({blk.at(0).get<int>(), blk.at(1).get<int>(), blk.at(2).get<int>()});
    }
    get("theta", cfg.theta);
    get("eta", cfg.eta);
    get("grid_n", cfg.grid_n);
    get("seed", cfg.seed);
    get("max_newton_iter", cfg.max_newton_iter);
    get("ecs_points", cfg.ecs_points);
    get("isometry_elements", cfg.isometry_elements);
    get("isometry_points", cfg.isometry_points);
    get("group_triples", cfg.group_triples);
    get("equivariance_pairs", cfg.equivariance_pairs);
    get("omega_pairs", cfg.omega_pairs);
    get("fd_h1", cfg.fd_h1);
    return cfg;
  }
};

// Intermediate objects of a build, exposed for the CLI probes.
struct BuildArtifacts {
  std::optional<CubicSpec> cubic;
  std::optional<InvertResult> inversion;
  std::optional<Septuple> septuple;
  std::optional<DiagonalOperatorPath> path;
  std::optional<FirstOrderSpace> space;
  std::shared_ptr<const GroupContext> context;
  std::optional<MetricData> metric;
  std::optional<IntegerLattice> lattice;
};

namespace detail {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int size, double scale) {
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) v[i] = uniform(rng, -scale, scale);
  return v;
}

inline GroupElement random_element(std::mt19937_64& rng, const std::shared_ptr<const GroupContext>& ctx,
                                   int max_k = 2) {
  const auto k = static_cast<std::int64_t>(std::uniform_int_distribution<int>(-max_k, max_k)(rng));
  const double q = uniform(rng, -1.0, 1.0);
  return GroupElement::make(ctx, k, q, random_vector(rng, ctx->system().state_dim(), 1.0));
}

}  // namespace detail

inline Certificate build_ecs_bundle(const BuildConfig& cfg, BuildArtifacts* artifacts = nullptr) {
  cfg.validate();
  Certificate cert;
  cert.config = cfg.to_json();

  const std::vector<std::string> stage_names = {"roots",   "inverse-spec", "riccati",
                                                "monodromy", "lattice",    "ncsuf",
                                                "group-axioms", "ecs",     "isometry"};
  std::size_t stage_index = 0;
  const auto abort_rest = [&](const std::string& why) {
    cert.sections.back().error = why;
    for (std::size_t i = stage_index + 1; i < stage_names.size(); ++i) {
      auto& s = cert.add_section(stage_names[i]);
      s.skipped = true;
    }
  };

  BuildArtifacts local;
  BuildArtifacts& art = artifacts ? *artifacts : local;
  const InnerSpace inner(cfg.sign_pattern());
  std::shared_ptr<const GroupContext> ctx;

  for (; stage_index < stage_names.size(); ++stage_index) {
    auto& sec = cert.add_section(stage_names[stage_index]);
    try {
      switch (stage_index) {
        case 0: {  // roots
          art.cubic = cubic_roots(cfg.k, cfg.l);
          const auto& r = art.cubic->roots;
          const double kd = static_cast<double>(cfg.k), ld = static_cast<double>(cfg.l);
          sec.require_gt("bracket_lambda_low", r.lambda - 1.0 / ld, 0.0);
          sec.require_gt("bracket_lambda_high", 1.0 - r.lambda, 0.0);
          sec.require_gt("bracket_mu_low", r.mu - 1.0, 0.0);
          sec.require_gt("bracket_mu_high", kd / 2.0 - r.mu, 0.0);
          sec.require_gt("bracket_nu_low", r.nu - kd / 2.0, 0.0);
          sec.require_gt("bracket_nu_high", kd - r.nu, 0.0);
          sec.require_lt("product_minus_one", std::abs(r.lambda * r.mu * r.nu - 1.0), tol::kRootProduct);
          sec.require_lt("sum_minus_k", std::abs(r.lambda + r.mu + r.nu - kd), tol::kRootSum);
          sec.require_lt("pair_sum_minus_l",
                         std::abs(r.lambda * r.mu + r.lambda * r.nu + r.mu * r.nu - ld), tol::kRootSum);
          for (const auto& c : verify_lmn(r).checks) {
            sec.entries.push_back({"lmn_" + c.name, c.margin, 0.0, "gt", c.pass});
          }
          break;
        }
        case 1: {  // inverse-spec
          art.inversion = invert_spec(art.cubic->roots, cfg.p, cfg.eta, cfg.grid_n, cfg.max_newton_iter);
          sec.require_true("newton_converged", art.inversion->converged);
          sec.require_lt("newton_iterations", static_cast<double>(art.inversion->iterations),
                         static_cast<double>(cfg.max_newton_iter) + 0.5);
          sec.require_lt("spec_residual", art.inversion->residual, tol::kNewtonResidual);
          if (!art.inversion->converged) throw std::runtime_error("Newton iteration stagnated");
          const SpecResult full = spec_of(art.inversion->xrs);
          sec.require_lt("two_path_disagreement", full.path_disagreement, tol::kSpecTwoPathCertified);
          sec.info("delta", full.delta);
          sec.info("epsilon", full.epsilon);
          sec.info("zeta", full.zeta);
          break;
        }
        case 2: {  // riccati
          const auto& xrs = art.inversion->xrs;
          const RhoSigmaJet jet = slice_rho_sigma_jet(art.inversion->x0, art.inversion->eta,
                                                      xrs.r(), xrs.s(), cfg.p, cfg.grid_n);
          sec.require_gt("rho_min", jet.rho.min_value(), 0.0);
          sec.require_gt("sigma_min", jet.sigma.min_value(), 0.0);
          // closed-form jet vs the generic spectral chart
          const auto rs = xrs_to_rho_sigma(xrs);
          sec.require_lt("chart_two_route", std::max((rs.rho - jet.rho).max_abs(),
                                                     (rs.sigma - jet.sigma).max_abs()),
                         tol::kRoundTrip);
          sec.require_lt("compatibility_ode",
                         compatibility_residual(jet.rho, jet.sigma, xrs.r(), xrs.s()),
                         tol::kCompatibilityOde);
          sec.require_lt("beta_two_route", beta_route_deviation(jet.rho, jet.sigma, xrs.r(), xrs.s()),
                         tol::kBetaTwoRoute);
          art.septuple = rho_sigma_to_septuple(jet, xrs.r(), xrs.s());
          sec.require_lt("riccati_residual", art.septuple->riccati_residual(), tol::kRiccatiResidual);
          sec.require_gt("nonconstancy_margin", art.septuple->nonconstancy_margin(),
                         tol::kNonconstancyMargin);
          const XRS back = septuple_to_xrs(*art.septuple);
          const double round_trip = std::max({(back.x() - xrs.x()).max_abs(),
                                              std::abs(back.r() - xrs.r()),
                                              std::abs(back.s() - xrs.s())});
          sec.require_lt("xrs_round_trip", round_trip, tol::kRoundTrip);
          break;
        }
        case 3: {  // monodromy and symplectic identities
          art.path = DiagonalOperatorPath::from_septuple_blocks(*art.septuple, cfg.j);
          art.space = FirstOrderSpace(*art.path);
          const Eigen::MatrixXd t_diag = translation_operator(*art.space);
          const Eigen::MatrixXd t_rk4 = translation_operator_rk4(*art.path, 4 * cfg.grid_n);
          double tr_b = 0.0;
          for (int i = 0; i < art.path->dim(); ++i) tr_b += art.path->b(i).integrate_period();
          sec.require_lt("det_vs_trace_integral",
                         std::abs(t_rk4.determinant() - std::exp(-tr_b)), tol::kDetTwoPath);
          sec.require_lt("closed_form_vs_rk4", (t_diag - t_rk4).cwiseAbs().maxCoeff(),
                         tol::kDetTwoPath);
          sec.require_lt("det_minus_one", std::abs(t_diag.determinant() - 1.0), tol::kDetUnimodular);
          sec.require_gt("evaluation_min_singular_value", art.space->min_evaluation_singular_value(),
                         tol::kEvaluationSingularValue);
          {
            Eigen::VectorXd ones = Eigen::VectorXd::Ones(art.path->dim());
            const Eigen::VectorXd closed = solve_first_order(*art.space, ones, cfg.p);
            const Eigen::VectorXd rk4 = solve_first_order_rk4(*art.path, ones, cfg.p, cfg.grid_n);
            sec.require_lt("first_order_two_route",
                           ((closed - rk4).cwiseAbs().cwiseQuotient(closed.cwiseAbs())).maxCoeff(),
                           1e-7);
          }

          const SecondOrderSystem sys(art.septuple->f(), art.path->a_entries());
          ctx = std::make_shared<const GroupContext>(sys, inner, *art.space);
          art.context = ctx;

          std::mt19937_64 rng(cfg.seed);
          double max_const = 0.0, max_tinv = 0.0;
          for (int i = 0; i < cfg.omega_pairs; ++i) {
            const Eigen::VectorXd z1 = detail::random_vector(rng, sys.state_dim(), 1.0);
            const Eigen::VectorXd z2 = detail::random_vector(rng, sys.state_dim(), 1.0);
            max_const = std::max(max_const, omega(sys, z1, z2, inner).constancy_residual);
            const double before = omega_at_zero(inner, z1, z2);
            const double after = omega_at_zero(inner, sys.translate(z1, 1), sys.translate(z2, 1));
            max_tinv = std::max(max_tinv, std::abs(after - before));
          }
          sec.require_lt("omega_constancy", max_const, tol::kOmegaConstancy);
          sec.require_lt("omega_translation_invariance", max_tinv, tol::kOmegaInvariance);
          sec.require_lt("lagrangian_residual", lagrangian_residual(*art.space, inner),
                         tol::kLagrangian);
          break;
        }
        case 4: {  // lattice
          const Eigen::Matrix3d cob = companion_basis(art.cubic->roots, cfg.k, cfg.l);
          const Eigen::Vector3d mult(art.space->multipliers()[0] /* j = 1 block equals any block */,
                                     art.space->multipliers()[1], art.space->multipliers()[2]);
          const Eigen::Matrix3d conj = cob * mult.asDiagonal() * cob.inverse();
          sec.require_lt("companion_conjugation",
                         (conj - companion_matrix(cfg.k, cfg.l)).cwiseAbs().maxCoeff(),
                         tol::kLatticeInteger);
          const FirstOrderSpace block(DiagonalOperatorPath::from_septuple_blocks(*art.septuple, 1));
          art.lattice = build_lattice(cfg.j, block, cob);
          sec.require_lt("integer_residual", art.lattice->integer_residual, tol::kLatticeInteger);
          sec.require_lt("det_error", art.lattice->det_error, tol::kDetUnimodular);
          sec.require_gt("basis_det", std::abs(art.lattice->basis.determinant()), tol::kLatticeSpan);
          break;
        }
        case 5: {  // ncsuf
          const SigmaLattice sigma(cfg.theta, *art.lattice);
          const Eigen::VectorXd phi = Eigen::VectorXd::Zero(art.space->dim());
          const NcsufReport rep = check_ncsuf(*art.space, inner, sigma, phi);
          sec.require_true("a_intersection", rep.intersection_pass);
          sec.require_lt("b_integer_residual", rep.monodromy_integer_residual, tol::kLatticeInteger);
          sec.require_lt("b_det_error", rep.monodromy_det_error, tol::kDetUnimodular);
          sec.require_lt("b_phi_residual", rep.phi_lattice_residual, tol::kLagrangian);
          sec.require_lt("c_max_omega", rep.max_generator_omega, tol::kLagrangian);
          sec.require_true("pass", rep.pass);
          break;
        }
        case 6: {  // group-axioms
          std::mt19937_64 rng(cfg.seed + 1);
          const GroupElement id = GroupElement::identity(ctx);
          double assoc = 0.0, inv_res = 0.0, central_res = 0.0, power_res = 0.0, conj_res = 0.0,
                 comm_res = 0.0;
          bool fibration_exact = true;
          for (int i = 0; i < cfg.group_triples; ++i) {
            const GroupElement g1 = detail::random_element(rng, ctx);
            const GroupElement g2 = detail::random_element(rng, ctx);
            const GroupElement g3 = detail::random_element(rng, ctx);
            assoc = std::max(assoc, element_distance(multiply(multiply(g1, g2), g3),
                                                     multiply(g1, multiply(g2, g3))));
            inv_res = std::max(inv_res, element_distance(multiply(g1, inverse(g1)), id));
            inv_res = std::max(inv_res, element_distance(inverse(inverse(g1)), g1));

            const double r = detail::uniform(rng, -1.0, 1.0);
            const GroupElement central = GroupElement::central(ctx, r);
            const GroupElement left = multiply(central, g1);
            const GroupElement right = multiply(g1, central);
            central_res = std::max(central_res, element_distance(left, right));
            const GroupElement expected =
                GroupElement::make(ctx, g1.k(), g1.q() + r, g1.state());  // (k, q+r, u)
            central_res = std::max(central_res, element_distance(right, expected));

            // (0,r,0)^l (k,q,u) = (k, q + l r, u)
            const int l_pow = 3;
            GroupElement acc = g1;
            for (int t = 0; t < l_pow; ++t) acc = multiply(central, acc);
            const GroupElement acc_expected = multiply(GroupElement::central(ctx, l_pow * r), g1);
            power_res = std::max(power_res, element_distance(acc, acc_expected));

            // conjugation of a central-fibre element: g (0,r,w) g^-1 = (0, r - 2 Omega(u,w), T^k w)
            const Eigen::VectorXd w = detail::random_vector(rng, ctx->system().state_dim(), 1.0);
            const GroupElement grw = GroupElement::make(ctx, 0, r, w);
            const GroupElement conj = multiply(multiply(g1, grw), inverse(g1));
            const GroupElement conj_expected =
                GroupElement::make(ctx, 0, r - 2.0 * ctx->omega0(g1.state(), w),
                                   ctx->system().translate(w, g1.k()));
            conj_res = std::max(conj_res, element_distance(conj, conj_expected));

            // commutator of two fibre elements: (0, 2 Omega(w,u), 0)
            const GroupElement gu = GroupElement::make(ctx, 0, g1.q(), g1.state() * 0.5);
            const GroupElement commutator =
                multiply(multiply(multiply(gu, grw), inverse(gu)), inverse(grw));
            const GroupElement comm_expected =
                GroupElement::central(ctx, 2.0 * ctx->omega0(w, gu.state()));
            comm_res = std::max(comm_res, element_distance(commutator, comm_expected));

            if (i < 32) {
              PointM x{detail::uniform(rng, 0.0, cfg.p), detail::uniform(rng, -1.0, 1.0),
                       detail::random_vector(rng, ctx->dim(), 2.0)};
              const PointM y = act_on_m(g1, x);
              fibration_exact =
                  fibration_exact && (y.t == x.t + static_cast<double>(g1.k()) * cfg.p);
            }
          }
          sec.require_lt("associativity", assoc, tol::kGroupIdentity);
          sec.require_lt("inverse_identity", inv_res, tol::kGroupIdentity);
          sec.require_lt("central_commutation", central_res, tol::kCentralCommute);
          sec.require_lt("central_power", power_res, tol::kGroupIdentity);
          sec.require_lt("conjugation_identity", conj_res, tol::kGroupIdentity);
          sec.require_lt("commutator_identity", comm_res, tol::kGroupIdentity);
          sec.require_true("t_fibration_exact", fibration_exact);

          double equiv = 0.0;
          for (int i = 0; i < cfg.equivariance_pairs; ++i) {
            const GroupElement g = GroupElement::make(
                ctx, 0, detail::uniform(rng, -1.0, 1.0),
                ctx->l_state(detail::random_vector(rng, ctx->dim(), 1.0)));
            const PointRE y{detail::uniform(rng, 0.0, cfg.p), detail::uniform(rng, -1.0, 1.0),
                            ctx->l_state(detail::random_vector(rng, ctx->dim(), 1.0))};
            const PointM via_re = equivariant_map(*ctx, act_on_re(g, y));
            const PointM via_m = act_on_m(g, equivariant_map(*ctx, y));
            double res = std::max(std::abs(via_re.t - via_m.t), std::abs(via_re.s - via_m.s));
            res = std::max(res, (via_re.v - via_m.v).cwiseAbs().maxCoeff());
            equiv = std::max(equiv, res);
          }
          sec.require_lt("equivariance", equiv, tol::kEquivariance);
          break;
        }
        case 7: {  // ecs
          art.metric = MetricData(art.septuple->f(), art.path->a_entries(), inner);
          const auto pts = sample_points(*art.metric, cfg.ecs_points, cfg.seed + 2);
          const EcsReport rep = ecs_certificate(*art.metric, pts, cfg.fd_h1, cfg.fd_h1 / 2.0);
          sec.require_lt("nabla_weyl", rep.max_nabla_weyl, tol::kNablaWeyl);
          sec.require_gt("fd_halving_ratio_min", rep.fd_ratio_min, tol::kHalvingRatioLow);
          sec.require_lt("fd_halving_ratio_max", rep.fd_ratio_max, tol::kHalvingRatioHigh);
          sec.require_gt("weyl_to_riemann", rep.min_weyl_to_riemann, tol::kWeylNonzeroRel);
          sec.require_gt("nabla_riemann_rel", rep.max_nabla_riemann_rel, tol::kNablaRiemannNonzeroRel);
          sec.require_lt("ricci_recurrence_minor", rep.max_recurrence_minor, tol::kRicciRecurrence);
          sec.require_lt("nabla_dt", rep.max_nabla_dt, tol::kNablaDt);
          sec.require_lt("ricci_off_tt", rep.max_ricci_offtt, tol::kRicciOffTT);
          sec.require_lt("ricci_ratio_spread", rep.ricci_ratio_spread, tol::kRicciRatioConstancy);
          sec.info("ricci_tt_over_f", rep.ricci_ratio);
          sec.require_lt("riemann_symmetries", rep.max_riemann_symmetry, tol::kRiemannSymmetry);
          sec.require_lt("weyl_trace_free", rep.max_weyl_trace, tol::kWeylTraceFree);
          sec.require_gt("mode_agreement_ratio", rep.riemann_agreement_ratio, tol::kHalvingRatioLow);
          sec.require_lt("mode_agreement_ratio_high", rep.riemann_agreement_ratio,
                         tol::kHalvingRatioHigh);
          sec.info("mode_agreement_h1", rep.riemann_agreement_h1);
          const auto sig = cfg.sign_pattern();
          int plus = 1, minus = 1;  // the dt ds block carries one of each
          for (int v : sig) (v > 0 ? plus : minus) += 1;
          sec.info("signature_plus", plus);
          sec.info("signature_minus", minus);
          break;
        }
        case 8: {  // isometry
          std::mt19937_64 rng(cfg.seed + 3);
          const auto pts = sample_points(*art.metric, cfg.isometry_points, cfg.seed + 4);
          double worst = 0.0;
          worst = std::max(worst, isometry_residual(*art.metric, GroupElement::central(ctx, 1.0), pts));
          worst = std::max(
              worst, isometry_residual(
                         *art.metric,
                         GroupElement::make(ctx, 1, 0.0,
                                            Eigen::VectorXd::Zero(ctx->system().state_dim())),
                         pts));
          for (int i = 0; i < cfg.isometry_elements; ++i)
            worst = std::max(worst,
                             isometry_residual(*art.metric, detail::random_element(rng, ctx), pts));
          sec.require_lt("pullback_residual", worst, tol::kIsometry);
          break;
        }
      }
    } catch (const std::exception& ex) {
      abort_rest(ex.what());
      return cert;
    }
    if (!cert.sections.back().pass()) {
      abort_rest("stage checks failed");
      return cert;
    }
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Dimension-4 obstruction demo.

inline Certificate dim4_demo(const PeriodicGridFunction& rho, double r,
                             const std::string& rho_label = "", std::uint64_t seed = 42) {
  if (r == 0.0) throw std::invalid_argument("dim4: requires r != 0 (A would vanish)");
  Certificate cert;
  cert.config["rho"] = rho_label.empty() ? "custom" : rho_label;
  cert.config["r"] = r;
  cert.config["p"] = rho.period();
  cert.config["grid_n"] = rho.size();
  cert.config["seed"] = seed;

  auto& sec = cert.add_section("dim4");
  try {
    const Dim4Result res = dim4_obstruction(rho, r);
    sec.info("det_t", res.det_t);
    sec.require_lt("det_two_route_gap", std::abs(res.det_t - res.det_t_direct), 1e-12);
    sec.require_gt("margin_from_unit", res.margin, tol::kDim4Margin);
    sec.require_lt("riccati_residual", res.riccati_residual, tol::kRiccatiResidual);

    double worst = traceless_square_residual(Eigen::Matrix2d::Identity());
    Eigen::Matrix2d nilpotent;
    nilpotent << 0.0, 1.0, 0.0, 0.0;
    worst = std::max(worst, traceless_square_residual(nilpotent));
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 20; ++i) {
      Eigen::Matrix2d f;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) f(a, b) = detail::uniform(rng, -10.0, 10.0);
      worst = std::max(worst, traceless_square_residual(f));
    }
    sec.require_lt("traceless_square_identity", worst, 1e-12);
  } catch (const std::exception& ex) {
    sec.error = ex.what();
  }
  return cert;
}

// Preset or coefficient-list periodic function for the dim4 demo:
// "2+cos" gives 2 + cos(2 pi t / p); otherwise a comma-separated list
// a0,a1,b1,a2,b2,... encodes a0 + sum_m (a_m cos(2 pi m t/p) + b_m sin(...)).
inline PeriodicGridFunction parse_rho(const std::string& ss, double p, int n) {
  if (ss == "2+cos")
    return PeriodicGridFunction::from_callable(
        [p](double t) { return 2.0 + std::cos(kTwoPi * t / p); }, p, n);
  std::vector<double> coeff;
  std::size_t pos = 0;
  while (pos < ss.size()) {
    std::size_t next = ss.find(',', pos);
    if (next == std::string::npos) next = ss.size();
    coeff.push_back(std::stod(ss.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (coeff.empty()) throw std::invalid_argument("parse_rho: empty coefficient list");
  return PeriodicGridFunction::from_callable(
      [coeff, p](double t) {
        double acc = coeff[0];
        for (std::size_t m = 1; 2 * m - 1 < coeff.size(); ++m) {
          acc += coeff[2 * m - 1] * std::cos(kTwoPi * static_cast<double>(m) * t / p);
          if (2 * m < coeff.size()) acc += coeff[2 * m] * std::sin(kTwoPi * static_cast<double>(m) * t / p);
        }
        return acc;
      },
      p, n);
}

}  // namespace ecsq
