#pragma once
// specsolve.hpp — cubic root isolation and Newton inversion of the spectrum map.
//
// For integers 2 <= k < l <= k^2/4 the polynomial
// P(t) = -t^3 + k t^2 - l t + 1 has three distinct real roots bracketed by
// 1/l < lambda < 1 < mu < k/2 < nu < k; the roots multiply to 1.  The inverse
// problem takes a multiplier triple and finds a one-harmonic slice
// x(t) = x0 + eta*cos(2 pi t / p) together with (r, s) whose spectrum matches
// the target, by damped Newton iteration on the three quadratures.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ecsq/septuple.hpp"
#include "ecsq/tolerances.hpp"

namespace ecsq {

struct CubicSpec {
  std::int64_t k;
  std::int64_t l;
  SpecTriple roots;
};

namespace detail {

inline double cubic_p(std::int64_t k, std::int64_t l, double t) {
  return -t * t * t + static_cast<double>(k) * t * t - static_cast<double>(l) * t + 1.0;
}

inline double cubic_dp(std::int64_t k, std::int64_t l, double t) {
  return -3.0 * t * t + 2.0 * static_cast<double>(k) * t - static_cast<double>(l);
}

// Bisection on a sign-change bracket, then Newton polish.
inline double cubic_root_in(std::int64_t k, std::int64_t l, double lo, double hi) {
  double flo = cubic_p(k, l, lo);
  if (!(flo * cubic_p(k, l, hi) < 0.0))
    throw std::runtime_error("cubic_root_in: bracket does not change sign");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = cubic_p(k, l, mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 8; ++it) t -= cubic_p(k, l, t) / cubic_dp(k, l, t);
  return t;
}

}  // namespace detail

inline CubicSpec cubic_roots(std::int64_t k, std::int64_t l) {
  if (!(2 <= k && k < l && 4 * l <= k * k))
    throw std::invalid_argument("cubic_roots: requires 2 <= k < l <= k^2/4");
  const double kd = static_cast<double>(k);
  const double ld = static_cast<double>(l);
  const double lambda = detail::cubic_root_in(k, l, 1.0 / ld, 1.0);
  const double mu = detail::cubic_root_in(k, l, 1.0, kd / 2.0);
  const double nu = detail::cubic_root_in(k, l, kd / 2.0, kd);
  const CubicSpec out{k, l, SpecTriple{lambda, mu, nu}};
  const double prod = lambda * mu * nu;
  const double sum = lambda + mu + nu;
  const double pair = lambda * mu + lambda * nu + mu * nu;
  if (!(std::abs(prod - 1.0) < tol::kRootProduct))
    throw std::runtime_error("cubic_roots: product of roots deviates from 1");
  if (!(std::abs(sum - kd) < tol::kRootSum && std::abs(pair - ld) < tol::kRootSum))
    throw std::runtime_error("cubic_roots: symmetric functions deviate from (k, l)");
  return out;
}

struct InequalityCheck {
  std::string name;
  double margin;  // positive means satisfied
  bool pass;
};

struct LmnReport {
  std::vector<InequalityCheck> checks;
  bool pass;
};

// Margins for the multiplier inequalities
//   0 < lambda < mu < nu,  lambda < 1 < nu,  lambda*mu < 1 < mu*nu,  lambda*nu != 1.
inline LmnReport verify_lmn(const SpecTriple& t) {
  LmnReport rep;
  const auto add = [&rep](const std::string& name, double margin) {
    rep.checks.push_back({name, margin, margin > 0.0});
  };
  add("lambda_positive", t.lambda);
  add("lambda_lt_mu", t.mu - t.lambda);
  add("mu_lt_nu", t.nu - t.mu);
  add("lambda_lt_one", 1.0 - t.lambda);
  add("one_lt_nu", t.nu - 1.0);
  add("lambda_mu_lt_one", 1.0 - t.lambda * t.mu);
  add("one_lt_mu_nu", t.mu * t.nu - 1.0);
  const double excl = std::abs(t.lambda * t.nu - 1.0);
  rep.checks.push_back({"lambda_nu_ne_one", excl, excl > tol::kLambdaNuExcluded});
  rep.pass = true;
  for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
  return rep;
}

// Constant-chart preimage of a multiplier triple:
//   alpha = -log(lambda)/p, beta = -log(mu)/p, gamma = -log(nu)/p,
//   r = alpha^2 - beta^2, s = gamma^2 - beta^2, x0 = log((beta-gamma)/(alpha-beta)).
struct ConstantGuess {
  double x0;
  double r;
  double s;
};

inline ConstantGuess constant_slice_guess(const SpecTriple& target, double p) {
  const double alpha = -std::log(target.lambda) / p;
  const double beta = -std::log(target.mu) / p;
  const double gamma = -std::log(target.nu) / p;
  return ConstantGuess{std::log((beta - gamma) / (alpha - beta)), alpha * alpha - beta * beta,
                       gamma * gamma - beta * beta};
}

namespace detail {

// Log-multipliers of the slice (x0, r, s) by the three quadratures; no
// septuple construction, suitable for the inner Newton loop.
inline Eigen::Vector3d slice_log_spec(double x0, double r, double s, double p, double eta, int n) {
  double delta = 0.0, epsilon = 0.0, zeta = 0.0;
  const double w = kTwoPi / p;
  for (int i = 0; i < n; ++i) {
    const double t = p * i / n;
    const double x = x0 + eta * std::cos(w * t);
    const double xd = -eta * w * std::sin(w * t);
    const double ex = std::exp(x);
    const double emx = std::exp(-x);
    const double rad = std::sqrt(xd * xd + 4.0 * (1.0 + ex) * (r + s * emx));
    delta += rad / (1.0 + ex);
    epsilon += rad / (1.0 + (s / r) * emx);
    zeta += rad / (1.0 + emx);
  }
  const double weight = p / n;
  delta *= weight;
  epsilon *= weight;
  zeta *= weight;
  return Eigen::Vector3d(0.25 * (-delta - epsilon), 0.25 * (delta - epsilon),
                         0.25 * (delta - epsilon + 2.0 * zeta));
}

}  // namespace detail

struct InvertResult {
  XRS xrs;
  double x0;   // slice offset; the slice is x(t) = x0 + eta cos(2 pi t / p)
  double eta;
  int iterations;
  double residual;  // max log-coordinate deviation from the target
  bool converged;
};

// Damped Newton inversion of the spectrum map over the slice x = x0 + eta*cos.
// The three unknowns are (x0, r, s); the Jacobian is forward-difference with
// step 1e-6; steps leaving { r > 0, s > 0, r != s } are halved up to 20 times.
inline InvertResult invert_spec(const SpecTriple& target, double p, double eta,
                                int n = tol::kDefaultGridSize, int max_iter = 30) {
  if (!(p > 0.0)) throw std::invalid_argument("invert_spec: requires p > 0");
  if (eta == 0.0) throw std::invalid_argument("invert_spec: requires eta != 0");
  if (!verify_lmn(target).pass)
    throw std::invalid_argument("invert_spec: target violates the multiplier inequalities");

  const Eigen::Vector3d want(std::log(target.lambda), std::log(target.mu), std::log(target.nu));
  const ConstantGuess g0 = constant_slice_guess(target, p);
  Eigen::Vector3d u(g0.x0, g0.r, g0.s);

  const auto in_domain = [](const Eigen::Vector3d& v) {
    return v[1] > 0.0 && v[2] > 0.0 && std::abs(v[1] - v[2]) > 1e-12;
  };
  if (!in_domain(u)) throw std::runtime_error("invert_spec: initial guess leaves the domain");

  const auto residual_of = [&](const Eigen::Vector3d& v) -> Eigen::Vector3d {
    return detail::slice_log_spec(v[0], v[1], v[2], p, eta, n) - want;
  };

  Eigen::Vector3d F = residual_of(u);
  int iter = 0;
  for (; iter < max_iter && F.cwiseAbs().maxCoeff() >= tol::kNewtonResidual; ++iter) {
    Eigen::Matrix3d J;
    const double h = 1e-6;
    for (int c = 0; c < 3; ++c) {
      Eigen::Vector3d up = u;
      up[c] += h;
      J.col(c) = (residual_of(up) - F) / h;
    }
    const Eigen::Vector3d step = J.partialPivLu().solve(-F);
    double damp = 1.0;
    Eigen::Vector3d next = u + step;
    int halvings = 0;
    while ((!in_domain(next) || !next.allFinite()) && halvings < 20) {
      damp *= 0.5;
      next = u + damp * step;
      ++halvings;
    }
    if (halvings == 20 && !in_domain(next))
      return InvertResult{XRS(PeriodicGridFunction::from_callable(
                                  [&](double t) { return u[0] + eta * std::cos(kTwoPi * t / p); }, p, n),
                              u[1], u[2]),
                          u[0], eta, iter, F.cwiseAbs().maxCoeff(), false};
    u = next;
    F = residual_of(u);
  }

  const double x0 = u[0];
  XRS out(PeriodicGridFunction::from_callable(
              [&](double t) { return x0 + eta * std::cos(kTwoPi * t / p); }, p, n),
          u[1], u[2]);
  return InvertResult{out, x0, eta, iter, F.cwiseAbs().maxCoeff(),
                      F.cwiseAbs().maxCoeff() < tol::kNewtonResidual};
}

}  // namespace ecsq
