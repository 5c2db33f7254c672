#pragma once
// septuple.hpp — the periodic Riccati family and its coordinate systems.
//
// A septuple consists of p-periodic functions alpha > beta > gamma, a source
// function f, and trace-free constants a, b, c (c is stored implicitly as
// -a-b so the constraint a+b+c = 0 is exact) solving the coupled system
//
//    alpha' + alpha^2 = f + a,   beta' + beta^2 = f + b,   gamma' + gamma^2 = f + c,
//
// with b the smallest of the three constants and a != c.  Two equivalent
// charts are provided:
//
//   (rho, sigma, r, s):  rho = alpha - beta > 0, sigma = beta - gamma > 0,
//                        r = a - b > 0, s = c - b > 0, r != s, subject to the
//                        balance ODE  d/dt log(sigma/rho) =
//                        rho + sigma - r/rho - s/sigma;
//
//   (x, r, s):           x = log(sigma/rho) unconstrained periodic, with
//                        2 rho = (1+e^x)^{-1} [x' + sqrt(x'^2 +
//                        4(1+e^x)(r + s e^{-x}))]  (positive branch).
//
// The spectrum map sends a septuple to the multiplier triple
// (lambda, mu, nu) = (e^{-I[alpha]}, e^{-I[beta]}, e^{-I[gamma]}), where I[.]
// is the integral over one period.  In the (x, r, s) chart the same triple is
// produced by three quadratures (delta, epsilon, zeta) through
// (4 log lambda, 4 log mu, 4 log nu) = (-delta-epsilon, delta-epsilon,
// delta-epsilon+2 zeta); both routes are evaluated and compared.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "ecsq/periodic.hpp"
#include "ecsq/tolerances.hpp"

namespace ecsq {

struct SpecTriple {
  double lambda;
  double mu;
  double nu;
};

class Septuple {
 public:
  Septuple(PeriodicGridFunction alpha, PeriodicGridFunction beta, PeriodicGridFunction gamma,
           PeriodicGridFunction f, double a, double b)
      : alpha_(std::move(alpha)),
        beta_(std::move(beta)),
        gamma_(std::move(gamma)),
        f_(std::move(f)),
        a_(a),
        b_(b) {
    const double cc = c();
    if (!(b_ < a_)) throw std::invalid_argument("Septuple: requires b < a");
    if (!(b_ < cc)) throw std::invalid_argument("Septuple: requires b < c");
    if (a_ == cc) throw std::invalid_argument("Septuple: requires a != c");
    for (int i = 0; i < alpha_.size(); ++i) {
      if (!(alpha_.samples()[static_cast<std::size_t>(i)] > beta_.samples()[static_cast<std::size_t>(i)] &&
            beta_.samples()[static_cast<std::size_t>(i)] > gamma_.samples()[static_cast<std::size_t>(i)]))
        throw std::invalid_argument("Septuple: requires alpha > beta > gamma pointwise");
    }
    const double res = riccati_residual();
    if (!(res < tol::kRiccatiResidual))
      throw std::invalid_argument("Septuple: Riccati residual " + std::to_string(res) +
                                  " exceeds tolerance");
  }

  const PeriodicGridFunction& alpha() const { return alpha_; }
  const PeriodicGridFunction& beta() const { return beta_; }
  const PeriodicGridFunction& gamma() const { return gamma_; }
  const PeriodicGridFunction& f() const { return f_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return -a_ - b_; }
  double period() const { return f_.period(); }

  // max-norm of the three Riccati residuals over the grid
  double riccati_residual() const {
    const auto res = [this](const PeriodicGridFunction& g, double k) {
      return (g.derivative() + g * g - f_ - k).max_abs();
    };
    return std::max({res(alpha_, a_), res(beta_, b_), res(gamma_, c())});
  }

  double nonconstancy_margin() const { return f_.max_value() - f_.min_value(); }

 private:
  PeriodicGridFunction alpha_, beta_, gamma_, f_;
  double a_, b_;
};

class XRS {
 public:
  XRS(PeriodicGridFunction x, double r, double s) : x_(std::move(x)), r_(r), s_(s) {
    if (!(r_ > 0.0)) throw std::invalid_argument("XRS: requires r > 0");
    if (!(s_ > 0.0)) throw std::invalid_argument("XRS: requires s > 0");
    if (r_ == s_) throw std::invalid_argument("XRS: requires r != s");
  }

  const PeriodicGridFunction& x() const { return x_; }
  double r() const { return r_; }
  double s() const { return s_; }
  double period() const { return x_.period(); }

 private:
  PeriodicGridFunction x_;
  double r_, s_;
};

struct RhoSigma {
  PeriodicGridFunction rho;
  PeriodicGridFunction sigma;
};

// Residual of the balance ODE coupling the two halves of the system:
// max | d/dt log(sigma/rho) - (rho + sigma - r/rho - s/sigma) |.
inline double compatibility_residual(const PeriodicGridFunction& rho,
                                     const PeriodicGridFunction& sigma, double r, double s) {
  const auto log_ratio = (sigma / rho).apply([](double v) { return std::log(v); });
  const auto rhs = rho + sigma - r * rho.apply([](double v) { return 1.0 / v; }) -
                   s * sigma.apply([](double v) { return 1.0 / v; });
  return (log_ratio.derivative() - rhs).max_abs();
}

// (rho, sigma) together with exact first derivatives; used when the chart
// functions are known in closed form, so that only a single spectral
// differentiation (inside f = alpha' + alpha^2 - a) touches the grid.  Two
// chained spectral derivatives would amplify sample roundoff by (2 pi m)^2 at
// mode m and leave a noise tail that high-order finite differencing sees.
struct RhoSigmaJet {
  PeriodicGridFunction rho;
  PeriodicGridFunction rho_dot;
  PeriodicGridFunction sigma;
  PeriodicGridFunction sigma_dot;
};

// Closed-form jet of the one-harmonic slice x = x0 + eta cos(2 pi t / p).
inline RhoSigmaJet slice_rho_sigma_jet(double x0, double eta, double r, double s, double p,
                                       int n = tol::kDefaultGridSize) {
  const double w = kTwoPi / p;
  std::vector<double> rho_v(static_cast<std::size_t>(n)), rho_dot_v(static_cast<std::size_t>(n)),
      sigma_v(static_cast<std::size_t>(n)), sigma_dot_v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = p * i / n;
    const double x = x0 + eta * std::cos(w * t);
    const double xd = -eta * w * std::sin(w * t);
    const double xdd = -eta * w * w * std::cos(w * t);
    const double e = std::exp(x);
    const double u = 1.0 + e;
    const double ww = r + s * std::exp(-x);
    const double disc = xd * xd + 4.0 * u * ww;
    if (!(disc > 0.0)) throw std::invalid_argument("slice_rho_sigma_jet: non-positive discriminant");
    const double rad = std::sqrt(disc);
    const double u_dot = e * xd;
    const double w_dot = (r - ww) * xd;  // d/dt (s e^{-x})
    const double rad_dot = (2.0 * xd * xdd + 4.0 * (u_dot * ww + u * w_dot)) / (2.0 * rad);
    const double rho = (xd + rad) / (2.0 * u);
    const double rho_dot = ((xdd + rad_dot) * u - (xd + rad) * u_dot) / (2.0 * u * u);
    rho_v[static_cast<std::size_t>(i)] = rho;
    rho_dot_v[static_cast<std::size_t>(i)] = rho_dot;
    sigma_v[static_cast<std::size_t>(i)] = e * rho;
    sigma_dot_v[static_cast<std::size_t>(i)] = e * (xd * rho + rho_dot);
  }
  return RhoSigmaJet{PeriodicGridFunction(std::move(rho_v), p), PeriodicGridFunction(std::move(rho_dot_v), p),
                     PeriodicGridFunction(std::move(sigma_v), p),
                     PeriodicGridFunction(std::move(sigma_dot_v), p)};
}

// (x, r, s) -> (rho, sigma); positive square-root branch, so rho > 0.
inline RhoSigma xrs_to_rho_sigma(const XRS& in) {
  const auto& x = in.x();
  const auto xd = x.derivative();
  const auto ex = x.apply([](double v) { return std::exp(v); });
  const auto emx = x.apply([](double v) { return std::exp(-v); });
  const auto disc = xd * xd + 4.0 * ((1.0 + ex) * (in.r() + in.s() * emx));
  if (!(disc.min_value() > 0.0))
    throw std::invalid_argument("xrs_to_rho_sigma: non-positive discriminant");
  const auto radical = disc.apply([](double v) { return std::sqrt(v); });
  const auto rho = 0.5 * ((xd + radical) / (1.0 + ex));
  return RhoSigma{rho, ex * rho};
}

// (rho, sigma, r, s) -> septuple via
//   a = (2r-s)/3, b = -(r+s)/3, c = (2s-r)/3,
//   2 alpha =  rho + (r - rho')/rho,
//   2 beta  = -rho + (r - rho')/rho   ( = sigma + (-s - sigma')/sigma ),
//   2 gamma = -sigma - (s + sigma')/sigma,
//   f = alpha' + alpha^2 - a.
inline Septuple rho_sigma_to_septuple(const PeriodicGridFunction& rho,
                                      const PeriodicGridFunction& rho_dot,
                                      const PeriodicGridFunction& sigma,
                                      const PeriodicGridFunction& sigma_dot, double r, double s) {
  if (!(rho.min_value() > 0.0 && sigma.min_value() > 0.0))
    throw std::invalid_argument("rho_sigma_to_septuple: rho, sigma must be positive");
  const auto inv_rho = 1.0 / rho;
  const auto inv_sigma = 1.0 / sigma;
  const double compat =
      (sigma_dot * inv_sigma - rho_dot * inv_rho - (rho + sigma - r * inv_rho - s * inv_sigma))
          .max_abs();
  if (!(compat < tol::kCompatibilityOde))
    throw std::invalid_argument("rho_sigma_to_septuple: balance ODE residual " +
                                std::to_string(compat) + " exceeds tolerance");
  const double a = (2.0 * r - s) / 3.0;
  const double b = -(r + s) / 3.0;
  const auto common_rho = (r - rho_dot) * inv_rho;
  const auto common_sigma = ((-s) - sigma_dot) * inv_sigma;
  const auto alpha = 0.5 * (rho + common_rho);
  const auto beta = 0.5 * (common_rho - rho);
  const auto beta_other = 0.5 * (sigma + common_sigma);
  const double beta_dev = (beta - beta_other).max_abs();
  if (!(beta_dev < tol::kBetaTwoRoute))
    throw std::invalid_argument("rho_sigma_to_septuple: two beta routes disagree by " +
                                std::to_string(beta_dev));
  const auto gamma = 0.5 * (common_sigma - sigma);
  const auto f = alpha.derivative() + alpha * alpha - a;
  return Septuple(alpha, beta, gamma, f, a, b);
}

inline Septuple rho_sigma_to_septuple(const PeriodicGridFunction& rho,
                                      const PeriodicGridFunction& sigma, double r, double s) {
  return rho_sigma_to_septuple(rho, rho.derivative(), sigma, sigma.derivative(), r, s);
}

inline Septuple rho_sigma_to_septuple(const RhoSigmaJet& jet, double r, double s) {
  return rho_sigma_to_septuple(jet.rho, jet.rho_dot, jet.sigma, jet.sigma_dot, r, s);
}

// Deviation between the two beta routes, exposed for discretization gauging.
inline double beta_route_deviation(const PeriodicGridFunction& rho,
                                   const PeriodicGridFunction& sigma, double r, double s) {
  const auto via_rho = 0.5 * ((r - rho.derivative()) / rho - rho);
  const auto via_sigma = 0.5 * (sigma + ((-s) - sigma.derivative()) / sigma);
  return (via_rho - via_sigma).max_abs();
}

inline XRS septuple_to_xrs(const Septuple& in) {
  const auto rho = in.alpha() - in.beta();
  const auto sigma = in.beta() - in.gamma();
  const auto x = (sigma / rho).apply([](double v) { return std::log(v); });
  return XRS(x, in.a() - in.b(), in.c() - in.b());
}

// Direct spectrum route: log lambda = -I[alpha], log mu = -I[beta], log nu = -I[gamma].
inline SpecTriple spec_of(const Septuple& in) {
  return SpecTriple{std::exp(-in.alpha().integrate_period()), std::exp(-in.beta().integrate_period()),
                    std::exp(-in.gamma().integrate_period())};
}

struct SpecResult {
  SpecTriple values;
  double delta;
  double epsilon;
  double zeta;
  double path_disagreement;  // max log-coordinate gap between the two routes
};

// Quadrature spectrum route in the (x, r, s) chart, cross-checked against the
// direct route through the septuple.
inline SpecResult spec_of(const XRS& in) {
  const auto& x = in.x();
  const auto xd = x.derivative();
  const auto ex = x.apply([](double v) { return std::exp(v); });
  const auto emx = x.apply([](double v) { return std::exp(-v); });
  const auto radical =
      (xd * xd + 4.0 * ((1.0 + ex) * (in.r() + in.s() * emx))).apply([](double v) {
        return std::sqrt(v);
      });
  const double delta = (radical / (1.0 + ex)).integrate_period();
  const double epsilon = (radical / (1.0 + (in.s() / in.r()) * emx)).integrate_period();
  const double zeta = (radical / (1.0 + emx)).integrate_period();
  const double log_lambda = 0.25 * (-delta - epsilon);
  const double log_mu = 0.25 * (delta - epsilon);
  const double log_nu = 0.25 * (delta - epsilon + 2.0 * zeta);

  const auto [rho, sigma] = xrs_to_rho_sigma(in);
  const SpecTriple direct = spec_of(rho_sigma_to_septuple(rho, sigma, in.r(), in.s()));
  const double gap = std::max({std::abs(log_lambda - std::log(direct.lambda)),
                               std::abs(log_mu - std::log(direct.mu)),
                               std::abs(log_nu - std::log(direct.nu))});
  if (!(gap < tol::kSpecTwoPathHardFail))
    throw std::runtime_error("spec_of: quadrature and direct routes disagree by " +
                             std::to_string(gap));
  return SpecResult{SpecTriple{std::exp(log_lambda), std::exp(log_mu), std::exp(log_nu)}, delta,
                    epsilon, zeta, gap};
}

// Constant member with prescribed alpha > beta > gamma, |beta| < alpha,
// |beta| < -gamma != alpha.  Then f = (alpha^2+beta^2+gamma^2)/3 and the
// constants are a = alpha^2 - f, b = beta^2 - f, c = gamma^2 - f.
inline Septuple constant_septuple(double alpha, double beta, double gamma, double p,
                                  int n = tol::kDefaultGridSize) {
  if (!(alpha > beta && beta > gamma))
    throw std::invalid_argument("constant_septuple: requires alpha > beta > gamma");
  if (!(std::abs(beta) < alpha)) throw std::invalid_argument("constant_septuple: requires |beta| < alpha");
  if (!(std::abs(beta) < -gamma)) throw std::invalid_argument("constant_septuple: requires |beta| < -gamma");
  if (-gamma == alpha) throw std::invalid_argument("constant_septuple: requires -gamma != alpha");
  const double f = (alpha * alpha + beta * beta + gamma * gamma) / 3.0;
  return Septuple(PeriodicGridFunction::constant(alpha, p, n), PeriodicGridFunction::constant(beta, p, n),
                  PeriodicGridFunction::constant(gamma, p, n), PeriodicGridFunction::constant(f, p, n),
                  alpha * alpha - f, beta * beta - f);
}

}  // namespace ecsq
