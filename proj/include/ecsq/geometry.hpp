#pragma once
// geometry.hpp — the metric g = kappa dt^2 + dt ds + h, its curvature stack,
// and the certificates for parallel Weyl tensor, Ricci recurrence and
// isometric group action.
//
// Coordinates are ordered (t, s, v^1, ..., v^m) with m = n-2.  With the
// symmetric-product convention dt ds = (dt (x) ds + ds (x) dt)/2 the matrix of
// g has g_tt = kappa(t, v) = f(t)<v,v> + <Av,v>, g_ts = g_st = 1/2,
// g_ss = 0, and the constant diagonal fibre block h = diag(+-1).  Only g_tt
// varies, and only in (t, v); derivatives of the metric are available in
// closed form (mode `analytic`, using spectral derivatives of f up to third
// order) or by central finite differences of the component function (mode
// `finite_difference`, an independent route with O(h^2) error).
//
// Weyl convention (indices all lowered, R_abcd = g_ae R^e_bcd,
// Ric_bd = g^{ac} R_abcd, S = g^{bd} Ric_bd):
//
//   C_abcd = R_abcd - (g_ac Ric_bd - g_ad Ric_bc + g_bd Ric_ac - g_bc Ric_ad)/(n-2)
//            + S (g_ac g_bd - g_ad g_bc) / ((n-1)(n-2)).

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ecsq/groupg.hpp"
#include "ecsq/odespace.hpp"
#include "ecsq/periodic.hpp"
#include "ecsq/tolerances.hpp"

namespace ecsq {

namespace detail {

struct Tensor3 {
  int n = 0;
  std::vector<double> v;
  Tensor3() = default;
  explicit Tensor3(int n_) : n(n_), v(static_cast<std::size_t>(n_) * n_ * n_, 0.0) {}
  double& operator()(int a, int b, int c) {
    return v[(static_cast<std::size_t>(a) * n + b) * n + c];
  }
  double operator()(int a, int b, int c) const {
    return v[(static_cast<std::size_t>(a) * n + b) * n + c];
  }
  double max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
};

struct Tensor4 {
  int n = 0;
  std::vector<double> v;
  Tensor4() = default;
  explicit Tensor4(int n_) : n(n_), v(static_cast<std::size_t>(n_) * n_ * n_ * n_, 0.0) {}
  double& operator()(int a, int b, int c, int d) {
    return v[((static_cast<std::size_t>(a) * n + b) * n + c) * n + d];
  }
  double operator()(int a, int b, int c, int d) const {
    return v[((static_cast<std::size_t>(a) * n + b) * n + c) * n + d];
  }
  double max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
};

struct Tensor5 {
  int n = 0;
  std::vector<double> v;
  Tensor5() = default;
  explicit Tensor5(int n_)
      : n(n_), v(static_cast<std::size_t>(n_) * n_ * n_ * n_ * n_, 0.0) {}
  double& operator()(int e, int a, int b, int c, int d) {
    return v[(((static_cast<std::size_t>(e) * n + a) * n + b) * n + c) * n + d];
  }
  double operator()(int e, int a, int b, int c, int d) const {
    return v[(((static_cast<std::size_t>(e) * n + a) * n + b) * n + c) * n + d];
  }
  double max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
};

}  // namespace detail

class MetricData {
 public:
  MetricData(PeriodicGridFunction f, std::vector<double> a_diag, InnerSpace inner)
      : f_(std::move(f)),
        f1_(f_.derivative()),
        f2_(f1_.derivative()),
        f3_(f2_.derivative()),
        a_(std::move(a_diag)),
        inner_(std::move(inner)) {
    if (a_.size() != static_cast<std::size_t>(inner_.dim()))
      throw std::invalid_argument("MetricData: A and inner product dimensions differ");
    double trace = 0.0;
    for (double v : a_) trace += v;
    if (!(std::abs(trace) < 1e-12)) throw std::invalid_argument("MetricData: A must be traceless");
  }

  int fibre_dim() const { return inner_.dim(); }
  int dimension() const { return fibre_dim() + 2; }
  double period() const { return f_.period(); }
  const PeriodicGridFunction& f() const { return f_; }
  const std::vector<double>& a_diag() const { return a_; }
  const InnerSpace& inner() const { return inner_; }

  double kappa(double t, const Eigen::VectorXd& v) const {
    const double ft = f_(t);
    double acc = 0.0;
    for (int i = 0; i < fibre_dim(); ++i)
      acc += inner_.signs()[static_cast<std::size_t>(i)] * (ft + a_[static_cast<std::size_t>(i)]) *
             v[i] * v[i];
    return acc;
  }

  // matrix of g at (t, s, v) in coordinates (t, s, v^1..v^m)
  Eigen::MatrixXd metric_matrix(double t, const Eigen::VectorXd& v) const {
    const int n = dimension();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    g(0, 0) = kappa(t, v);
    g(0, 1) = g(1, 0) = 0.5;
    for (int i = 0; i < fibre_dim(); ++i)
      g(2 + i, 2 + i) = inner_.signs()[static_cast<std::size_t>(i)];
    return g;
  }

  double f_deriv(int order, double t) const {
    switch (order) {
      case 0: return f_(t);
      case 1: return f1_(t);
      case 2: return f2_(t);
      case 3: return f3_(t);
      default: throw std::invalid_argument("f_deriv: order must be 0..3");
    }
  }

 private:
  PeriodicGridFunction f_, f1_, f2_, f3_;
  std::vector<double> a_;
  InnerSpace inner_;
};

inline Eigen::MatrixXd metric_at(const MetricData& m, const PointM& x) {
  return m.metric_matrix(x.t, x.v);
}

enum class JetMode { analytic, finite_difference };

struct CurvatureJet {
  int n = 0;
  Eigen::MatrixXd g, g_inv;
  detail::Tensor3 christoffel;     // Gamma^a_{bc}  -> (a; b, c)
  detail::Tensor4 riemann;         // R_abcd, all indices lowered
  Eigen::MatrixXd ricci;
  double scalar = 0.0;
  detail::Tensor4 weyl;
  detail::Tensor5 nabla_riemann;   // (e; a, b, c, d) = covariant derivative in direction e
  detail::Tensor5 nabla_weyl;
  detail::Tensor3 nabla_ricci;     // (e; b, d)
  Eigen::MatrixXd nabla_dt;        // (nabla dt)_ab = -Gamma^t_{ab}

  double riemann_symmetry_residual() const {
    const double scale = std::max(riemann.max_abs(), 1e-30);
    double worst = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            worst = std::max(worst, std::abs(riemann(a, b, c, d) + riemann(b, a, c, d)));
            worst = std::max(worst, std::abs(riemann(a, b, c, d) + riemann(a, b, d, c)));
            worst = std::max(worst, std::abs(riemann(a, b, c, d) - riemann(c, d, a, b)));
            worst = std::max(worst, std::abs(riemann(a, b, c, d) + riemann(a, c, d, b) +
                                             riemann(a, d, b, c)));
          }
    return worst / scale;
  }

  double weyl_trace_residual() const {
    const double scale = std::max(weyl.max_abs(), 1e-30);
    double worst = 0.0;
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d) {
        double first = 0.0, second = 0.0;
        for (int a = 0; a < n; ++a)
          for (int c = 0; c < n; ++c) {
            first += g_inv(a, c) * weyl(a, b, c, d);
            second += g_inv(a, c) * weyl(b, a, d, c);
          }
        worst = std::max({worst, std::abs(first), std::abs(second)});
      }
    return worst / scale;
  }
};

namespace detail {

struct MetricDerivatives {
  int n = 0;
  Eigen::MatrixXd g;
  Tensor3 d1;  // (c; a, b) = d_c g_ab
  Tensor4 d2;  // (c, d; a, b)
  Tensor5 d3;  // (c, d, e; a, b)
};

inline MetricDerivatives analytic_derivatives(const MetricData& m, const PointM& x) {
  const int n = m.dimension();
  const int mdim = m.fibre_dim();
  MetricDerivatives md;
  md.n = n;
  md.g = m.metric_matrix(x.t, x.v);
  md.d1 = Tensor3(n);
  md.d2 = Tensor4(n);
  md.d3 = Tensor5(n);

  const double f0 = m.f_deriv(0, x.t), f1 = m.f_deriv(1, x.t), f2 = m.f_deriv(2, x.t),
               f3 = m.f_deriv(3, x.t);
  double q = 0.0;  // <v, v>
  for (int i = 0; i < mdim; ++i)
    q += m.inner().signs()[static_cast<std::size_t>(i)] * x.v[i] * x.v[i];

  md.d1(0, 0, 0) = f1 * q;
  md.d2(0, 0, 0, 0) = f2 * q;
  md.d3(0, 0, 0, 0, 0) = f3 * q;
  for (int i = 0; i < mdim; ++i) {
    const int c = 2 + i;
    const double sg = m.inner().signs()[static_cast<std::size_t>(i)];
    const double ai = m.a_diag()[static_cast<std::size_t>(i)];
    md.d1(c, 0, 0) = 2.0 * sg * (f0 + ai) * x.v[i];
    md.d2(0, c, 0, 0) = md.d2(c, 0, 0, 0) = 2.0 * sg * f1 * x.v[i];
    md.d2(c, c, 0, 0) = 2.0 * sg * (f0 + ai);
    md.d3(0, 0, c, 0, 0) = md.d3(0, c, 0, 0, 0) = md.d3(c, 0, 0, 0, 0) = 2.0 * sg * f2 * x.v[i];
    md.d3(0, c, c, 0, 0) = md.d3(c, 0, c, 0, 0) = md.d3(c, c, 0, 0, 0) = 2.0 * sg * f1;
  }
  return md;
}

// first and second derivatives of the metric by central differences
inline MetricDerivatives fd_derivatives(const MetricData& m, const PointM& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_derivatives: step must be positive");
  const int n = m.dimension();
  Eigen::VectorXd base(n);
  base[0] = x.t;
  base[1] = x.s;
  for (int i = 0; i < n - 2; ++i) base[2 + i] = x.v[i];

  const auto eval = [&m, n](const Eigen::VectorXd& c) {
    Eigen::VectorXd v = c.segment(2, n - 2);
    return m.metric_matrix(c[0], v);
  };

  MetricDerivatives md;
  md.n = n;
  md.g = eval(base);
  md.d1 = Tensor3(n);
  md.d2 = Tensor4(n);

  std::vector<Eigen::MatrixXd> plus(static_cast<std::size_t>(n)), minus(static_cast<std::size_t>(n));
  for (int e = 0; e < n; ++e) {
    Eigen::VectorXd cp = base, cm = base;
    cp[e] += h;
    cm[e] -= h;
    plus[static_cast<std::size_t>(e)] = eval(cp);
    minus[static_cast<std::size_t>(e)] = eval(cm);
  }
  for (int e = 0; e < n; ++e) {
    const Eigen::MatrixXd d =
        (plus[static_cast<std::size_t>(e)] - minus[static_cast<std::size_t>(e)]) / (2.0 * h);
    const Eigen::MatrixXd dee =
        (plus[static_cast<std::size_t>(e)] - 2.0 * md.g + minus[static_cast<std::size_t>(e)]) / (h * h);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        md.d1(e, a, b) = d(a, b);
        md.d2(e, e, a, b) = dee(a, b);
      }
    for (int f = e + 1; f < n; ++f) {
      Eigen::VectorXd cpp = base, cpm = base, cmp = base, cmm = base;
      cpp[e] += h; cpp[f] += h;
      cpm[e] += h; cpm[f] -= h;
      cmp[e] -= h; cmp[f] += h;
      cmm[e] -= h; cmm[f] -= h;
      const Eigen::MatrixXd d2 = (eval(cpp) - eval(cpm) - eval(cmp) + eval(cmm)) / (4.0 * h * h);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) md.d2(e, f, a, b) = md.d2(f, e, a, b) = d2(a, b);
    }
  }
  return md;
}

inline CurvatureJet assemble_jet(const MetricDerivatives& md) {
  const int n = md.n;
  CurvatureJet jet;
  jet.n = n;
  jet.g = md.g;
  jet.g_inv = md.g.inverse();
  const auto& d1 = md.d1;
  const auto& d2 = md.d2;
  const auto& d3 = md.d3;
  const Eigen::MatrixXd& gi = jet.g_inv;

  // derivatives of the inverse metric
  std::vector<Eigen::MatrixXd> dgi(static_cast<std::size_t>(n));
  for (int e = 0; e < n; ++e) {
    Eigen::MatrixXd de(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) de(a, b) = d1(e, a, b);
    dgi[static_cast<std::size_t>(e)] = -gi * de * gi;
  }
  Tensor4 d2gi(n);
  for (int e = 0; e < n; ++e)
    for (int f = 0; f < n; ++f) {
      Eigen::MatrixXd de(n, n), def(n, n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          de(a, b) = d1(e, a, b);
          def(a, b) = d2(e, f, a, b);
        }
      const Eigen::MatrixXd block = -(dgi[static_cast<std::size_t>(f)] * de * gi + gi * def * gi +
                                      gi * de * dgi[static_cast<std::size_t>(f)]);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) d2gi(e, f, a, b) = block(a, b);
    }

  // Christoffel symbols and their first and second coordinate derivatives
  jet.christoffel = Tensor3(n);
  Tensor4 dgamma(n);   // (e; a, b, c)
  Tensor5 d2gamma(n);  // (e, f; a, b, c)
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double acc = 0.0;
        for (int d = 0; d < n; ++d)
          acc += gi(a, d) * (d1(b, d, c) + d1(c, d, b) - d1(d, b, c));
        jet.christoffel(a, b, c) = 0.5 * acc;
      }
  for (int e = 0; e < n; ++e)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          double acc = 0.0;
          for (int d = 0; d < n; ++d) {
            acc += dgi[static_cast<std::size_t>(e)](a, d) * (d1(b, d, c) + d1(c, d, b) - d1(d, b, c));
            acc += gi(a, d) * (d2(e, b, d, c) + d2(e, c, d, b) - d2(e, d, b, c));
          }
          dgamma(e, a, b, c) = 0.5 * acc;
        }
  for (int e = 0; e < n; ++e)
    for (int f = 0; f < n; ++f)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int d = 0; d < n; ++d) {
              const double s0 = d1(b, d, c) + d1(c, d, b) - d1(d, b, c);
              const double s1e = d2(e, b, d, c) + d2(e, c, d, b) - d2(e, d, b, c);
              const double s1f = d2(f, b, d, c) + d2(f, c, d, b) - d2(f, d, b, c);
              const double s2 = d3(e, f, b, d, c) + d3(e, f, c, d, b) - d3(e, f, d, b, c);
              acc += d2gi(e, f, a, d) * s0 + dgi[static_cast<std::size_t>(e)](a, d) * s1f +
                     dgi[static_cast<std::size_t>(f)](a, d) * s1e + gi(a, d) * s2;
            }
            d2gamma(e, f, a, b, c) = 0.5 * acc;
          }

  // Riemann tensor R^a_{bcd} and its coordinate derivative
  Tensor4 rup(n);
  Tensor5 drup(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double acc = dgamma(c, a, d, b) - dgamma(d, a, c, b);
          for (int e = 0; e < n; ++e)
            acc += jet.christoffel(a, c, e) * jet.christoffel(e, d, b) -
                   jet.christoffel(a, d, e) * jet.christoffel(e, c, b);
          rup(a, b, c, d) = acc;
        }
  for (int e = 0; e < n; ++e)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            double acc = d2gamma(e, c, a, d, b) - d2gamma(e, d, a, c, b);
            for (int f = 0; f < n; ++f)
              acc += dgamma(e, a, c, f) * jet.christoffel(f, d, b) +
                     jet.christoffel(a, c, f) * dgamma(e, f, d, b) -
                     dgamma(e, a, d, f) * jet.christoffel(f, c, b) -
                     jet.christoffel(a, d, f) * dgamma(e, f, c, b);
            drup(e, a, b, c, d) = acc;
          }

  // lowered Riemann, coordinate and covariant derivatives
  jet.riemann = Tensor4(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double acc = 0.0;
          for (int e = 0; e < n; ++e) acc += md.g(a, e) * rup(e, b, c, d);
          jet.riemann(a, b, c, d) = acc;
        }
  Tensor5 drlow(n);
  for (int e = 0; e < n; ++e)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            double acc = 0.0;
            for (int f = 0; f < n; ++f)
              acc += d1(e, a, f) * rup(f, b, c, d) + md.g(a, f) * drup(e, f, b, c, d);
            drlow(e, a, b, c, d) = acc;
          }
  jet.nabla_riemann = Tensor5(n);
  for (int e = 0; e < n; ++e)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            double acc = drlow(e, a, b, c, d);
            for (int f = 0; f < n; ++f)
              acc -= jet.christoffel(f, e, a) * jet.riemann(f, b, c, d) +
                     jet.christoffel(f, e, b) * jet.riemann(a, f, c, d) +
                     jet.christoffel(f, e, c) * jet.riemann(a, b, f, d) +
                     jet.christoffel(f, e, d) * jet.riemann(a, b, c, f);
            jet.nabla_riemann(e, a, b, c, d) = acc;
          }

  // Ricci, scalar, their covariant derivatives
  jet.ricci = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      double acc = 0.0;
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) acc += gi(a, c) * jet.riemann(a, b, c, d);
      jet.ricci(b, d) = acc;
    }
  jet.nabla_ricci = Tensor3(n);
  for (int e = 0; e < n; ++e)
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a)
          for (int c = 0; c < n; ++c) acc += gi(a, c) * jet.nabla_riemann(e, a, b, c, d);
        jet.nabla_ricci(e, b, d) = acc;
      }
  jet.scalar = 0.0;
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) jet.scalar += gi(b, d) * jet.ricci(b, d);
  Eigen::VectorXd dscalar = Eigen::VectorXd::Zero(n);
  for (int e = 0; e < n; ++e)
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d) dscalar[e] += gi(b, d) * jet.nabla_ricci(e, b, d);

  // Weyl tensor and its covariant derivative (the decomposition commutes with
  // nabla because nabla g = 0)
  const double cn2 = 1.0 / (n - 2);
  const double cn12 = 1.0 / ((n - 1) * (n - 2));
  jet.weyl = Tensor4(n);
  jet.nabla_weyl = Tensor5(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const double gg = md.g(a, c) * md.g(b, d) - md.g(a, d) * md.g(b, c);
          jet.weyl(a, b, c, d) =
              jet.riemann(a, b, c, d) -
              cn2 * (md.g(a, c) * jet.ricci(b, d) - md.g(a, d) * jet.ricci(b, c) +
                     md.g(b, d) * jet.ricci(a, c) - md.g(b, c) * jet.ricci(a, d)) +
              cn12 * jet.scalar * gg;
          for (int e = 0; e < n; ++e)
            jet.nabla_weyl(e, a, b, c, d) =
                jet.nabla_riemann(e, a, b, c, d) -
                cn2 * (md.g(a, c) * jet.nabla_ricci(e, b, d) - md.g(a, d) * jet.nabla_ricci(e, b, c) +
                       md.g(b, d) * jet.nabla_ricci(e, a, c) - md.g(b, c) * jet.nabla_ricci(e, a, d)) +
                cn12 * dscalar[e] * gg;
        }

  jet.nabla_dt = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) jet.nabla_dt(a, b) = -jet.christoffel(0, a, b);
  return jet;
}

}  // namespace detail

inline CurvatureJet curvature_jet(const MetricData& m, const PointM& x,
                                  JetMode mode = JetMode::analytic, double h_step = 1e-2) {
  if (m.dimension() < 4) throw std::invalid_argument("curvature_jet: requires dimension >= 4");
  if (x.v.size() != m.fibre_dim()) throw std::invalid_argument("curvature_jet: point dimension mismatch");
  const auto md = mode == JetMode::analytic ? detail::analytic_derivatives(m, x)
                                            : detail::fd_derivatives(m, x, h_step);
  return detail::assemble_jet(md);
}

// Seeded sample box: t in [0, p), s in [-1, 1], each v component in [-2, 2].
inline std::vector<PointM> sample_points(const MetricData& m, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<PointM> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    PointM p;
    p.t = m.period() * unit(rng);
    p.s = 2.0 * unit(rng) - 1.0;
    p.v = Eigen::VectorXd(m.fibre_dim());
    for (int c = 0; c < m.fibre_dim(); ++c) p.v[c] = 4.0 * unit(rng) - 2.0;
    pts.push_back(std::move(p));
  }
  return pts;
}

struct EcsReport {
  // clause (1): parallel Weyl tensor
  double max_nabla_weyl = 0.0;
  double fd_ratio_min = 0.0, fd_ratio_max = 0.0;
  // clause (2): not conformally flat
  double min_weyl_to_riemann = 0.0;
  // clause (3): not locally symmetric
  double max_nabla_riemann_rel = 0.0;
  // clause (4): Ricci recurrence
  double max_recurrence_minor = 0.0;
  // clause (5): parallel dt
  double max_nabla_dt = 0.0;
  // Ricci profile
  double max_ricci_offtt = 0.0;
  double ricci_ratio = 0.0;         // measured Ric_tt / f(t)
  double ricci_ratio_spread = 0.0;  // relative variation across points
  // cross-mode agreement of the Riemann tensor, halving ratio
  double riemann_agreement_h1 = 0.0;
  double riemann_agreement_ratio = 0.0;
  // tensor-identity diagnostics
  double max_riemann_symmetry = 0.0;
  double max_weyl_trace = 0.0;

  bool pass_nabla_weyl = false, pass_fd_ratio = false, pass_weyl_nonzero = false,
       pass_nabla_riemann_nonzero = false, pass_recurrence = false, pass_nabla_dt = false,
       pass_ricci_offtt = false, pass_ricci_ratio = false;
  bool pass = false;
};

inline EcsReport ecs_certificate(const MetricData& m, const std::vector<PointM>& points,
                                 double h1 = 1e-2, double h2 = 5e-3) {
  const double margin = m.f().max_value() - m.f().min_value();
  if (!(margin > tol::kNonconstancyMargin))
    throw std::invalid_argument("ecs_certificate: f must be nonconstant (margin " +
                                std::to_string(margin) + ")");
  if (points.empty()) throw std::invalid_argument("ecs_certificate: no sample points");

  EcsReport rep;
  rep.fd_ratio_min = std::numeric_limits<double>::infinity();
  rep.min_weyl_to_riemann = std::numeric_limits<double>::infinity();
  bool ratio_init = false;
  double ratio_min = 0.0, ratio_max = 0.0, ratio_sum = 0.0;
  int ratio_count = 0;
  const int n = m.dimension();

  for (const auto& pt : points) {
    const CurvatureJet jet = curvature_jet(m, pt, JetMode::analytic);
    rep.max_nabla_weyl = std::max(rep.max_nabla_weyl, jet.nabla_weyl.max_abs());
    const double riem_scale = jet.riemann.max_abs();
    rep.min_weyl_to_riemann =
        std::min(rep.min_weyl_to_riemann, jet.weyl.max_abs() / std::max(riem_scale, 1e-30));
    rep.max_nabla_riemann_rel =
        std::max(rep.max_nabla_riemann_rel,
                 jet.nabla_riemann.max_abs() / std::max(riem_scale / m.period(), 1e-30));
    rep.max_nabla_dt = std::max(rep.max_nabla_dt, jet.nabla_dt.cwiseAbs().maxCoeff());
    rep.max_riemann_symmetry = std::max(rep.max_riemann_symmetry, jet.riemann_symmetry_residual());
    rep.max_weyl_trace = std::max(rep.max_weyl_trace, jet.weyl_trace_residual());

    // Ricci profile: only the tt component, proportional to f
    const double ric_scale = jet.ricci.cwiseAbs().maxCoeff();
    double offtt = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (!(a == 0 && b == 0)) offtt = std::max(offtt, std::abs(jet.ricci(a, b)));
    rep.max_ricci_offtt = std::max(rep.max_ricci_offtt, offtt);
    const double ft = m.f_deriv(0, pt.t);
    if (std::abs(ft) > 1e-8) {
      const double ratio = jet.ricci(0, 0) / ft;
      if (!ratio_init) {
        ratio_min = ratio_max = ratio;
        ratio_init = true;
      }
      ratio_min = std::min(ratio_min, ratio);
      ratio_max = std::max(ratio_max, ratio);
      ratio_sum += ratio;
      ++ratio_count;
    }

    // Ricci recurrence via 2x2 minors of (Ric, nabla_e Ric) for every direction
    for (int e = 0; e < n; ++e) {
      double nric = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) nric = std::max(nric, std::abs(jet.nabla_ricci(e, a, b)));
      if (nric < 1e-12 * std::max(1.0, ric_scale)) continue;  // derivative vanishes: dependent
      double minor = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c)
            for (int d = 0; d < n; ++d)
              minor = std::max(minor, std::abs(jet.ricci(a, b) * jet.nabla_ricci(e, c, d) -
                                               jet.ricci(c, d) * jet.nabla_ricci(e, a, b)));
      rep.max_recurrence_minor = std::max(rep.max_recurrence_minor, minor / (ric_scale * nric));
    }

    // finite-difference oracle: parallel-Weyl residual decays like h^2
    const CurvatureJet jfd1 = curvature_jet(m, pt, JetMode::finite_difference, h1);
    const CurvatureJet jfd2 = curvature_jet(m, pt, JetMode::finite_difference, h2);
    const double w1 = jfd1.nabla_weyl.max_abs();
    const double w2 = jfd2.nabla_weyl.max_abs();
    const double ratio = w1 / std::max(w2, 1e-30);
    rep.fd_ratio_min = std::min(rep.fd_ratio_min, ratio);
    rep.fd_ratio_max = std::max(rep.fd_ratio_max, ratio);

    double diff1 = 0.0, diff2 = 0.0;
    for (std::size_t i = 0; i < jet.riemann.v.size(); ++i) {
      diff1 = std::max(diff1, std::abs(jfd1.riemann.v[i] - jet.riemann.v[i]));
      diff2 = std::max(diff2, std::abs(jfd2.riemann.v[i] - jet.riemann.v[i]));
    }
    rep.riemann_agreement_h1 = std::max(rep.riemann_agreement_h1, diff1);
    rep.riemann_agreement_ratio = std::max(rep.riemann_agreement_ratio, diff1 / std::max(diff2, 1e-30));
  }

  rep.ricci_ratio = ratio_count > 0 ? ratio_sum / ratio_count : 0.0;
  rep.ricci_ratio_spread =
      ratio_count > 0 ? (ratio_max - ratio_min) / std::max(1.0, std::abs(rep.ricci_ratio)) : 0.0;

  rep.pass_nabla_weyl = rep.max_nabla_weyl < tol::kNablaWeyl;
  rep.pass_fd_ratio = rep.fd_ratio_min > tol::kHalvingRatioLow && rep.fd_ratio_max < tol::kHalvingRatioHigh;
  rep.pass_weyl_nonzero = rep.min_weyl_to_riemann > tol::kWeylNonzeroRel;
  rep.pass_nabla_riemann_nonzero = rep.max_nabla_riemann_rel > tol::kNablaRiemannNonzeroRel;
  rep.pass_recurrence = rep.max_recurrence_minor < tol::kRicciRecurrence;
  rep.pass_nabla_dt = rep.max_nabla_dt < tol::kNablaDt;
  rep.pass_ricci_offtt = rep.max_ricci_offtt < tol::kRicciOffTT;
  rep.pass_ricci_ratio = ratio_count > 0 && rep.ricci_ratio_spread < tol::kRicciRatioConstancy;
  rep.pass = rep.pass_nabla_weyl && rep.pass_fd_ratio && rep.pass_weyl_nonzero &&
             rep.pass_nabla_riemann_nonzero && rep.pass_recurrence && rep.pass_nabla_dt &&
             rep.pass_ricci_offtt && rep.pass_ricci_ratio;
  return rep;
}

// Pullback defect of the metric under the action of a group element,
// max over sample points and coordinate-direction pairs of
// |g_{F(x)}(dF X, dF Y) - g_x(X, Y)| / (1 + |g_x(X, Y)|),
// with dF computed by central differences.
inline double isometry_residual(const MetricData& m, const GroupElement& g,
                                const std::vector<PointM>& points, double fd_step = 1e-5) {
  const int n = m.dimension();
  if (g.context()->dim() != m.fibre_dim())
    throw std::invalid_argument("isometry_residual: fibre dimension mismatch");
  double worst = 0.0;
  for (const auto& pt : points) {
    Eigen::MatrixXd jac(n, n);
    for (int c = 0; c < n; ++c) {
      PointM xp = pt, xm = pt;
      const double delta =
          fd_step * (1.0 + std::abs(c == 0 ? pt.t : (c == 1 ? pt.s : pt.v[c - 2])));
      if (c == 0) {
        xp.t += delta;
        xm.t -= delta;
      } else if (c == 1) {
        xp.s += delta;
        xm.s -= delta;
      } else {
        xp.v[c - 2] += delta;
        xm.v[c - 2] -= delta;
      }
      const PointM fp = act_on_m(g, xp);
      const PointM fm = act_on_m(g, xm);
      jac(0, c) = (fp.t - fm.t) / (2.0 * delta);
      jac(1, c) = (fp.s - fm.s) / (2.0 * delta);
      for (int i = 0; i < n - 2; ++i) jac(2 + i, c) = (fp.v[i] - fm.v[i]) / (2.0 * delta);
    }
    const Eigen::MatrixXd g_here = metric_at(m, pt);
    const Eigen::MatrixXd g_image = metric_at(m, act_on_m(g, pt));
    const Eigen::MatrixXd pulled = jac.transpose() * g_image * jac;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        worst = std::max(worst,
                         std::abs(pulled(a, b) - g_here(a, b)) / (1.0 + std::abs(g_here(a, b))));
  }
  return worst;
}

}  // namespace ecsq
