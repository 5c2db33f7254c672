#pragma once
// odespace.hpp — solution spaces of u' = B(t)u and u'' = f u + A u, the
// skew form Omega, translation (monodromy) operators, companion-matrix
// lattices, and the dimension-4 determinant obstruction.
//
// B and A are simultaneously diagonal in a fixed basis of the fibre V, so the
// first-order space has the closed form u_i(t) = u_i(0) exp(int_0^t b_i) and
// its translation operator is diag(exp(-int_0^p b_i)).  A dense Runge-Kutta
// monodromy is kept alongside as an independent route.  The second-order
// solution space (dimension 2(n-2)) has no closed form for nonconstant f and
// is handled through per-component 2x2 fundamental flows.

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ecsq/periodic.hpp"
#include "ecsq/septuple.hpp"
#include "ecsq/tolerances.hpp"

namespace ecsq {

// Pseudo-Euclidean inner product, diagonal +/-1 in the declared basis.
class InnerSpace {
 public:
  explicit InnerSpace(std::vector<int> signs) : signs_(std::move(signs)) {
    if (signs_.empty()) throw std::invalid_argument("InnerSpace: empty sign pattern");
    for (int s : signs_)
      if (s != 1 && s != -1) throw std::invalid_argument("InnerSpace: signs must be +1 or -1");
  }

  int dim() const { return static_cast<int>(signs_.size()); }
  const std::vector<int>& signs() const { return signs_; }

  double dot(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    double acc = 0.0;
    for (int i = 0; i < dim(); ++i) acc += signs_[static_cast<std::size_t>(i)] * u[i] * v[i];
    return acc;
  }

  Eigen::MatrixXd gram() const {
    Eigen::VectorXd d(dim());
    for (int i = 0; i < dim(); ++i) d[i] = signs_[static_cast<std::size_t>(i)];
    return d.asDiagonal();
  }

 private:
  std::vector<int> signs_;
};

// Diagonal B(t) = diag(b_1, ..., b_m) and A = diag(a_1, ..., a_m) with
// b_i' + b_i^2 = f + a_i, tr A = 0, A != 0.
class DiagonalOperatorPath {
 public:
  DiagonalOperatorPath(PeriodicGridFunction f, std::vector<PeriodicGridFunction> b,
                       std::vector<double> a)
      : f_(std::move(f)), b_(std::move(b)), a_(std::move(a)) {
    if (b_.empty() || b_.size() != a_.size())
      throw std::invalid_argument("DiagonalOperatorPath: entry counts must match and be nonzero");
    double trace = 0.0;
    for (double v : a_) trace += v;
    if (!(std::abs(trace) < 1e-12))
      throw std::invalid_argument("DiagonalOperatorPath: A must be traceless");
    const double res = riccati_residual();
    if (!(res < tol::kRiccatiResidual))
      throw std::invalid_argument("DiagonalOperatorPath: Riccati residual " + std::to_string(res) +
                                  " exceeds tolerance");
  }

  // j blocks carrying (alpha, beta, gamma) and (a, b, c).
  static DiagonalOperatorPath from_septuple_blocks(const Septuple& s, int j) {
    if (j < 1) throw std::invalid_argument("from_septuple_blocks: requires j >= 1");
    std::vector<PeriodicGridFunction> b;
    std::vector<double> a;
    for (int blk = 0; blk < j; ++blk) {
      b.push_back(s.alpha());
      b.push_back(s.beta());
      b.push_back(s.gamma());
      a.push_back(s.a());
      a.push_back(s.b());
      a.push_back(s.c());
    }
    return DiagonalOperatorPath(s.f(), std::move(b), std::move(a));
  }

  int dim() const { return static_cast<int>(b_.size()); }
  double period() const { return f_.period(); }
  const PeriodicGridFunction& f() const { return f_; }
  const PeriodicGridFunction& b(int i) const { return b_[static_cast<std::size_t>(i)]; }
  double a(int i) const { return a_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& a_entries() const { return a_; }

  Eigen::VectorXd b_values(double t) const {
    Eigen::VectorXd out(dim());
    for (int i = 0; i < dim(); ++i) out[i] = b_[static_cast<std::size_t>(i)](t);
    return out;
  }

  double riccati_residual() const {
    double worst = 0.0;
    for (int i = 0; i < dim(); ++i) {
      const auto& bi = b_[static_cast<std::size_t>(i)];
      worst = std::max(worst, (bi.derivative() + bi * bi - f_ - a_[static_cast<std::size_t>(i)]).max_abs());
    }
    return worst;
  }

 private:
  PeriodicGridFunction f_;
  std::vector<PeriodicGridFunction> b_;
  std::vector<double> a_;
};

// The space L of solutions of u' = B(t)u for diagonal periodic B, carried by
// the exponent data of its axis basis u_i(t) = exp(int_0^t b_i) e_i.
class FirstOrderSpace {
 public:
  explicit FirstOrderSpace(DiagonalOperatorPath path) : path_(std::move(path)) {
    for (int i = 0; i < path_.dim(); ++i) {
      exponents_.push_back(path_.b(i).antiderivative());
      multipliers_.push_back(std::exp(-path_.period() * exponents_.back().mean));
    }
  }

  int dim() const { return path_.dim(); }
  double period() const { return path_.period(); }
  const DiagonalOperatorPath& path() const { return path_; }

  // scalar coefficient exp(int_0^t b_i) of the i-th axis solution
  double basis_coefficient(int i, double t) const {
    return std::exp(exponents_[static_cast<std::size_t>(i)].integral_to(t));
  }

  std::pair<Eigen::VectorXd, Eigen::VectorXd> basis_eval(int i, double t) const {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(dim());
    Eigen::VectorXd du = Eigen::VectorXd::Zero(dim());
    const double c = basis_coefficient(i, t);
    u[i] = c;
    du[i] = path_.b(i)(t) * c;
    return {u, du};
  }

  // columns u_i(t); diagonal by construction
  Eigen::MatrixXd evaluation_matrix(double t) const {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(dim(), dim());
    for (int i = 0; i < dim(); ++i) e(i, i) = basis_coefficient(i, t);
    return e;
  }

  // Floquet multipliers exp(-int_0^p b_i)
  const std::vector<double>& multipliers() const { return multipliers_; }

  // smallest singular value of the evaluation map over all grid nodes
  double min_evaluation_singular_value() const {
    double worst = std::numeric_limits<double>::infinity();
    const int n = path_.f().size();
    for (int node = 0; node < n; ++node) {
      const double t = path_.f().node(node);
      for (int i = 0; i < dim(); ++i) worst = std::min(worst, std::abs(basis_coefficient(i, t)));
    }
    return worst;
  }

 private:
  DiagonalOperatorPath path_;
  std::vector<Antiderivative> exponents_;
  std::vector<double> multipliers_;
};

// Closed-form solution of u' = B(t)u with u(0) = u0.
inline Eigen::VectorXd solve_first_order(const FirstOrderSpace& space, const Eigen::VectorXd& u0,
                                         double t) {
  if (u0.size() != space.dim()) throw std::invalid_argument("solve_first_order: dimension mismatch");
  Eigen::VectorXd out(space.dim());
  for (int i = 0; i < space.dim(); ++i) out[i] = u0[i] * space.basis_coefficient(i, t);
  return out;
}

// Independent route: classical RK4 on u' = B(t)u from 0 to t.
inline Eigen::VectorXd solve_first_order_rk4(const DiagonalOperatorPath& path,
                                             const Eigen::VectorXd& u0, double t, int steps) {
  if (u0.size() != path.dim()) throw std::invalid_argument("solve_first_order_rk4: dimension mismatch");
  Eigen::VectorXd u = u0;
  const double h = t / steps;
  const auto rhs = [&path](double tau, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return path.b_values(tau).cwiseProduct(v);
  };
  double tau = 0.0;
  for (int q = 0; q < steps; ++q, tau += h) {
    const Eigen::VectorXd k1 = rhs(tau, u);
    const Eigen::VectorXd k2 = rhs(tau + 0.5 * h, u + 0.5 * h * k1);
    const Eigen::VectorXd k3 = rhs(tau + 0.5 * h, u + 0.5 * h * k2);
    const Eigen::VectorXd k4 = rhs(tau + h, u + h * k3);
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return u;
}

// Matrix of (Tu)(t) = u(t-p) in the axis basis: diag(exp(-int_0^p b_i)).
inline Eigen::MatrixXd translation_operator(const FirstOrderSpace& space) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(space.dim(), space.dim());
  for (int i = 0; i < space.dim(); ++i) m(i, i) = space.multipliers()[static_cast<std::size_t>(i)];
  return m;
}

// Independent route: fundamental matrix over one period by dense RK4,
// inverted.  Retained purely as an oracle for the diagonal closed form.
inline Eigen::MatrixXd translation_operator_rk4(const DiagonalOperatorPath& path, int substeps) {
  const int m = path.dim();
  const int table_n = 2 * substeps;
  std::vector<std::vector<double>> tables;
  tables.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    int grid = path.b(i).size();
    while (grid < table_n) grid *= 2;
    tables.push_back(path.b(i).resample(grid).samples());
  }
  const auto b_at = [&](int half_index) {
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) {
      const auto& tab = tables[static_cast<std::size_t>(i)];
      v[i] = tab[static_cast<std::size_t>((half_index * (tab.size() / static_cast<std::size_t>(table_n))) %
                                          tab.size())];
    }
    return v;
  };
  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(m, m);
  const double h = path.period() / substeps;
  for (int q = 0; q < substeps; ++q) {
    const Eigen::VectorXd b0 = b_at(2 * q), b1 = b_at(2 * q + 1), b2 = b_at(2 * q + 2);
    const Eigen::MatrixXd k1 = b0.asDiagonal() * phi;
    const Eigen::MatrixXd k2 = b1.asDiagonal() * (phi + 0.5 * h * k1);
    const Eigen::MatrixXd k3 = b1.asDiagonal() * (phi + 0.5 * h * k2);
    const Eigen::MatrixXd k4 = b2.asDiagonal() * (phi + h * k3);
    phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return phi.inverse();
}

// ---------------------------------------------------------------------------
// Omega(u, w) = <u', w> - <u, w'>; constant along genuine solutions.

struct OmegaResult {
  double value;               // mean over the grid nodes
  double constancy_residual;  // max deviation from the mean
};

using StateEval = std::function<std::pair<Eigen::VectorXd, Eigen::VectorXd>(double)>;

inline OmegaResult omega(const StateEval& u, const StateEval& w, const InnerSpace& inner,
                         double period, int nodes = tol::kDefaultGridSize) {
  std::vector<double> vals(static_cast<std::size_t>(nodes));
  double mean = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double t = period * i / nodes;
    const auto [uu, du] = u(t);
    const auto [ww, dw] = w(t);
    vals[static_cast<std::size_t>(i)] = inner.dot(du, ww) - inner.dot(uu, dw);
    mean += vals[static_cast<std::size_t>(i)];
  }
  mean /= nodes;
  double dev = 0.0;
  for (double v : vals) dev = std::max(dev, std::abs(v - mean));
  if (!(dev < tol::kOmegaNotASolution))
    throw std::runtime_error("omega: value is not constant; inputs are not genuine solutions");
  return OmegaResult{mean, dev};
}

inline StateEval basis_state(const FirstOrderSpace& space, int i) {
  return [&space, i](double t) { return space.basis_eval(i, t); };
}

// max |Omega(u_i, u_j)| over the basis of L; zero for self-adjoint B.
inline double lagrangian_residual(const FirstOrderSpace& space, const InnerSpace& inner) {
  double worst = 0.0;
  for (int i = 0; i < space.dim(); ++i)
    for (int j = i + 1; j < space.dim(); ++j) {
      const auto r = omega(basis_state(space, i), basis_state(space, j), inner, space.period(),
                           space.path().f().size());
      worst = std::max(worst, std::abs(r.value));
    }
  return worst;
}

// Same residual for an explicitly given basis (used by non-self-adjoint fixtures).
inline double lagrangian_residual(const std::vector<StateEval>& basis, const InnerSpace& inner,
                                  double period, int nodes = tol::kDefaultGridSize) {
  double worst = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j)
      worst = std::max(worst, std::abs(omega(basis[i], basis[j], inner, period, nodes).value));
  return worst;
}

// ---------------------------------------------------------------------------
// Companion matrices and translation-invariant lattices.

inline Eigen::Matrix3d companion_matrix(std::int64_t k, std::int64_t l) {
  Eigen::Matrix3d t;
  t << static_cast<double>(k), static_cast<double>(-l), 1.0,  //
      1.0, 0.0, 0.0,                                          //
      0.0, 1.0, 0.0;
  return t;
}

// Columns (root^2, root, 1); eigenvectors of the companion matrix.
inline Eigen::Matrix3d companion_basis(const SpecTriple& roots, std::int64_t k, std::int64_t l) {
  const double rts[3] = {roots.lambda, roots.mu, roots.nu};
  Eigen::Matrix3d v;
  for (int c = 0; c < 3; ++c) v.col(c) = Eigen::Vector3d(rts[c] * rts[c], rts[c], 1.0);
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(v);
  const double cond = svd.singularValues()(0) / svd.singularValues()(2);
  if (!(cond < tol::kCompanionCondition))
    throw std::invalid_argument("companion_basis: roots too close, condition number " +
                                std::to_string(cond));
  const Eigen::Matrix3d check =
      v * Eigen::Vector3d(rts[0], rts[1], rts[2]).asDiagonal() * v.inverse() - companion_matrix(k, l);
  if (!(check.cwiseAbs().maxCoeff() < tol::kCompanionEntry))
    throw std::runtime_error("companion_basis: conjugation does not reproduce the companion matrix");
  return v;
}

struct IntegerLattice {
  Eigen::MatrixXd basis;           // columns: generators in the solution basis
  Eigen::MatrixXd monodromy_real;  // T in the lattice basis
  Eigen::MatrixXi monodromy_int;   // entrywise rounding of the above
  double integer_residual;         // max |monodromy_real - monodromy_int|
  double det_error;                // | |det monodromy_int| - 1 |
};

// j block-diagonal copies of the companion change of basis applied to the
// 3-dimensional eigen-solution block; T acts by the companion matrix on each.
inline IntegerLattice build_lattice(int j, const FirstOrderSpace& block, const Eigen::Matrix3d& cob) {
  if (block.dim() != 3) throw std::invalid_argument("build_lattice: block must be 3-dimensional");
  if (j < 1) throw std::invalid_argument("build_lattice: requires j >= 1");
  const int d = 3 * j;
  const Eigen::Matrix3d gen = cob.inverse();
  const Eigen::Vector3d mult(block.multipliers()[0], block.multipliers()[1], block.multipliers()[2]);
  const Eigen::Matrix3d t_block = cob * mult.asDiagonal() * gen;

  IntegerLattice out;
  out.basis = Eigen::MatrixXd::Zero(d, d);
  out.monodromy_real = Eigen::MatrixXd::Zero(d, d);
  for (int blk = 0; blk < j; ++blk) {
    out.basis.block<3, 3>(3 * blk, 3 * blk) = gen;
    out.monodromy_real.block<3, 3>(3 * blk, 3 * blk) = t_block;
  }
  if (!(std::abs(out.basis.determinant()) > tol::kLatticeSpan))
    throw std::runtime_error("build_lattice: generators do not span");

  out.monodromy_int.resize(d, d);
  double res = 0.0;
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      const double v = out.monodromy_real(r, c);
      const double rounded = std::round(v);
      out.monodromy_int(r, c) = static_cast<int>(rounded);
      res = std::max(res, std::abs(v - rounded));
    }
  out.integer_residual = res;
  out.det_error = std::abs(std::abs(out.monodromy_int.cast<double>().determinant()) - 1.0);
  if (!(res < tol::kLatticeInteger))
    throw std::runtime_error("build_lattice: monodromy is not integer to tolerance, residual " +
                             std::to_string(res));
  return out;
}

// ---------------------------------------------------------------------------
// Dimension-4 obstruction: for the 2-dimensional fibre with A = diag(r/2, -r/2)
// the translation operator has det T = exp(-r int_0^p dt/rho), which cannot
// reach +-1 because rho keeps a constant sign.

struct Dim4Result {
  double det_t;             // exp(-r int dt/rho)
  double det_t_direct;      // exp(-int (alpha+beta)); second algebraic route
  double margin;            // min(|det T - 1|, |det T + 1|)
  double riccati_residual;  // discretization check on the built pair
};

inline Dim4Result dim4_obstruction(const PeriodicGridFunction& rho, double r) {
  if (r == 0.0) throw std::invalid_argument("dim4_obstruction: requires r != 0");
  bool pos = rho.sample(0) > 0.0;
  for (double v : rho.samples())
    if (v == 0.0 || (v > 0.0) != pos)
      throw std::invalid_argument("dim4_obstruction: rho must be nowhere zero");

  const auto common = (r - rho.derivative()) / rho;
  const auto alpha = 0.5 * (rho + common);
  const auto beta = 0.5 * (common - rho);
  const auto f = alpha.derivative() + alpha * alpha - 0.5 * r;
  const double beta_res = (beta.derivative() + beta * beta - f + 0.5 * r).max_abs();

  const double det_quad = std::exp(-r * (1.0 / rho).integrate_period());
  const double det_direct = std::exp(-(alpha + beta).integrate_period());
  const double margin = std::min(std::abs(det_quad - 1.0), std::abs(det_quad + 1.0));
  return Dim4Result{det_quad, det_direct, margin, beta_res};
}

// Traceless part of F^2 minus (tr F) times the traceless part of F; zero for
// every 2x2 matrix.
inline double traceless_square_residual(const Eigen::Matrix2d& f) {
  const Eigen::Matrix2d e = f - 0.5 * f.trace() * Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d f2 = f * f;
  const Eigen::Matrix2d lhs = f2 - 0.5 * f2.trace() * Eigen::Matrix2d::Identity();
  return (lhs - f.trace() * e).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Second-order solution space E: u'' = f u + A u, state z = (u, u').
// Elements are carried by their initial data; the translation operator acts
// through the per-component 2x2 fundamental flows of the period map.

class SecondOrderSystem {
 public:
  SecondOrderSystem(PeriodicGridFunction f, std::vector<double> a_entries, int substeps = 0)
      : f_(std::move(f)), a_(std::move(a_entries)) {
    if (a_.empty()) throw std::invalid_argument("SecondOrderSystem: empty A diagonal");
    const int n = f_.size();
    substeps_ = substeps > 0 ? substeps : std::max(4096, 16 * n);
    if (!fft::is_power_of_two(static_cast<std::size_t>(substeps_)) || substeps_ < n)
      throw std::invalid_argument("SecondOrderSystem: substeps must be a power of two >= grid size");
    f_table_ = f_.resample(2 * substeps_).samples();
    build_flows();
  }

  int dim() const { return static_cast<int>(a_.size()); }
  int state_dim() const { return 2 * dim(); }
  double period() const { return f_.period(); }
  const PeriodicGridFunction& f() const { return f_; }
  const std::vector<double>& a_entries() const { return a_; }

  const Eigen::MatrixXd& monodromy() const { return monodromy_; }

  // z(t) for the solution with z(0) = z0
  Eigen::VectorXd evolve(Eigen::VectorXd z0, double t) const {
    if (z0.size() != state_dim()) throw std::invalid_argument("evolve: state dimension mismatch");
    const double p = period();
    double cycles = std::floor(t / p);
    double tau = t - cycles * p;
    if (tau >= p) {  // guard the floating-point edge tau == p
      tau -= p;
      cycles += 1.0;
    }
    const auto k = static_cast<long long>(cycles);
    z0 = period_power(std::move(z0), k);

    const int n = f_.size();
    const int node = std::min(static_cast<int>(std::floor(tau / p * n)), n - 1);
    const double t_node = p * node / n;
    for (int i = 0; i < dim(); ++i) {
      const Eigen::Matrix2d& flow = node_flows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(node)];
      const Eigen::Vector2d zi = flow * Eigen::Vector2d(z0[i], z0[dim() + i]);
      z0[i] = zi[0];
      z0[dim() + i] = zi[1];
    }

    const double h = p / substeps_;
    int q = node * (substeps_ / n);
    double remaining = tau - t_node;
    while (remaining >= h - 1e-15 * p) {
      step_all(z0, 2 * q, h);
      remaining -= h;
      ++q;
    }
    if (remaining > 0.0) partial_step_all(z0, p * q / substeps_, remaining);
    return z0;
  }

  std::pair<Eigen::VectorXd, Eigen::VectorXd> eval(const Eigen::VectorXd& z0, double t) const {
    const Eigen::VectorXd z = evolve(z0, t);
    return {z.head(dim()), z.tail(dim())};
  }

  // T^k z: the translation (Tu)(t) = u(t-p) maps initial data by the inverse
  // period flow, so T^k corresponds to the (-k)-th power of the period map.
  Eigen::VectorXd translate(Eigen::VectorXd z, long long k) const {
    return period_power(std::move(z), -k);
  }

  // first-order residual |z'(t) - C(t) z(t)| / (1 + |z|) sampled over one period
  double solution_residual(const Eigen::VectorXd& z0, int samples = 5) const {
    const double p = period();
    const double delta = 1e-5 * p;
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      const double t = p * (s + 0.37) / samples;
      const Eigen::VectorXd zm = evolve(z0, t - delta);
      const Eigen::VectorXd zp = evolve(z0, t + delta);
      const Eigen::VectorXd z = evolve(z0, t);
      const Eigen::VectorXd fd = (zp - zm) / (2.0 * delta);
      const double ft = f_(t);
      double num = 0.0;
      for (int i = 0; i < dim(); ++i) {
        num = std::max(num, std::abs(fd[i] - z[dim() + i]));
        num = std::max(num, std::abs(fd[dim() + i] - (ft + a_[static_cast<std::size_t>(i)]) * z[i]));
      }
      worst = std::max(worst, num / (1.0 + z.cwiseAbs().maxCoeff()));
    }
    return worst;
  }

 private:
  // one RK4 step of size h for every component, f taken from the half-step table
  void step_all(Eigen::VectorXd& z, int half_index, double h) const {
    const int tn = 2 * substeps_;
    const double f0 = f_table_[static_cast<std::size_t>(half_index % tn)];
    const double f1 = f_table_[static_cast<std::size_t>((half_index + 1) % tn)];
    const double f2 = f_table_[static_cast<std::size_t>((half_index + 2) % tn)];
    for (int i = 0; i < dim(); ++i) rk4_component(z, i, f0, f1, f2, h);
  }

  void partial_step_all(Eigen::VectorXd& z, double t, double h) const {
    const double f0 = f_(t);
    const double f1 = f_(t + 0.5 * h);
    const double f2 = f_(t + h);
    for (int i = 0; i < dim(); ++i) rk4_component(z, i, f0, f1, f2, h);
  }

  void rk4_component(Eigen::VectorXd& z, int i, double f0, double f1, double f2, double h) const {
    const double ai = a_[static_cast<std::size_t>(i)];
    const double c0 = f0 + ai, c1 = f1 + ai, c2 = f2 + ai;
    double u = z[i], v = z[dim() + i];
    const double k1u = v, k1v = c0 * u;
    const double k2u = v + 0.5 * h * k1v, k2v = c1 * (u + 0.5 * h * k1u);
    const double k3u = v + 0.5 * h * k2v, k3v = c1 * (u + 0.5 * h * k2u);
    const double k4u = v + h * k3v, k4v = c2 * (u + h * k3u);
    z[i] = u + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    z[dim() + i] = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }

  Eigen::VectorXd period_power(Eigen::VectorXd z, long long k) const {
    while (k > 0) {
      apply_blocks(z, comp_monodromy_);
      --k;
    }
    while (k < 0) {
      apply_blocks(z, comp_monodromy_inv_);
      ++k;
    }
    return z;
  }

  void apply_blocks(Eigen::VectorXd& z, const std::vector<Eigen::Matrix2d>& blocks) const {
    for (int i = 0; i < dim(); ++i) {
      const Eigen::Vector2d zi = blocks[static_cast<std::size_t>(i)] * Eigen::Vector2d(z[i], z[dim() + i]);
      z[i] = zi[0];
      z[dim() + i] = zi[1];
    }
  }

  void build_flows() {
    const int n = f_.size();
    const int per_node = substeps_ / n;
    const double h = period() / substeps_;
    node_flows_.assign(static_cast<std::size_t>(dim()), {});
    comp_monodromy_.clear();
    comp_monodromy_inv_.clear();
    for (int i = 0; i < dim(); ++i) {
      auto& nodes = node_flows_[static_cast<std::size_t>(i)];
      nodes.reserve(static_cast<std::size_t>(n));
      Eigen::Matrix2d phi = Eigen::Matrix2d::Identity();
      const double ai = a_[static_cast<std::size_t>(i)];
      for (int q = 0; q < substeps_; ++q) {
        if (q % per_node == 0) nodes.push_back(phi);
        const double c0 = f_table_[static_cast<std::size_t>(2 * q)] + ai;
        const double c1 = f_table_[static_cast<std::size_t>(2 * q + 1)] + ai;
        const double c2 = f_table_[static_cast<std::size_t>((2 * q + 2) % (2 * substeps_))] + ai;
        Eigen::Matrix2d m0, m1, m2;
        m0 << 0, 1, c0, 0;
        m1 << 0, 1, c1, 0;
        m2 << 0, 1, c2, 0;
        const Eigen::Matrix2d k1 = m0 * phi;
        const Eigen::Matrix2d k2 = m1 * (phi + 0.5 * h * k1);
        const Eigen::Matrix2d k3 = m1 * (phi + 0.5 * h * k2);
        const Eigen::Matrix2d k4 = m2 * (phi + h * k3);
        phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      comp_monodromy_.push_back(phi);
      comp_monodromy_inv_.push_back(phi.inverse());
    }
    monodromy_ = Eigen::MatrixXd::Zero(state_dim(), state_dim());
    for (int i = 0; i < dim(); ++i) {
      const Eigen::Matrix2d& p = comp_monodromy_[static_cast<std::size_t>(i)];
      monodromy_(i, i) = p(0, 0);
      monodromy_(i, dim() + i) = p(0, 1);
      monodromy_(dim() + i, i) = p(1, 0);
      monodromy_(dim() + i, dim() + i) = p(1, 1);
    }
  }

  PeriodicGridFunction f_;
  std::vector<double> a_;
  int substeps_;
  std::vector<double> f_table_;  // f at the half-substep grid
  std::vector<std::vector<Eigen::Matrix2d>> node_flows_;
  std::vector<Eigen::Matrix2d> comp_monodromy_, comp_monodromy_inv_;
  Eigen::MatrixXd monodromy_;
};

// Omega for second-order solutions given by initial data.
inline OmegaResult omega(const SecondOrderSystem& sys, const Eigen::VectorXd& z1,
                         const Eigen::VectorXd& z2, const InnerSpace& inner) {
  const auto make = [&sys](const Eigen::VectorXd& z) -> StateEval {
    return [&sys, z](double t) { return sys.eval(z, t); };
  };
  return omega(make(z1), make(z2), inner, sys.period(), sys.f().size());
}

// Omega evaluated from initial data alone (the pointwise value at t = 0).
inline double omega_at_zero(const InnerSpace& inner, const Eigen::VectorXd& z1,
                            const Eigen::VectorXd& z2) {
  const int m = inner.dim();
  if (z1.size() != 2 * m || z2.size() != 2 * m)
    throw std::invalid_argument("omega_at_zero: state dimension mismatch");
  return inner.dot(z1.tail(m), z2.head(m)) - inner.dot(z1.head(m), z2.tail(m));
}

}  // namespace ecsq
