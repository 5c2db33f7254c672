#pragma once
// groupg.hpp — the group Z x R x E, its two actions, the product lattice
// Sigma = Z theta x Lambda, and the compact-quotient criterion checks.
//
// Elements are triples (k, q, u) with k integer, q real and u a solution of
// u'' = f u + A u carried by its initial data z = (u(0), u'(0)).  The product
// is
//     (k, q, u) (l, r, w) = (k + l, q + r - Omega(u, T^l w), T^{-l} u + w),
// where T is the translation (Tu)(t) = u(t-p) and Omega(u, w) =
// <u', w> - <u, w'> is the constant skew form.  The group acts on
// M = R^2 x V by
//     (k, q, u) . (t, s, v) = (t + k p, s + q - <u'(t), 2v + u(t)>, v + u(t)),
// and on R^2 x E by
//     (k, q, u) . (t, z, w) = (t + k p, z + q - Omega(u, w), T^k (w + u)).

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ecsq/odespace.hpp"
#include "ecsq/tolerances.hpp"

namespace ecsq {

struct PointM {
  double t;
  double s;
  Eigen::VectorXd v;
};

// point of R^2 x L; w is a second-order state that must lie in L
struct PointRE {
  double t;
  double z;
  Eigen::VectorXd w;
};

// Shared immutable solver data: the second-order system, the inner product,
// and the chosen first-order subspace L.
class GroupContext {
 public:
  GroupContext(SecondOrderSystem system, InnerSpace inner, FirstOrderSpace first_order)
      : system_(std::move(system)), inner_(std::move(inner)), first_order_(std::move(first_order)) {
    if (system_.dim() != inner_.dim() || system_.dim() != first_order_.dim())
      throw std::invalid_argument("GroupContext: dimension mismatch");
  }

  const SecondOrderSystem& system() const { return system_; }
  const InnerSpace& inner() const { return inner_; }
  const FirstOrderSpace& first_order() const { return first_order_; }
  int dim() const { return system_.dim(); }
  double period() const { return system_.period(); }

  double omega0(const Eigen::VectorXd& z1, const Eigen::VectorXd& z2) const {
    return omega_at_zero(inner_, z1, z2);
  }

  // state of sum c_i u_i for the axis basis of L
  Eigen::VectorXd l_state(const Eigen::VectorXd& coords) const {
    if (coords.size() != dim()) throw std::invalid_argument("l_state: dimension mismatch");
    Eigen::VectorXd z(2 * dim());
    for (int i = 0; i < dim(); ++i) {
      z[i] = coords[i];
      z[dim() + i] = coords[i] * first_order_.path().b(i)(0.0);
    }
    return z;
  }

  // relative gap between u'(0) and B(0) u(0); zero exactly on L
  double l_membership_residual(const Eigen::VectorXd& z) const {
    if (z.size() != 2 * dim()) throw std::invalid_argument("membership: state dimension mismatch");
    double num = 0.0;
    for (int i = 0; i < dim(); ++i)
      num = std::max(num, std::abs(z[dim() + i] - first_order_.path().b(i)(0.0) * z[i]));
    return num / (1.0 + z.cwiseAbs().maxCoeff());
  }

 private:
  SecondOrderSystem system_;
  InnerSpace inner_;
  FirstOrderSpace first_order_;
};

class GroupElement {
 public:
  static GroupElement make(std::shared_ptr<const GroupContext> ctx, std::int64_t k, double q,
                           Eigen::VectorXd state) {
    if (!ctx) throw std::invalid_argument("GroupElement: null context");
    if (state.size() != ctx->system().state_dim())
      throw std::invalid_argument("GroupElement: state dimension mismatch");
    const double res = ctx->system().solution_residual(state);
    if (!(res < tol::kSecondOrderResidual))
      throw std::invalid_argument("GroupElement: solution residual " + std::to_string(res) +
                                  " exceeds tolerance");
    return GroupElement(std::move(ctx), k, q, std::move(state));
  }

  static GroupElement identity(std::shared_ptr<const GroupContext> ctx) {
    const int sd = ctx->system().state_dim();
    return GroupElement(std::move(ctx), 0, 0.0, Eigen::VectorXd::Zero(sd));
  }

  // central element (0, q, 0)
  static GroupElement central(std::shared_ptr<const GroupContext> ctx, double q) {
    const int sd = ctx->system().state_dim();
    return GroupElement(std::move(ctx), 0, q, Eigen::VectorXd::Zero(sd));
  }

  std::int64_t k() const { return k_; }
  double q() const { return q_; }
  const Eigen::VectorXd& state() const { return state_; }
  const std::shared_ptr<const GroupContext>& context() const { return ctx_; }

  friend GroupElement multiply(const GroupElement& g1, const GroupElement& g2) {
    require_shared(g1, g2);
    const auto& sys = g1.ctx_->system();
    const Eigen::VectorXd tlw = sys.translate(g2.state_, g2.k_);  // T^l w, l = g2.k
    const double q = g1.q_ + g2.q_ - g1.ctx_->omega0(g1.state_, tlw);
    const Eigen::VectorXd u = sys.translate(g1.state_, -g2.k_) + g2.state_;
    return GroupElement(g1.ctx_, g1.k_ + g2.k_, q, u);
  }

  friend GroupElement inverse(const GroupElement& g) {
    const Eigen::VectorXd tku = g.ctx_->system().translate(g.state_, g.k_);
    return GroupElement(g.ctx_, -g.k_, -g.q_, -tku);
  }

  // max deviation in (q, state); infinite when the integer parts differ
  friend double element_distance(const GroupElement& g1, const GroupElement& g2) {
    require_shared(g1, g2);
    if (g1.k_ != g2.k_) return std::numeric_limits<double>::infinity();
    return std::max(std::abs(g1.q_ - g2.q_), (g1.state_ - g2.state_).cwiseAbs().maxCoeff());
  }

 private:
  GroupElement(std::shared_ptr<const GroupContext> ctx, std::int64_t k, double q, Eigen::VectorXd state)
      : ctx_(std::move(ctx)), k_(k), q_(q), state_(std::move(state)) {}

  static void require_shared(const GroupElement& g1, const GroupElement& g2) {
    if (g1.ctx_.get() != g2.ctx_.get())
      throw std::invalid_argument("GroupElement: operands from different solver contexts");
  }

  std::shared_ptr<const GroupContext> ctx_;
  std::int64_t k_;
  double q_;
  Eigen::VectorXd state_;
};

inline PointM act_on_m(const GroupElement& g, const PointM& x) {
  const auto& ctx = *g.context();
  if (x.v.size() != ctx.dim()) throw std::invalid_argument("act_on_m: point dimension mismatch");
  const auto [u, du] = ctx.system().eval(g.state(), x.t);
  PointM out;
  out.t = x.t + static_cast<double>(g.k()) * ctx.period();
  out.s = x.s + g.q() - ctx.inner().dot(du, 2.0 * x.v + u);
  out.v = x.v + u;
  return out;
}

inline PointRE act_on_re(const GroupElement& g, const PointRE& y) {
  const auto& ctx = *g.context();
  const double memb = ctx.l_membership_residual(y.w);
  if (!(memb < tol::kMembershipResidual))
    throw std::invalid_argument("act_on_re: w is not in the first-order subspace, residual " +
                                std::to_string(memb));
  PointRE out;
  out.t = y.t + static_cast<double>(g.k()) * ctx.period();
  out.z = y.z + g.q() - ctx.omega0(g.state(), y.w);
  out.w = ctx.system().translate(y.w + g.state(), g.k());
  return out;
}

// (t, z, w) -> (t, z - <w'(t), w(t)>, w(t))
inline PointM equivariant_map(const GroupContext& ctx, const PointRE& y) {
  const double memb = ctx.l_membership_residual(y.w);
  if (!(memb < tol::kMembershipResidual))
    throw std::invalid_argument("equivariant_map: w is not in the first-order subspace");
  const auto [w, dw] = ctx.system().eval(y.w, y.t);
  return PointM{y.t, y.z - ctx.inner().dot(dw, w), w};
}

// ---------------------------------------------------------------------------
// Sigma = Z theta x Lambda and the three-part criterion certificate.

struct SigmaLattice {
  double theta;
  IntegerLattice lattice;

  SigmaLattice(double theta_in, IntegerLattice lattice_in)
      : theta(theta_in), lattice(std::move(lattice_in)) {
    if (!(theta > 0.0)) throw std::invalid_argument("SigmaLattice: requires theta > 0");
  }
};

struct NcsufReport {
  bool intersection_pass;             // (a) Sigma meets R x {0} exactly in Z theta x {0}
  double monodromy_integer_residual;  // (b) T in the lattice basis vs its rounding
  double monodromy_det_error;         // (b) | |det| - 1 |
  double phi_lattice_residual;        // (b) distance of phi(generators) from Z theta
  bool invariance_pass;
  double max_generator_omega;         // (c) Lagrangian certificate, implies Omega in Z theta
  bool omega_pass;
  bool pass;
};

// General form: the solution space is handed over as basis evaluators plus the
// matrix of T in that basis; phi is a functional in the dual of the basis.
inline NcsufReport check_ncsuf(const std::vector<StateEval>& basis,
                               const Eigen::MatrixXd& t_matrix, const InnerSpace& inner,
                               const SigmaLattice& sigma, const Eigen::VectorXd& phi,
                               double period, int nodes = tol::kDefaultGridSize) {
  const int d = static_cast<int>(basis.size());
  if (sigma.lattice.basis.rows() != d || phi.size() != d || t_matrix.rows() != d)
    throw std::invalid_argument("check_ncsuf: dimension mismatch");

  NcsufReport rep;
  rep.intersection_pass = true;  // structural: Sigma is stored as the product Z theta x Lambda

  // (b) translation invariance of the lattice and phi(Lambda) in Z theta
  const Eigen::MatrixXd t_latt =
      sigma.lattice.basis.partialPivLu().solve(t_matrix * sigma.lattice.basis);
  double ires = 0.0;
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) ires = std::max(ires, std::abs(t_latt(r, c) - std::round(t_latt(r, c))));
  rep.monodromy_integer_residual = ires;
  rep.monodromy_det_error = std::abs(std::abs(t_latt.determinant()) - 1.0);
  double phi_res = 0.0;
  for (int c = 0; c < d; ++c) {
    const double val = phi.dot(sigma.lattice.basis.col(c));
    phi_res = std::max(phi_res, std::abs(val - sigma.theta * std::round(val / sigma.theta)));
  }
  rep.phi_lattice_residual = phi_res;
  rep.invariance_pass = ires < tol::kLatticeInteger &&
                        rep.monodromy_det_error < tol::kDetUnimodular && phi_res < tol::kLagrangian;

  // (c) Omega on generator pairs; certified in the Lagrangian form Omega = 0,
  // which lands in Z theta for every theta
  Eigen::MatrixXd omega_basis = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double v = omega(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)],
                             inner, period, nodes)
                           .value;
      omega_basis(i, j) = v;
      omega_basis(j, i) = -v;
    }
  const Eigen::MatrixXd omega_gen =
      sigma.lattice.basis.transpose() * omega_basis * sigma.lattice.basis;
  rep.max_generator_omega = omega_gen.cwiseAbs().maxCoeff();
  rep.omega_pass = rep.max_generator_omega < tol::kLagrangian;

  rep.pass = rep.intersection_pass && rep.invariance_pass && rep.omega_pass;
  return rep;
}

// phi is a functional on L in the dual of the axis basis; the torus-fibre
// construction passes the zero functional.
inline NcsufReport check_ncsuf(const FirstOrderSpace& space, const InnerSpace& inner,
                               const SigmaLattice& sigma, const Eigen::VectorXd& phi) {
  std::vector<StateEval> basis;
  for (int i = 0; i < space.dim(); ++i) basis.push_back(basis_state(space, i));
  return check_ncsuf(basis, translation_operator(space), inner, sigma, phi, space.period(),
                     space.path().f().size());
}

}  // namespace ecsq
