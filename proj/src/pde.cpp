#include "fracocp/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fracocp/errors.hpp"
#include "fracocp/field_io.hpp"

namespace fracocp {

void SolveSettings::validate() const {
  if (newton_tol && !(*newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be positive");
  if (newton_max_iter < 1) throw std::invalid_argument("newton_max_iter must be >= 1");
  if (!(damping > 0.0 && damping < 1.0)) throw std::invalid_argument("damping must lie in (0, 1)");
  if (!(linear_tol > 0.0)) throw std::invalid_argument("linear_tol must be positive");
}

SolveSettings SolveSettings::tightened(double factor, double reference_tol) const {
  SolveSettings s = *this;
  s.newton_tol = (newton_tol ? *newton_tol : reference_tol) / factor;
  return s;
}

namespace {

Eigen::VectorXd f_values(const Problem& prob, const Eigen::VectorXd& y, const Field& u) {
  Eigen::VectorXd out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    out[i] = prob.F().value(static_cast<std::size_t>(i), y[i], u[static_cast<std::size_t>(i)]);
  }
  return out;
}

double weighted_norm(const Grid& g, const Eigen::VectorXd& v) { return std::sqrt(g.weight() * v.squaredNorm()); }

}  // namespace

Field state_residual(const Problem& prob, const Field& y, const Field& u) {
  require_grid(y, prob.grid());
  require_same_grid(y, u);
  return y.with_values(prob.op().apply(y).values() - f_values(prob, y.values(), u));
}

Field monotone_shift(const Problem& prob, const Field& y, const Field& u) {
  Eigen::VectorXd b(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double dfdy = prob.F().eval(i, y[i], u[i]).dt;
    if (dfdy > 0.0) {
      throw AssumptionViolation("dF/dy = " + format_double(dfdy) + " > 0 at node " + std::to_string(i) +
                                " (monotonicity violated)");
    }
    b[static_cast<Eigen::Index>(i)] = -dfdy;
  }
  return y.with_values(std::move(b));
}

StateSolution state_solve(const Problem& prob, const Field& u, const SolveSettings& settings) {
  settings.validate();
  require_grid(u, prob.grid());
  const Grid& grid = prob.grid();
  const auto& op = prob.op();

  const Field f_at_zero = u.with_values(f_values(prob, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(u.size())), u));
  const double tol = settings.newton_tol ? *settings.newton_tol : 1e-10 * (1.0 + norm(f_at_zero, Norm::L2));

  StateSolution out{op.solve_shifted(0.0, f_at_zero), {}, 0, tol};
  Field residual = state_residual(prob, out.y, u);
  double rnorm = norm(residual, Norm::L2);
  out.residual_history.push_back(rnorm);

  constexpr double kSufficientDecrease = 1e-4;
  for (int it = 0; it < settings.newton_max_iter && rnorm > tol; ++it) {
    const ShiftedSystem jac = op.factorize_shifted(monotone_shift(prob, out.y, u));
    const Field delta = jac.solve(residual);

    const Eigen::VectorXd lin_res =
        op.apply(delta).values() + jac.shift().values().cwiseProduct(delta.values()) - residual.values();
    // Relative target, floored at the rounding level of forming the residual:
    // eps (lambda_max^s + max b) ||delta||, which exceeds 1e-10 ||r|| on fine grids with s near 1.
    const double op_norm = op.lambda_s().maxCoeff() + jac.shift().values().cwiseAbs().maxCoeff();
    const double floor =
        64.0 * std::numeric_limits<double>::epsilon() * (op_norm * norm(delta, Norm::L2) + rnorm);
    if (weighted_norm(grid, lin_res) > std::max(settings.linear_tol * rnorm, floor)) {
      throw SolverError("Newton: linear solve residual " + format_double(weighted_norm(grid, lin_res)) +
                            " above max(linear_tol ||r||, rounding floor) = " +
                            format_double(std::max(settings.linear_tol * rnorm, floor)),
                        out.residual_history);
    }

    const double merit = 0.5 * rnorm * rnorm;
    double theta = 1.0;
    for (;;) {
      const Eigen::VectorXd y_try = out.y.values() - theta * delta.values();
      if (y_try.allFinite()) {
        const Eigen::VectorXd fy = f_values(prob, y_try, u);
        if (fy.allFinite()) {
          Field cand = out.y.with_values(y_try);
          Eigen::VectorXd r_try = op.apply(cand).values() - fy;
          const double rn = weighted_norm(grid, r_try);
          if (std::isfinite(rn) && 0.5 * rn * rn <= (1.0 - 2.0 * kSufficientDecrease * theta) * merit) {
            out.y = std::move(cand);
            residual = out.y.with_values(std::move(r_try));
            rnorm = rn;
            break;
          }
        }
      }
      theta *= settings.damping;
      if (theta < 1e-12) {
        throw SolverError("Newton: Armijo backtracking failed, residual " + format_double(rnorm),
                          out.residual_history);
      }
    }
    ++out.iterations;
    out.residual_history.push_back(rnorm);
  }
  if (rnorm > tol) {
    throw SolverError("Newton: no convergence in " + std::to_string(settings.newton_max_iter) +
                          " iterations, residual " + format_double(rnorm) + " > tol " + format_double(tol),
                      out.residual_history);
  }
  return out;
}

Linearization::Linearization(const Problem& prob, Field y, Field u)
    : prob_(&prob),
      y_(std::move(y)),
      u_(std::move(u)),
      system_(prob.op().factorize_shifted(monotone_shift(prob, y_, u_))) {
  require_same_grid(y_, u_);
}

Field Linearization::solve(const Field& rhs) const { return system_.solve(rhs); }

Field Linearization::sensitivity(const Field& v) const {
  require_same_grid(v, u_);
  Eigen::VectorXd rhs(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    rhs[static_cast<Eigen::Index>(i)] = prob_->F().eval(i, y_[i], u_[i]).dxi * v[i];
  }
  return solve(v.with_values(std::move(rhs)));
}

Field Linearization::second_sensitivity(const Field& v, const Field& w, const Field& zv, const Field& zw) const {
  Eigen::VectorXd rhs(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Partials p = prob_->F().eval(i, y_[i], u_[i]);
    rhs[static_cast<Eigen::Index>(i)] =
        p.dtt * zv[i] * zw[i] + p.dtxi * (w[i] * zv[i] + v[i] * zw[i]) + p.dxixi * v[i] * w[i];
  }
  return solve(v.with_values(std::move(rhs)));
}

Field Linearization::second_sensitivity(const Field& v, const Field& w) const {
  return second_sensitivity(v, w, sensitivity(v), sensitivity(w));
}

Field Linearization::adjoint() const {
  Eigen::VectorXd rhs(y_.size());
  for (std::size_t i = 0; i < y_.size(); ++i) {
    rhs[static_cast<Eigen::Index>(i)] = prob_->L().eval(i, y_[i], u_[i]).dt;
  }
  return solve(y_.with_values(std::move(rhs)));
}

Field linearized_solve(const Problem& prob, const Field& y, const Field& u, const Field& v) {
  return Linearization(prob, y, u).sensitivity(v);
}

Field second_sensitivity(const Problem& prob, const Field& y, const Field& u, const Field& v, const Field& w) {
  return Linearization(prob, y, u).second_sensitivity(v, w);
}

Field adjoint_solve(const Problem& prob, const Field& y, const Field& u) { return Linearization(prob, y, u).adjoint(); }

LipschitzReport lipschitz_probe(const Problem& prob, int pairs, Rng& rng, const SolveSettings& settings) {
  LipschitzReport rep;
  const auto& b = prob.bounds();
  for (int k = 0; k < pairs; ++k) {
    const Field u = random_admissible(prob.grid_ptr(), b.alpha(), b.beta(), rng, true);
    const Field ub = random_admissible(prob.grid_ptr(), b.alpha(), b.beta(), rng, true);
    const Field du = u - ub;
    const double l1 = norm(du, Norm::L1);
    const double l2 = norm(du, Norm::L2);
    if (l1 == 0.0) continue;
    const Field y = state_solve(prob, u, settings).y;
    const Field yb = state_solve(prob, ub, settings).y;
    const Linearization lin(prob, y, u);
    const Field q = lin.adjoint();
    const Field qb = adjoint_solve(prob, yb, ub);
    const Field z = lin.sensitivity(du);
    rep.state_l2_per_l1 = std::max(rep.state_l2_per_l1, norm(y - yb, Norm::L2) / l1);
    rep.state_linf_per_lp = std::max(rep.state_linf_per_lp, norm(y - yb, Norm::Linf) / l2);
    rep.adjoint_linf_per_lp = std::max(rep.adjoint_linf_per_lp, norm(q - qb, Norm::Linf) / l2);
    rep.sensitivity_l2_per_l1 = std::max(rep.sensitivity_l2_per_l1, norm(z, Norm::L2) / l1);
    ++rep.pairs;
  }
  return rep;
}

}  // namespace fracocp
