#pragma once

#include "fracocp/pde.hpp"
#include "fracocp/problem.hpp"

namespace fracocp {

/// Control, its state and adjoint, the objective and the gradient density d
/// (the discrete L2 Riesz representative of J'(u)).
struct ReducedEval {
  Field u;
  Field y;
  Field q;
  double J = 0.0;
  Field grad;
};

/// weight * sum_i L(x_i, y_i, u_i)
double objective_value(const Problem& prob, const Field& y, const Field& u);

/// J(u), with y = state_solve(u).
double objective(const Problem& prob, const Field& u, const SolveSettings& settings = {});

/// State, adjoint, J(u) and d = dL/du + q dF/du.
ReducedEval gradient(const Problem& prob, const Field& u, const SolveSettings& settings = {});

/// J'(u) v through the sensitivity: inner(dL/du, v) + inner(dL/dy, G'(u) v).
double derivative_via_sensitivity(const Problem& prob, const ReducedEval& at, const Field& v);

/**
 * Second derivative J''(u) at an evaluated point. Factors the linearized
 * operator once; every form or application costs one or two shifted solves.
 * Keeps a reference to `prob`, which must outlive it.
 */
class Hessian {
 public:
  Hessian(const Problem& prob, const ReducedEval& at);

  const Linearization& linearization() const { return lin_; }

  /// Hamiltonian form: int H_yy zv zw + H_yu (w zv + v zw) + H_uu v w.
  double form(const Field& v, const Field& w) const;
  double form(const Field& v, const Field& w, const Field& zv, const Field& zw) const;

  /// Same quantity assembled from the L terms and the q-weighted F terms separately.
  double form_direct(const Field& v, const Field& w) const;

  /// Representative r of J''(u)[v, .]: inner(r, w) = J''(u)[v, w] for all w.
  Field apply(const Field& v) const;

  const Eigen::VectorXd& h_yy() const { return h_yy_; }
  const Eigen::VectorXd& h_yu() const { return h_yu_; }
  const Eigen::VectorXd& h_uu() const { return h_uu_; }

 private:
  const Problem* prob_;
  Field q_;
  Linearization lin_;
  Eigen::VectorXd h_yy_, h_yu_, h_uu_, f_u_;
};

double hessian_form(const Problem& prob, const ReducedEval& at, const Field& v, const Field& w);

}  // namespace fracocp
