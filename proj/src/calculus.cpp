#include "fracocp/calculus.hpp"

namespace fracocp {

double objective_value(const Problem& prob, const Field& y, const Field& u) {
  require_grid(y, prob.grid());
  require_same_grid(y, u);
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) sum += prob.L().value(i, y[i], u[i]);
  return prob.grid().weight() * sum;
}

double objective(const Problem& prob, const Field& u, const SolveSettings& settings) {
  const Field y = state_solve(prob, u, settings).y;
  return objective_value(prob, y, u);
}

ReducedEval gradient(const Problem& prob, const Field& u, const SolveSettings& settings) {
  Field y = state_solve(prob, u, settings).y;
  Field q = adjoint_solve(prob, y, u);
  const double J = objective_value(prob, y, u);
  Field d = switching_function(prob, y, q, u);
  return {u, std::move(y), std::move(q), J, std::move(d)};
}

double derivative_via_sensitivity(const Problem& prob, const ReducedEval& at, const Field& v) {
  const Field z = linearized_solve(prob, at.y, at.u, v);
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Partials l = prob.L().eval(i, at.y[i], at.u[i]);
    sum += l.dxi * v[i] + l.dt * z[i];
  }
  return prob.grid().weight() * sum;
}

Hessian::Hessian(const Problem& prob, const ReducedEval& at) : prob_(&prob), q_(at.q), lin_(prob, at.y, at.u) {
  const auto m = static_cast<Eigen::Index>(at.u.size());
  h_yy_.resize(m);
  h_yu_.resize(m);
  h_uu_.resize(m);
  f_u_.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const HamiltonianPartials h = hamiltonian(prob, k, at.y[k], at.q[k], at.u[k]);
    h_yy_[i] = h.dyy;
    h_yu_[i] = h.dyu;
    h_uu_[i] = h.duu;
    f_u_[i] = prob.F().eval(k, at.y[k], at.u[k]).dxi;
  }
}

double Hessian::form(const Field& v, const Field& w, const Field& zv, const Field& zw) const {
  const auto& a = v.values();
  const auto& b = w.values();
  const auto& za = zv.values();
  const auto& zb = zw.values();
  const double sum = (h_yy_.array() * za.array() * zb.array()).sum() +
                     (h_yu_.array() * (b.array() * za.array() + a.array() * zb.array())).sum() +
                     (h_uu_.array() * a.array() * b.array()).sum();
  return prob_->grid().weight() * sum;
}

double Hessian::form(const Field& v, const Field& w) const {
  return form(v, w, lin_.sensitivity(v), lin_.sensitivity(w));
}

double Hessian::form_direct(const Field& v, const Field& w) const {
  const Field zv = lin_.sensitivity(v);
  const Field zw = lin_.sensitivity(w);
  const Field& y = lin_.y();
  const Field& u = lin_.u();
  double l_terms = 0.0;
  double f_terms = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Partials l = prob_->L().eval(i, y[i], u[i]);
    const Partials f = prob_->F().eval(i, y[i], u[i]);
    const double cross = w[i] * zv[i] + v[i] * zw[i];
    l_terms += l.dtt * zv[i] * zw[i] + l.dtxi * cross + l.dxixi * v[i] * w[i];
    f_terms += (f.dtxi * cross + f.dtt * zv[i] * zw[i] + f.dxixi * v[i] * w[i]) * q_[i];
  }
  return prob_->grid().weight() * (l_terms + f_terms);
}

Field Hessian::apply(const Field& v) const {
  const Field zv = lin_.sensitivity(v);
  const Eigen::VectorXd p = h_yy_.cwiseProduct(zv.values()) + h_yu_.cwiseProduct(v.values());
  const Field back = lin_.solve(v.with_values(p));
  return v.with_values(f_u_.cwiseProduct(back.values()) + h_yu_.cwiseProduct(zv.values()) +
                       h_uu_.cwiseProduct(v.values()));
}

double hessian_form(const Problem& prob, const ReducedEval& at, const Field& v, const Field& w) {
  return Hessian(prob, at).form(v, w);
}

}  // namespace fracocp
