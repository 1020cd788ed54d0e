#include "fracocp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fracocp/errors.hpp"

namespace fracocp {

namespace {

struct Range {
  double lo;
  double hi;
  double max_abs() const { return std::max(std::abs(lo), std::abs(hi)); }
};

// Range of a 2*pi-periodic trig function over [a, b], given the phase of its
// extrema: critical points are offset + k*pi.
template <class Fn>
Range trig_range(Fn fn, double offset, double a, double b) {
  Range r{std::min(fn(a), fn(b)), std::max(fn(a), fn(b))};
  const double first = std::ceil((a - offset) / std::numbers::pi);
  for (double k = first; offset + k * std::numbers::pi <= b; k += 1.0) {
    const double v = fn(offset + k * std::numbers::pi);
    r.lo = std::min(r.lo, v);
    r.hi = std::max(r.hi, v);
  }
  return r;
}

Range cos_range(double a, double b) {
  return trig_range([](double x) { return std::cos(x); }, 0.0, a, b);
}

Range sin_range(double a, double b) {
  return trig_range([](double x) { return std::sin(x); }, std::numbers::pi / 2, a, b);
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

ControlBounds::ControlBounds(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !(beta > alpha)) {
    throw std::invalid_argument("control bounds must be finite with beta > alpha");
  }
}

double ControlBounds::max_abs() const { return std::max(std::abs(alpha_), std::abs(beta_)); }

double Partials::abs_derivative_sum() const {
  return std::abs(dt) + std::abs(dxi) + std::abs(dtt) + std::abs(dtxi) + std::abs(dxixi);
}

// ---------------------------------------------------------------------------
// F

NonlinearityF::NonlinearityF(Family family, Field f0, double c, double kappa_g, double d)
    : family_(family), f0_(std::move(f0)), c_(c), kappa_g_(kappa_g), d_(d) {
  require_finite(c, "F parameter c");
  require_finite(kappa_g, "F parameter kappa_g");
  require_finite(d, "F parameter d");
}

NonlinearityF NonlinearityF::linear(Field f0, double c) { return {Family::Linear, std::move(f0), c, 0.0, 0.0}; }

NonlinearityF NonlinearityF::cubic(Field f0, double c, double kappa_g) {
  return {Family::Cubic, std::move(f0), c, kappa_g, 0.0};
}

NonlinearityF NonlinearityF::damping(Field f0, double c, double d) {
  return {Family::Damping, std::move(f0), c, 0.0, d};
}

std::string NonlinearityF::name() const {
  switch (family_) {
    case Family::Linear:
      return "linear";
    case Family::Cubic:
      return "cubic";
    case Family::Damping:
      return "damping";
  }
  return "?";
}

Partials NonlinearityF::eval(std::size_t node, double t, double xi) const {
  const double f0 = f0_[node];
  Partials p;
  switch (family_) {
    case Family::Linear:
      p.value = f0 - c_ * t + xi;
      p.dt = -c_;
      p.dxi = 1.0;
      break;
    case Family::Cubic:
      p.value = f0 - t * t * t - c_ * t + xi + kappa_g_ * std::sin(xi);
      p.dt = -3.0 * t * t - c_;
      p.dxi = 1.0 + kappa_g_ * std::cos(xi);
      p.dtt = -6.0 * t;
      p.dxixi = -kappa_g_ * std::sin(xi);
      break;
    case Family::Damping: {
      const double damp = c_ + d_ * xi * xi;
      p.value = f0 - damp * t;
      p.dt = -damp;
      p.dxi = -2.0 * d_ * xi * t;
      p.dtxi = -2.0 * d_ * xi;
      p.dxixi = -2.0 * d_ * t;
      break;
    }
  }
  return p;
}

double NonlinearityF::derivative_bound(double M, const ControlBounds& bounds) const {
  const double a = bounds.alpha();
  const double b = bounds.beta();
  const double xi_max = bounds.max_abs();
  switch (family_) {
    case Family::Linear:
      return std::abs(c_) + 1.0;
    case Family::Cubic: {
      const Range cr = cos_range(a, b);
      const double dxi = std::max(std::abs(1.0 + kappa_g_ * cr.lo), std::abs(1.0 + kappa_g_ * cr.hi));
      return 3.0 * M * M + std::abs(c_) + dxi + 6.0 * M + std::abs(kappa_g_) * sin_range(a, b).max_abs();
    }
    case Family::Damping: {
      const double ad = std::abs(d_);
      return std::abs(c_) + ad * xi_max * xi_max + 2.0 * ad * xi_max * M + 2.0 * ad * xi_max + 2.0 * ad * M;
    }
  }
  return 0.0;
}

void NonlinearityF::check_parameters(const ControlBounds& bounds) const {
  if (c_ < 0.0) {
    throw AssumptionViolation("F." + name() + ": c = " + std::to_string(c_) +
                              " < 0 breaks monotonicity dF/dt <= 0");
  }
  if (family_ == Family::Cubic && std::abs(kappa_g_) > 1.0) {
    throw AssumptionViolation("F.cubic: |kappa_g| must be <= 1");
  }
  if (family_ == Family::Damping) {
    if (d_ < 0.0) throw AssumptionViolation("F.damping: d < 0 breaks monotonicity dF/dt <= 0");
    if (bounds.alpha() < 0.0) {
      throw AssumptionViolation("F.damping requires alpha >= 0 (monotonicity dF/dt <= 0 on the control box)");
    }
  }
}

// ---------------------------------------------------------------------------
// L

ObjectiveL::ObjectiveL(Family family, Field y_d, double nu, double tau)
    : family_(family), y_d_(std::move(y_d)), nu_(nu), tau_(tau) {
  require_finite(nu, "L parameter nu");
  require_finite(tau, "L parameter tau");
}

ObjectiveL ObjectiveL::tracking(Field y_d, double nu) { return {Family::Tracking, std::move(y_d), nu, 0.0}; }

ObjectiveL ObjectiveL::nonconvex(Field y_d, double nu, double tau) {
  return {Family::Nonconvex, std::move(y_d), nu, tau};
}

std::string ObjectiveL::name() const { return family_ == Family::Tracking ? "tracking" : "nonconvex"; }

Partials ObjectiveL::eval(std::size_t node, double t, double xi) const {
  const double e = t - y_d_[node];
  Partials p;
  p.value = 0.5 * e * e + 0.5 * nu_ * xi * xi;
  p.dt = e;
  p.dxi = nu_ * xi;
  p.dtt = 1.0;
  p.dxixi = nu_;
  if (family_ == Family::Nonconvex) {
    const double s = std::sin(xi);
    p.value += tau_ * s;
    p.dxi += tau_ * std::cos(xi);
    p.dxixi -= tau_ * s;
  }
  return p;
}

double ObjectiveL::bound(double M, const ControlBounds& bounds) const {
  const double e_max = M + y_d_.values().cwiseAbs().maxCoeff();
  const double xi_max = bounds.max_abs();
  const double an = std::abs(nu_);
  double value = 0.5 * e_max * e_max + 0.5 * an * xi_max * xi_max;
  double sum = e_max + an * xi_max + 1.0 + an;
  if (family_ == Family::Nonconvex) {
    const double at = std::abs(tau_);
    const double smax = sin_range(bounds.alpha(), bounds.beta()).max_abs();
    const double cmax = cos_range(bounds.alpha(), bounds.beta()).max_abs();
    value += at * smax;
    sum += at * cmax + at * smax;
  }
  return std::max(value, sum);
}

void ObjectiveL::check_parameters() const {
  if (nu_ < 0.0) throw AssumptionViolation("L." + name() + ": nu must be >= 0");
}

// ---------------------------------------------------------------------------

Problem::Problem(std::shared_ptr<const FractionalOperator> op, ControlBounds bounds, NonlinearityF f, ObjectiveL l)
    : op_(std::move(op)), bounds_(bounds), f_(std::move(f)), l_(std::move(l)) {
  if (!op_) throw std::invalid_argument("problem: null operator");
  require_grid(f_.f0(), op_->grid());
  require_grid(l_.y_d(), op_->grid());
  f_.check_parameters(bounds_);
  l_.check_parameters();
}

HamiltonianPartials hamiltonian(const Problem& prob, std::size_t node, double t, double eta, double xi) {
  const Partials l = prob.L().eval(node, t, xi);
  const Partials f = prob.F().eval(node, t, xi);
  return {l.value + eta * f.value, l.dt + eta * f.dt,     l.dxi + eta * f.dxi,
          l.dtt + eta * f.dtt,     l.dtxi + eta * f.dtxi, l.dxixi + eta * f.dxixi};
}

Field switching_function(const Problem& prob, const Field& y, const Field& q, const Field& u) {
  require_grid(y, prob.grid());
  require_same_grid(y, q);
  require_same_grid(y, u);
  Eigen::VectorXd d(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double lxi = prob.L().eval(i, y[i], u[i]).dxi;
    const double fxi = prob.F().eval(i, y[i], u[i]).dxi;
    d[static_cast<Eigen::Index>(i)] = lxi + q[i] * fxi;
  }
  return y.with_values(std::move(d));
}

FamilyReport validate_family(const NonlinearityF& F, const ObjectiveL& L, const ControlBounds& bounds, double M,
                             std::size_t samples, Rng& rng) {
  if (!(M > 0.0)) throw std::invalid_argument("validate_family: M must be positive");
  require_same_grid(F.f0(), L.y_d());
  FamilyReport rep;
  rep.samples = samples;
  rep.closed_form_CF = F.derivative_bound(M, bounds);
  rep.closed_form_CL = L.bound(M, bounds);
  rep.f0_finite = F.f0().values().allFinite();
  const std::size_t nodes = F.f0().size();
  for (std::size_t k = 0; k < samples; ++k) {
    const auto node = static_cast<std::size_t>(rng.index(nodes));
    const double t = rng.uniform(-M, M);
    const double xi = rng.uniform(bounds.alpha(), bounds.beta());
    const Partials pf = F.eval(node, t, xi);
    const Partials pl = L.eval(node, t, xi);
    if (pf.dt > 0.0 && rep.accepted) {
      rep.accepted = false;
      rep.witness = FamilyWitness{node, t, xi, pf.dt};
    }
    rep.empirical_CF = std::max(rep.empirical_CF, pf.abs_derivative_sum());
    rep.empirical_CL = std::max({rep.empirical_CL, std::abs(pl.value), pl.abs_derivative_sum()});
  }
  const double slack = 1e-12;
  rep.bounds_consistent = rep.empirical_CF <= rep.closed_form_CF * (1.0 + slack) + slack &&
                          rep.empirical_CL <= rep.closed_form_CL * (1.0 + slack) + slack;
  return rep;
}

FamilyReport validate_family(const Problem& prob, double M, std::size_t samples, Rng& rng) {
  return validate_family(prob.F(), prob.L(), prob.bounds(), M, samples, rng);
}

}  // namespace fracocp
