#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>

#include "fracocp/grid.hpp"
#include "fracocp/random.hpp"
#include "fracocp/spectral.hpp"

namespace fracocp {

/// Box [alpha, beta], beta > alpha.
class ControlBounds {
 public:
  ControlBounds(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double width() const { return beta_ - alpha_; }
  double max_abs() const;
  double clamp(double v) const { return v < alpha_ ? alpha_ : (v > beta_ ? beta_ : v); }
  bool contains(double v) const { return v >= alpha_ && v <= beta_; }

 private:
  double alpha_;
  double beta_;
};

/// Value and first/second partials of a function of (t, xi) at a fixed node.
struct Partials {
  double value = 0.0;
  double dt = 0.0;
  double dxi = 0.0;
  double dtt = 0.0;
  double dtxi = 0.0;
  double dxixi = 0.0;

  /// sum_{1 <= i+j <= 2} |d^{i+j} / dt^i dxi^j|
  double abs_derivative_sum() const;
};

/**
 * Right-hand side F(x, t, xi) of the state equation.
 *
 *   Linear:  f0(x) - c t + xi
 *   Cubic:   f0(x) - t^3 - c t + xi + kappa_g sin(xi)
 *   Damping: f0(x) - (c + d xi^2) t           (requires alpha >= 0)
 */
class NonlinearityF {
 public:
  enum class Family { Linear, Cubic, Damping };

  static NonlinearityF linear(Field f0, double c);
  static NonlinearityF cubic(Field f0, double c, double kappa_g);
  static NonlinearityF damping(Field f0, double c, double d);

  Family family() const { return family_; }
  std::string name() const;
  const Field& f0() const { return f0_; }
  double c() const { return c_; }
  double kappa_g() const { return kappa_g_; }
  double d() const { return d_; }

  Partials eval(std::size_t node, double t, double xi) const;
  double value(std::size_t node, double t, double xi) const { return eval(node, t, xi).value; }

  /// Closed-form upper bound of sum |partials| over |t| <= M, xi in bounds.
  double derivative_bound(double M, const ControlBounds& bounds) const;

  /// Throws AssumptionViolation naming the hypothesis a parameter breaks.
  void check_parameters(const ControlBounds& bounds) const;

 private:
  NonlinearityF(Family family, Field f0, double c, double kappa_g, double d);

  Family family_;
  Field f0_;
  double c_;
  double kappa_g_;
  double d_;
};

/**
 * Objective integrand L(x, t, xi).
 *
 *   Tracking:  (t - y_d)^2 / 2 + nu xi^2 / 2
 *   Nonconvex: (t - y_d)^2 / 2 + nu xi^2 / 2 + tau sin(xi)
 */
class ObjectiveL {
 public:
  enum class Family { Tracking, Nonconvex };

  static ObjectiveL tracking(Field y_d, double nu);
  static ObjectiveL nonconvex(Field y_d, double nu, double tau);

  Family family() const { return family_; }
  std::string name() const;
  const Field& y_d() const { return y_d_; }
  double nu() const { return nu_; }
  double tau() const { return tau_; }

  Partials eval(std::size_t node, double t, double xi) const;
  double value(std::size_t node, double t, double xi) const { return eval(node, t, xi).value; }

  /// Closed-form bound of max(|L|, sum |partials|) over |t| <= M, xi in bounds.
  double bound(double M, const ControlBounds& bounds) const;

  void check_parameters() const;

 private:
  ObjectiveL(Family family, Field y_d, double nu, double tau);

  Family family_;
  Field y_d_;
  double nu_;
  double tau_;
};

/// Bundle of operator, control box, F and L. All parts share one grid.
class Problem {
 public:
  Problem(std::shared_ptr<const FractionalOperator> op, ControlBounds bounds, NonlinearityF f, ObjectiveL l);

  const FractionalOperator& op() const { return *op_; }
  const std::shared_ptr<const FractionalOperator>& op_ptr() const { return op_; }
  const Grid& grid() const { return op_->grid(); }
  const GridPtr& grid_ptr() const { return op_->grid_ptr(); }
  double s() const { return op_->s(); }
  const ControlBounds& bounds() const { return bounds_; }
  const NonlinearityF& F() const { return f_; }
  const ObjectiveL& L() const { return l_; }

 private:
  std::shared_ptr<const FractionalOperator> op_;
  ControlBounds bounds_;
  NonlinearityF f_;
  ObjectiveL l_;
};

/// H = L + eta F and its partials in (y, u) at one node.
struct HamiltonianPartials {
  double value = 0.0;
  double dy = 0.0;
  double du = 0.0;
  double dyy = 0.0;
  double dyu = 0.0;
  double duu = 0.0;
};

HamiltonianPartials hamiltonian(const Problem& prob, std::size_t node, double t, double eta, double xi);

/// d = dL/du(x, y, u) + q dF/du(x, y, u), nodewise.
Field switching_function(const Problem& prob, const Field& y, const Field& q, const Field& u);

struct FamilyWitness {
  std::size_t node = 0;
  double t = 0.0;
  double xi = 0.0;
  double dF_dt = 0.0;
};

struct FamilyReport {
  bool accepted = true;                  ///< dF/dt <= 0 at every sample
  std::optional<FamilyWitness> witness;  ///< first monotonicity violation
  double empirical_CF = 0.0;             ///< max sampled sum |partials of F|
  double closed_form_CF = 0.0;
  double empirical_CL = 0.0;  ///< max sampled max(|L|, sum |partials of L|)
  double closed_form_CL = 0.0;
  bool bounds_consistent = true;  ///< empirical <= closed form for both
  bool f0_finite = true;
  std::size_t samples = 0;
};

/// Randomized audit over nodes x [-M, M] x [alpha, beta].
FamilyReport validate_family(const NonlinearityF& F, const ObjectiveL& L, const ControlBounds& bounds, double M,
                             std::size_t samples, Rng& rng);
FamilyReport validate_family(const Problem& prob, double M, std::size_t samples, Rng& rng);

}  // namespace fracocp
