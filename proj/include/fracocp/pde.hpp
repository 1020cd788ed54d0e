#pragma once

#include <optional>
#include <vector>

#include "fracocp/problem.hpp"
#include "fracocp/random.hpp"
#include "fracocp/spectral.hpp"

namespace fracocp {

struct SolveSettings {
  /// Residual tolerance in discrete L2. Unset: 1e-10 * (1 + ||F(., 0, u)||_2).
  std::optional<double> newton_tol;
  int newton_max_iter = 50;
  /// Backtracking factor of the Armijo search on ||residual||^2 / 2.
  double damping = 0.5;
  /// Relative residual accepted from each shifted linear solve.
  double linear_tol = 1e-10;

  void validate() const;
  /// Same settings with the Newton tolerance divided by `factor`.
  SolveSettings tightened(double factor, double reference_tol) const;
};

struct StateSolution {
  Field y;
  /// ||residual||_2 at the initial iterate and after every accepted step.
  std::vector<double> residual_history;
  int iterations = 0;
  double tolerance = 0.0;
};

/// (-Delta_D)^s y - F(., y, u)
Field state_residual(const Problem& prob, const Field& y, const Field& u);

/// b = -dF/dy(., y, u), checked nonnegative (AssumptionViolation otherwise).
Field monotone_shift(const Problem& prob, const Field& y, const Field& u);

/// Damped Newton for (-Delta_D)^s y = F(x, y, u). Throws SolverError with the
/// residual history when newton_max_iter is exhausted.
StateSolution state_solve(const Problem& prob, const Field& u, const SolveSettings& settings = {});

/**
 * Linearization of the state equation at (y, u): the operator
 * (-Delta_D)^s - dF/dy is factored once and reused for the sensitivity,
 * second-sensitivity and adjoint solves. Keeps a reference to `prob`, which
 * must outlive it.
 */
class Linearization {
 public:
  Linearization(const Problem& prob, Field y, Field u);

  const Field& y() const { return y_; }
  const Field& u() const { return u_; }
  const Problem& problem() const { return *prob_; }

  /// ((-Delta_D)^s - dF/dy)^{-1} rhs
  Field solve(const Field& rhs) const;
  /// z = G'(u) v
  Field sensitivity(const Field& v) const;
  /// rho = G''(u)(v, w); zv, zw are the first sensitivities of v and w.
  Field second_sensitivity(const Field& v, const Field& w, const Field& zv, const Field& zw) const;
  Field second_sensitivity(const Field& v, const Field& w) const;
  /// Adjoint state for the right-hand side dL/dy(., y, u).
  Field adjoint() const;

 private:
  const Problem* prob_;
  Field y_;
  Field u_;
  ShiftedSystem system_;
};

Field linearized_solve(const Problem& prob, const Field& y, const Field& u, const Field& v);
Field second_sensitivity(const Problem& prob, const Field& y, const Field& u, const Field& v, const Field& w);
Field adjoint_solve(const Problem& prob, const Field& y, const Field& u);

/// Largest observed Lipschitz-type ratios over random admissible control pairs.
struct LipschitzReport {
  double state_l2_per_l1 = 0.0;         ///< ||y - yb||_2 / ||u - ub||_1
  double state_linf_per_lp = 0.0;       ///< ||y - yb||_inf / ||u - ub||_{p}
  double adjoint_linf_per_lp = 0.0;     ///< ||q - qb||_inf / ||u - ub||_{p}
  double sensitivity_l2_per_l1 = 0.0;   ///< ||G'(u) v||_2 / ||v||_1
  double p = 2.0;
  int pairs = 0;
};

/// Controls are grid-independent smooth random functions, so reports from two
/// grids of the same box are comparable.
LipschitzReport lipschitz_probe(const Problem& prob, int pairs, Rng& rng, const SolveSettings& settings = {});

}  // namespace fracocp
