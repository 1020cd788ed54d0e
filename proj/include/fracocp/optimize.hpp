#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracocp/calculus.hpp"

namespace fracocp {

struct OptimSettings {
  double step0 = 1.0;
  double armijo_c = 1e-4;
  double shrink = 0.5;
  int max_iter = 500;
  /// Unset: 1e-8 * (beta - alpha).
  std::optional<double> stat_tol;
  /// Projected Newton: CG on the inactive set with the matrix-free Hessian,
  /// gradient step on the active set, gradient fallback on negative curvature.
  bool use_newton = false;
  int cg_max_iter = 200;
  double cg_rel_tol = 1e-10;
  /// Line search gives up below this step.
  double min_step = 1e-14;
  SolveSettings solve;

  void validate() const;
  double stationarity_tol(const ControlBounds& b) const { return stat_tol ? *stat_tol : 1e-8 * b.width(); }
};

struct TraceRow {
  int iter = 0;
  double J = 0.0;
  double residual = 0.0;
  double step = 0.0;
  std::size_t active = 0;
};

/// Row 0 is the starting point; each further row is an accepted iteration.
struct OptimTrace {
  std::vector<TraceRow> rows;
  int accepted_steps() const { return rows.empty() ? 0 : static_cast<int>(rows.size()) - 1; }
};

enum class OptimStatus { Converged, MaxIterations, LineSearchFailure };
std::string to_string(OptimStatus s);

struct OptimResult {
  ReducedEval at;
  OptimTrace trace;
  OptimStatus status = OptimStatus::MaxIterations;
  double residual = 0.0;
  double stat_tol = 0.0;
};

/// Nodewise clamp into [alpha, beta].
Field project(const ControlBounds& bounds, const Field& v);

/// || u - P(u - d) ||_inf
double stationarity_residual(const ControlBounds& bounds, const Field& u, const Field& d);

/// Distance from a bound below which a node counts as active.
inline double active_tolerance(const ControlBounds& b) { return 1e-12 * b.width(); }
std::size_t count_active(const ControlBounds& bounds, const Field& u);

/// Nodewise sign form of the variational inequality: d >= -tol at alpha,
/// d <= tol at beta, |d| <= tol elsewhere (at-bound within `active_tol`).
bool sign_conditions_hold(const ControlBounds& bounds, const Field& u, const Field& d, double tol,
                          double active_tol);

/// Projected descent from u0 (projected first if infeasible). Solver failures
/// in the state equation propagate as SolverError; line-search failure is
/// reported through `status`.
OptimResult optimize(const Problem& prob, const Field& u0, const OptimSettings& settings = {});

/// `iter,J,residual,step,active`
void write_trace_csv(std::ostream& os, const OptimTrace& trace);

}  // namespace fracocp
