#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracocp/calculus.hpp"
#include "fracocp/optimize.hpp"
#include "fracocp/random.hpp"

namespace fracocp {

struct VerifySettings {
  /// Hamiltonian scan: n_scan + 1 equispaced points, then golden section.
  int n_scan = 256;
  double golden_tol = 1e-10;
  /// u_i counts as at-bound within bound_rel_tol * (beta - alpha).
  double bound_rel_tol = 1e-10;
  /// d_i counts as nonzero outside max(d_rel_tol * ||d||_inf, d_abs_tol).
  /// certify raises d_abs_tol to the stationarity tolerance.
  double d_rel_tol = 1e-6;
  double d_abs_tol = 1e-12;
  int n_dirs = 200;
  /// Decreasing positive thresholds for the structural fit.
  /// Empty: ||d||_inf * 10^(-k/4), k = 0..16.
  std::vector<double> eps_grid;
  int n_trials = 1000;
  /// L-infinity ball radii (relative to beta - alpha) tried for the gamma = inf growth check.
  std::vector<double> linf_radii{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  /// L2 radii for the quadratic growth probe.
  std::vector<double> probe_radii{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  int n_per_radius = 20;
  int integral_trials = 100;

  void validate() const;
  std::vector<double> effective_eps_grid(double d_inf) const;
};

struct ScalarMin {
  double arg = 0.0;
  double value = 0.0;
};

/// Minimizes fn on [lo, hi]: dense scan of n_scan + 1 points, then golden
/// section on the bracket around the best sample down to width `tol`.
ScalarMin scan_minimize(const std::function<double(double)>& fn, double lo, double hi, int n_scan, double tol);

struct PontryaginScan {
  Field gap;        ///< H(u_i) - min_t H(t), signed
  Field argmin;
  Field min_value;
  double gap_sup = 0.0;
  double h_scale = 0.0;  ///< max_i |H(x_i, y_i, q_i, u_i)|
};

PontryaginScan pontryagin_scan(const Problem& prob, const Field& y, const Field& q, const Field& u, int n_scan = 256,
                               double tol = 1e-10);

struct IntegralMinimumCheck {
  int trials = 0;
  int violations = 0;
  double min_margin = 0.0;  ///< min over samples of int H(v) - int H(u)
};

/// int H(., y, q, u) <= int H(., y, q, v) for random feasible v (y, q frozen).
IntegralMinimumCheck integral_minimum_check(const Problem& prob, const Field& y, const Field& q, const Field& u,
                                            int trials, Rng& rng);

/// Nodewise restriction defining the critical cone.
enum class ConeRestriction : signed char { Free = 0, NonNegative = 1, NonPositive = -1, Zero = 2 };

std::vector<ConeRestriction> cone_restrictions(const ControlBounds& bounds, const Field& u, const Field& d,
                                               const VerifySettings& settings);

struct ConeSample {
  std::vector<Field> dirs;  ///< unit L2 norm, nonzero
  bool trivial = false;     ///< cone is {0}
  std::size_t free_nodes = 0;
  std::size_t sign_nodes = 0;
  std::size_t zero_nodes = 0;
};

/// Random critical directions: half iid nodal, half smooth, masked to satisfy
/// the sign conditions nodewise and normalized in L2.
ConeSample critical_cone_sample(const Problem& prob, const Field& u, const Field& d, int n_dirs, Rng& rng,
                                const VerifySettings& settings = {});

/// Audit of one direction against the nodewise cone conditions.
bool in_critical_cone(const ControlBounds& bounds, const Field& u, const Field& d, const Field& v,
                      const VerifySettings& settings = {});

struct SecondOrderResult {
  double cone_min = 0.0;
  double tol = 0.0;
  std::size_t n_dirs = 0;
  bool vacuous = false;
  bool pass = false;
};

/// min over dirs of J''(u)[v, v]; PASS if >= -1e-8 * max(1, |J(u)|).
SecondOrderResult second_order_necessary(const Problem& prob, const ReducedEval& at, std::span<const Field> dirs);

struct StructuralFit {
  bool holds = false;
  bool gamma_infinite = false;
  double K = 0.0;
  double gamma = 0.0;
  double eps0 = 0.0;
  /// max over fitted points of m(eps) / eps^gamma: validates the bound on the whole fitted range.
  double K_sup = 0.0;
  double eps0_sup = 0.0;
  double min_abs_d = 0.0;
  std::vector<double> eps;
  std::vector<double> measure;  ///< m(eps) = |{ |d| < eps }|
  std::string note;
};

StructuralFit structural_fit(const Field& d, std::span<const double> eps_grid);

/// kappa = 1 / (2 [4 max(|alpha|, |beta|) K]^{1/gamma}); gamma = inf gives 1/2.
double growth_kappa(const ControlBounds& bounds, double K, double gamma);

struct GrowthReport {
  bool applicable = false;
  double kappa = 0.0;
  double exponent = 1.0;  ///< 1 + 1/gamma
  std::size_t trials = 0;
  std::size_t violations = 0;
  double min_margin = 0.0;  ///< min of J'(u)(v-u) - kappa ||v-u||_1^exponent
  double min_ratio = 0.0;   ///< min of J'(u)(v-u) / ||v-u||_1^exponent
  std::optional<Field> witness;
  /// The L2 sufficiency route needs gamma > 1.
  bool l2_route_in_hypotheses = false;

  bool linf_checked = false;
  double linf_radius = 0.0;  ///< largest tried radius with no violation, 0 if none
  std::vector<double> linf_radii;
  std::vector<std::size_t> linf_violations;
  double linf_min_margin = 0.0;  ///< at the validated radius
};

/// Checks J'(u)(v-u) >= kappa ||v-u||_1^{1+1/gamma} on random feasible v and,
/// for gamma = inf, J(v) >= J(u) + kappa/2 ||v-u||_1 on small L-infinity balls.
GrowthReport growth_check(const Problem& prob, const ReducedEval& at, const StructuralFit& fit, int n_trials,
                          Rng& rng, const VerifySettings& settings = {}, const SolveSettings& solve = {});

struct CoercivityResult {
  double nu_min = 0.0;
  std::size_t node = 0;
  double xi = 0.0;
  bool pass = false;
};

/// min over nodes and xi in [alpha, beta] of d2H/du2(x_i, y_i, q_i, xi).
CoercivityResult coercivity_check(const Problem& prob, const Field& y, const Field& q, int n_scan = 256,
                                  double tol = 1e-10);

struct GrowthProbeRow {
  double radius = 0.0;
  double min_ratio = 0.0;  ///< min (J(v) - J(u)) / ||v - u||_2^2
  std::size_t samples = 0;
};

struct GrowthProbe {
  std::vector<GrowthProbeRow> rows;
  double delta_est = 0.0;  ///< min ratio at the smallest radius
  bool pass = false;
};

/// The same random unit directions are used at every radius.
GrowthProbe quadratic_growth_probe(const Problem& prob, const ReducedEval& at, std::span<const double> radii,
                                   int n_per_radius, Rng& rng, const SolveSettings& solve = {});

struct KKTReport {
  bool feasible = true;
  std::size_t infeasible_nodes = 0;
  double J = 0.0;

  double stationarity_residual = 0.0;
  double stat_tol = 0.0;
  bool stationarity_pass = false;
  bool sign_conditions_pass = false;

  double pontryagin_gap = 0.0;
  double pontryagin_h_scale = 0.0;
  double pontryagin_tol = 0.0;
  bool pontryagin_pass = false;
  IntegralMinimumCheck integral_minimum;

  ConeSample cone;  ///< directions are not serialized
  SecondOrderResult second_order;
  StructuralFit structural;
  GrowthReport growth;
  CoercivityResult coercivity;
  GrowthProbe quadratic_growth;

  /// "PASS" iff stationarity holds, "FAIL" otherwise, "INFEASIBLE" for u outside the box.
  std::string verdict;
};

/// Runs every check on a consistent (u, y, q). Randomized probes draw from
/// named streams of `seeds`.
KKTReport certify(const Problem& prob, const ReducedEval& at, const VerifySettings& settings,
                  const SeedStreams& seeds, const SolveSettings& solve, double stat_tol);

/// Feasibility-only report for a control outside the box.
KKTReport infeasible_report(const Problem& prob, const Field& u);

}  // namespace fracocp
