#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "fracocp/config.hpp"
#include "fracocp/optimize.hpp"
#include "fracocp/verify.hpp"

namespace fracocp {

/// Process exit codes of the command line tool.
enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitConfig = 2, kExitSolver = 3 };

struct StartSummary {
  double J = 0.0;
  double residual = 0.0;
  OptimStatus status = OptimStatus::MaxIterations;
  int iterations = 0;
};

struct SolveArtifacts {
  Scenario scenario;
  OptimResult result;  ///< the chosen start
  std::vector<StartSummary> starts;
  std::size_t chosen = 0;
  KKTReport report;
};

/// Optimizes from u0 and from multistart - 1 random smooth admissible starts
/// (stream "multistart"), keeps the stationary start of lowest J (lowest
/// residual if none is stationary) and certifies it.
SolveArtifacts run_solve(const RunConfig& cfg);

struct CertifyArtifacts {
  Scenario scenario;
  std::optional<ReducedEval> at;  ///< empty for an infeasible control
  bool computed_y = false;
  bool computed_q = false;
  KKTReport report;
};

/// y and q are recomputed from u when not supplied. Fields must live on the config grid.
CertifyArtifacts run_certify(const RunConfig& cfg, const Field& u, const std::optional<Field>& y = std::nullopt,
                             const std::optional<Field>& q = std::nullopt);

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  double error_l2 = 0.0;  ///< || I y_n - y_ref ||_2 on the reference grid
  double lambda1 = 0.0;
  double lambda1_error = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  int n_ref = 0;
  bool optimal = false;
  /// Least-squares slope of log error against log h.
  double observed_order = 0.0;
  std::vector<double> pairwise_orders;
  bool errors_decreasing = false;
  double lambda1_exact = 0.0;
  bool lambda1_monotone_below = false;
};

/// Solves on every n in `n_list` (increasing) and on a reference grid with
/// 4 (max(n) + 1) - 1 nodes per axis (h_ref = h_min / 4), interpolating each
/// solution to the reference.
/// Data must be expressions or constants (grid independent).
ConvergenceTable run_convergence(const RunConfig& cfg, const std::vector<int>& n_list);

FamilyReport run_validate_family(const RunConfig& cfg);

nlohmann::json solve_json(const RunConfig& cfg, const SolveArtifacts& a);
nlohmann::json certify_json(const RunConfig& cfg, const CertifyArtifacts& a);
nlohmann::json convergence_json(const RunConfig& cfg, const ConvergenceTable& t);
nlohmann::json family_json(const RunConfig& cfg, const FamilyReport& r);

/// u, y, q, d CSVs, trace.csv and report.json, as selected by the config formats.
void write_solve_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const SolveArtifacts& a);
void write_certify_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const CertifyArtifacts& a);
void write_convergence_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const ConvergenceTable& t);
void write_family_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const FamilyReport& r);

inline int verdict_exit_code(const KKTReport& r) { return r.verdict == "PASS" ? kExitPass : kExitFail; }

}  // namespace fracocp
