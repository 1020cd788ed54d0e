// fracocp: solve, certify and study box-constrained fractional optimal control problems.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fracocp/app.hpp"
#include "fracocp/config.hpp"
#include "fracocp/errors.hpp"
#include "fracocp/field_io.hpp"

namespace fs = std::filesystem;
using namespace fracocp;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_override;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "run configuration (JSON)")->required();
  cmd->add_option("--out", c.out, "output directory (overrides outputs.dir)");
  cmd->add_option("--seed", c.seed, "seed for every randomized probe (overrides seed)");
  cmd->add_option("--n-override", c.n_override, "interior nodes per axis (overrides domain.n)")
      ->check(CLI::Range(2, 1 << 20));
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.n_override) cfg = cfg.with_n(*c.n_override);
  if (!c.out.empty()) cfg.out_dir = c.out;
  return cfg;
}

std::optional<Field> read_optional(const std::string& path, const GridPtr& grid) {
  if (path.empty()) return std::nullopt;
  return read_field_csv(fs::path(path), grid);
}

void print_verdict(const KKTReport& r) {
  std::cout << "verdict: " << r.verdict;
  if (r.feasible) {
    std::cout << "  stationarity residual " << format_double(r.stationarity_residual) << " (tol "
              << format_double(r.stat_tol) << ")";
  } else {
    std::cout << "  " << r.infeasible_nodes << " nodes outside the control box";
  }
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Box-constrained optimal control of semilinear spectral fractional equations"};
  app.require_subcommand(1);

  Common c_solve, c_cert, c_conv, c_fam;
  auto* solve = app.add_subcommand("solve", "optimize, then certify the result");
  add_common(solve, c_solve);

  auto* cert = app.add_subcommand("certify", "certify an externally supplied control");
  add_common(cert, c_cert);
  std::string u_path, y_path, q_path;
  cert->add_option("--u", u_path, "control CSV")->required();
  cert->add_option("--y", y_path, "state CSV (recomputed if absent)");
  cert->add_option("--q", q_path, "adjoint CSV (recomputed if absent)");

  auto* conv = app.add_subcommand("converge", "grid refinement study");
  add_common(conv, c_conv);
  std::vector<int> n_list;
  conv->add_option("--n-list", n_list, "increasing node counts (overrides convergence.n_list)")->delimiter(',');

  auto* fam = app.add_subcommand("validate-family", "randomized audit of the F/L hypotheses");
  add_common(fam, c_fam);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (solve->parsed()) {
      const RunConfig cfg = resolve(c_solve);
      const SolveArtifacts a = run_solve(cfg);
      write_solve_outputs(cfg.out_dir, cfg, a);
      std::cout << "optimizer: " << to_string(a.result.status) << " after " << a.result.trace.accepted_steps()
                << " iterations, J = " << format_double(a.result.at.J) << '\n';
      print_verdict(a.report);
      return verdict_exit_code(a.report);
    }
    if (cert->parsed()) {
      const RunConfig cfg = resolve(c_cert);
      const Scenario sc = build_scenario(cfg);
      std::optional<Field> u, y, q;
      try {
        u = read_field_csv(fs::path(u_path), sc.grid);
        y = read_optional(y_path, sc.grid);
        q = read_optional(q_path, sc.grid);
      } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
      }
      const CertifyArtifacts a = run_certify(cfg, *u, y, q);
      write_certify_outputs(cfg.out_dir, cfg, a);
      print_verdict(a.report);
      return verdict_exit_code(a.report);
    }
    if (conv->parsed()) {
      const RunConfig cfg = resolve(c_conv);
      const std::vector<int>& list = n_list.empty() ? cfg.n_list : n_list;
      const ConvergenceTable t = run_convergence(cfg, list);
      write_convergence_outputs(cfg.out_dir, cfg, t);
      std::cout << "n,error_l2,lambda1_error\n";
      for (const auto& r : t.rows) {
        std::cout << r.n << ',' << format_double(r.error_l2) << ',' << format_double(r.lambda1_error) << '\n';
      }
      std::cout << "observed order " << format_double(t.observed_order) << " (reference n = " << t.n_ref << ")\n";
      return kExitPass;
    }
    if (fam->parsed()) {
      const RunConfig cfg = resolve(c_fam);
      const FamilyReport r = run_validate_family(cfg);
      write_family_outputs(cfg.out_dir, cfg, r);
      std::cout << "family " << (r.accepted ? "accepted" : "rejected") << ", closed-form bounds "
                << (r.bounds_consistent ? "consistent" : "violated") << '\n';
      return r.accepted && r.bounds_consistent ? kExitPass : kExitFail;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    if (!e.history().empty()) {
      std::cerr << "residual history:";
      for (double r : e.history()) std::cerr << ' ' << format_double(r);
      std::cerr << '\n';
    }
    return kExitSolver;
  } catch (const GridMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitConfig;
}
