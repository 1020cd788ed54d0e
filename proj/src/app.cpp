#include "fracocp/app.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "fracocp/errors.hpp"
#include "fracocp/field_io.hpp"
#include "fracocp/pde.hpp"
#include "fracocp/report.hpp"

namespace fracocp {

using nlohmann::json;

SolveArtifacts run_solve(const RunConfig& cfg) {
  Scenario sc = build_scenario(cfg);
  const Problem& prob = sc.problem;
  const SeedStreams seeds(cfg.seed);

  std::vector<Field> starts{sc.u0};
  Rng rng = seeds.stream("multistart");
  for (int k = 1; k < cfg.multistart; ++k) {
    starts.push_back(random_admissible(sc.grid, cfg.alpha, cfg.beta, rng, true));
  }

  std::optional<OptimResult> best;
  std::vector<StartSummary> summary;
  std::size_t chosen = 0;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    OptimResult r = optimize(prob, starts[k], cfg.optim);
    summary.push_back({r.at.J, r.residual, r.status, r.trace.accepted_steps()});
    bool better = !best;
    if (best) {
      const bool ok = r.residual <= r.stat_tol;
      const bool best_ok = best->residual <= best->stat_tol;
      better = ok != best_ok ? ok : (ok ? r.at.J < best->at.J : r.residual < best->residual);
    }
    if (better) {
      best = std::move(r);
      chosen = k;
    }
  }

  KKTReport report = certify(prob, best->at, cfg.verify, seeds, cfg.solve, best->stat_tol);
  return {std::move(sc), std::move(*best), std::move(summary), chosen, std::move(report)};
}

CertifyArtifacts run_certify(const RunConfig& cfg, const Field& u, const std::optional<Field>& y,
                             const std::optional<Field>& q) {
  Scenario sc = build_scenario(cfg);
  const Problem& prob = sc.problem;
  require_grid(u, prob.grid());
  if (y) require_grid(*y, prob.grid());
  if (q) require_grid(*q, prob.grid());

  CertifyArtifacts out{std::move(sc), std::nullopt, !y, !q, {}};
  const Problem& p = out.scenario.problem;
  KKTReport feas = infeasible_report(p, u);
  if (!feas.feasible) {
    out.report = std::move(feas);
    return out;
  }
  Field yy = y ? *y : state_solve(p, u, cfg.solve).y;
  Field qq = q ? *q : adjoint_solve(p, yy, u);
  Field d = switching_function(p, yy, qq, u);
  const double J = objective_value(p, yy, u);
  out.at = ReducedEval{u, std::move(yy), std::move(qq), J, std::move(d)};
  out.report = certify(p, *out.at, cfg.verify, SeedStreams(cfg.seed), cfg.solve,
                       cfg.optim.stationarity_tol(p.bounds()));
  return out;
}

namespace {

double exact_lambda1(const RunConfig& cfg) {
  double l = 0.0;
  for (const auto& e : cfg.extent) l += std::numbers::pi * std::numbers::pi / (e.length() * e.length());
  return l;
}

Field converged_state(const RunConfig& cfg, const Scenario& sc) {
  if (cfg.converge_optimal) return optimize(sc.problem, sc.u0, cfg.optim).at.y;
  return state_solve(sc.problem, sc.u0, cfg.solve).y;
}

}  // namespace

ConvergenceTable run_convergence(const RunConfig& cfg, const std::vector<int>& n_list) {
  if (n_list.empty()) throw ConfigError("/convergence/n_list", "empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 2 || (i > 0 && n_list[i] <= n_list[i - 1])) {
      throw ConfigError("/convergence/n_list", "must be increasing with entries >= 2");
    }
  }
  for (const DataSource* src : {&cfg.f0, &cfg.y_d, &cfg.u0}) {
    if (src->kind == DataSource::Kind::Csv) {
      throw ConfigError(src->pointer, "convergence study needs grid-independent data (expression or constant)");
    }
  }

  ConvergenceTable t;
  t.optimal = cfg.converge_optimal;
  t.n_ref = 4 * (n_list.back() + 1) - 1;
  t.lambda1_exact = exact_lambda1(cfg);

  const Scenario ref = build_scenario(cfg.with_n(t.n_ref));
  const Field y_ref = converged_state(cfg, ref);

  for (int n : n_list) {
    const Scenario sc = build_scenario(cfg.with_n(n));
    const Field y = converged_state(cfg, sc);
    ConvergenceRow row;
    row.n = n;
    row.h = sc.grid->h(0);
    row.error_l2 = norm(interpolate(y, ref.grid) - y_ref, Norm::L2);
    row.lambda1 = sc.problem.op().basis().lambda()[0];
    row.lambda1_error = std::abs(row.lambda1 - t.lambda1_exact);
    t.rows.push_back(row);
  }

  t.errors_decreasing = true;
  t.lambda1_monotone_below = true;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& r = t.rows[k];
    if (!(r.lambda1 < t.lambda1_exact)) t.lambda1_monotone_below = false;
    if (k == 0) continue;
    const auto& p = t.rows[k - 1];
    if (!(r.error_l2 < p.error_l2)) t.errors_decreasing = false;
    if (!(r.lambda1 > p.lambda1)) t.lambda1_monotone_below = false;
    t.pairwise_orders.push_back(std::log(p.error_l2 / r.error_l2) / std::log(p.h / r.h));
  }
  if (t.rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(t.rows.size());
    for (const auto& r : t.rows) {
      const double x = std::log(r.h), y = std::log(r.error_l2);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    t.observed_order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return t;
}

FamilyReport run_validate_family(const RunConfig& cfg) {
  const Scenario sc = build_scenario(cfg);
  Rng rng = SeedStreams(cfg.seed).stream("validate_family");
  return validate_family(sc.problem, cfg.family_M, static_cast<std::size_t>(cfg.family_samples), rng);
}

json solve_json(const RunConfig& cfg, const SolveArtifacts& a) {
  json starts = json::array();
  for (const auto& s : a.starts) {
    starts.push_back({{"J", json_number(s.J)},
                      {"residual", json_number(s.residual)},
                      {"status", to_string(s.status)},
                      {"iterations", s.iterations}});
  }
  return {{"schema", 1},
          {"command", "solve"},
          {"problem", describe(cfg)},
          {"optimizer",
           {{"status", to_string(a.result.status)},
            {"iterations", a.result.trace.accepted_steps()},
            {"residual", json_number(a.result.residual)},
            {"stat_tol", json_number(a.result.stat_tol)},
            {"use_newton", cfg.optim.use_newton},
            {"starts", starts},
            {"chosen_start", a.chosen}}},
          {"kkt", to_json(a.report)},
          {"verdict", a.report.verdict}};
}

json certify_json(const RunConfig& cfg, const CertifyArtifacts& a) {
  return {{"schema", 1},
          {"command", "certify"},
          {"problem", describe(cfg)},
          {"recomputed", {{"y", a.computed_y}, {"q", a.computed_q}}},
          {"kkt", to_json(a.report)},
          {"verdict", a.report.verdict}};
}

json convergence_json(const RunConfig& cfg, const ConvergenceTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"n", r.n},
                    {"h", json_number(r.h)},
                    {"error_l2", json_number(r.error_l2)},
                    {"lambda1", json_number(r.lambda1)},
                    {"lambda1_error", json_number(r.lambda1_error)}});
  }
  json orders = json::array();
  for (double o : t.pairwise_orders) orders.push_back(json_number(o));
  return {{"schema", 1},
          {"command", "converge"},
          {"problem", describe(cfg)},
          {"mode", t.optimal ? "optimal" : "state"},
          {"n_ref", t.n_ref},
          {"rows", rows},
          {"observed_order", json_number(t.observed_order)},
          {"pairwise_orders", orders},
          {"errors_decreasing", t.errors_decreasing},
          {"lambda1_exact", json_number(t.lambda1_exact)},
          {"lambda1_monotone_below", t.lambda1_monotone_below}};
}

json family_json(const RunConfig& cfg, const FamilyReport& r) {
  return {{"schema", 1},
          {"command", "validate-family"},
          {"problem", describe(cfg)},
          {"M", cfg.family_M},
          {"family", to_json(r)}};
}

namespace {

void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
}

}  // namespace

void write_solve_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const SolveArtifacts& a) {
  prepare_dir(dir);
  if (cfg.write_csv) {
    write_field_csv(dir / "u.csv", a.result.at.u);
    write_field_csv(dir / "y.csv", a.result.at.y);
    write_field_csv(dir / "q.csv", a.result.at.q);
    write_field_csv(dir / "d.csv", a.result.at.grad);
    std::ofstream os(dir / "trace.csv", std::ios::binary);
    if (!os) throw Error("cannot open " + (dir / "trace.csv").string() + " for writing");
    write_trace_csv(os, a.result.trace);
  }
  if (cfg.write_json) write_json(dir / "report.json", solve_json(cfg, a));
}

void write_certify_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const CertifyArtifacts& a) {
  prepare_dir(dir);
  if (cfg.write_csv && a.at) {
    write_field_csv(dir / "y.csv", a.at->y);
    write_field_csv(dir / "q.csv", a.at->q);
    write_field_csv(dir / "d.csv", a.at->grad);
  }
  if (cfg.write_json) write_json(dir / "report.json", certify_json(cfg, a));
}

void write_convergence_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const ConvergenceTable& t) {
  prepare_dir(dir);
  if (cfg.write_csv) {
    std::ofstream os(dir / "convergence.csv", std::ios::binary);
    if (!os) throw Error("cannot open " + (dir / "convergence.csv").string() + " for writing");
    os << "n,h,error_l2,lambda1,lambda1_error\n";
    for (const auto& r : t.rows) {
      os << r.n << ',' << format_double(r.h) << ',' << format_double(r.error_l2) << ',' << format_double(r.lambda1)
         << ',' << format_double(r.lambda1_error) << '\n';
    }
  }
  if (cfg.write_json) write_json(dir / "report.json", convergence_json(cfg, t));
}

void write_family_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const FamilyReport& r) {
  prepare_dir(dir);
  write_json(dir / "report.json", family_json(cfg, r));
}

}  // namespace fracocp
