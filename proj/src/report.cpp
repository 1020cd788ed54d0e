#include "fracocp/report.hpp"

#include <cmath>
#include <fstream>

#include "fracocp/errors.hpp"

namespace fracocp {

using nlohmann::json;

json json_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

namespace {

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

}  // namespace

json to_json(const KKTReport& r) {
  json j;
  j["verdict"] = r.verdict;
  j["feasible"] = r.feasible;
  j["infeasible_nodes"] = r.infeasible_nodes;
  if (!r.feasible) return j;
  j["J"] = json_number(r.J);
  j["stationarity"] = {{"residual", json_number(r.stationarity_residual)},
                       {"tol", json_number(r.stat_tol)},
                       {"pass", r.stationarity_pass},
                       {"sign_conditions_pass", r.sign_conditions_pass}};
  j["pontryagin"] = {{"gap_sup", json_number(r.pontryagin_gap)},
                     {"h_scale", json_number(r.pontryagin_h_scale)},
                     {"tol", json_number(r.pontryagin_tol)},
                     {"pass", r.pontryagin_pass}};
  j["integral_minimum"] = {{"trials", r.integral_minimum.trials},
                           {"violations", r.integral_minimum.violations},
                           {"min_margin", json_number(r.integral_minimum.min_margin)}};
  j["critical_cone"] = {{"trivial", r.cone.trivial},
                        {"directions", r.cone.dirs.size()},
                        {"free_nodes", r.cone.free_nodes},
                        {"sign_nodes", r.cone.sign_nodes},
                        {"zero_nodes", r.cone.zero_nodes}};
  j["second_order"] = {{"cone_min", json_number(r.second_order.cone_min)},
                       {"tol", json_number(r.second_order.tol)},
                       {"directions", r.second_order.n_dirs},
                       {"vacuous", r.second_order.vacuous},
                       {"pass", r.second_order.pass}};
  const auto& s = r.structural;
  j["structural"] = {{"holds", s.holds},
                     {"gamma", s.gamma_infinite ? json("inf") : json_number(s.gamma)},
                     {"K", json_number(s.K)},
                     {"K_sup", json_number(s.K_sup)},
                     {"eps0", json_number(s.eps0)},
                     {"eps0_sup", json_number(s.eps0_sup)},
                     {"min_abs_d", json_number(s.min_abs_d)},
                     {"eps", numbers(s.eps)},
                     {"measure", numbers(s.measure)},
                     {"note", s.note}};
  const auto& g = r.growth;
  std::vector<double> linf_viol(g.linf_violations.begin(), g.linf_violations.end());
  j["growth"] = {{"applicable", g.applicable},
                 {"kappa", json_number(g.kappa)},
                 {"exponent", json_number(g.exponent)},
                 {"trials", g.trials},
                 {"violations", g.violations},
                 {"min_margin", json_number(g.min_margin)},
                 {"min_ratio", json_number(g.min_ratio)},
                 {"l2_route_in_hypotheses", g.l2_route_in_hypotheses},
                 {"linf",
                  {{"checked", g.linf_checked},
                   {"radius", json_number(g.linf_radius)},
                   {"radii", numbers(g.linf_radii)},
                   {"violations", numbers(linf_viol)},
                   {"min_margin", json_number(g.linf_min_margin)}}}};
  j["coercivity"] = {{"nu_min", json_number(r.coercivity.nu_min)},
                     {"node", r.coercivity.node},
                     {"xi", json_number(r.coercivity.xi)},
                     {"pass", r.coercivity.pass}};
  json rows = json::array();
  for (const auto& row : r.quadratic_growth.rows) {
    rows.push_back({{"radius", json_number(row.radius)},
                    {"min_ratio", json_number(row.min_ratio)},
                    {"samples", row.samples}});
  }
  j["quadratic_growth"] = {
      {"rows", rows}, {"delta_est", json_number(r.quadratic_growth.delta_est)}, {"pass", r.quadratic_growth.pass}};
  return j;
}

json to_json(const FamilyReport& r) {
  json j = {{"accepted", r.accepted},
            {"samples", r.samples},
            {"empirical_CF", json_number(r.empirical_CF)},
            {"closed_form_CF", json_number(r.closed_form_CF)},
            {"empirical_CL", json_number(r.empirical_CL)},
            {"closed_form_CL", json_number(r.closed_form_CL)},
            {"bounds_consistent", r.bounds_consistent},
            {"f0_finite", r.f0_finite}};
  if (r.witness) {
    j["witness"] = {{"node", r.witness->node},
                    {"t", json_number(r.witness->t)},
                    {"xi", json_number(r.witness->xi)},
                    {"dF_dt", json_number(r.witness->dF_dt)}};
  }
  return j;
}

json to_json(const LipschitzReport& r) {
  return {{"pairs", r.pairs},
          {"p", json_number(r.p)},
          {"state_l2_per_l1", json_number(r.state_l2_per_l1)},
          {"state_linf_per_lp", json_number(r.state_linf_per_lp)},
          {"adjoint_linf_per_lp", json_number(r.adjoint_linf_per_lp)},
          {"sensitivity_l2_per_l1", json_number(r.sensitivity_l2_per_l1)}};
}

json describe(const RunConfig& cfg) {
  json extent = json::array();
  for (const auto& e : cfg.extent) extent.push_back({e.lo, e.hi});
  const char* fam_F = cfg.F_family == NonlinearityF::Family::Linear  ? "F1"
                      : cfg.F_family == NonlinearityF::Family::Cubic ? "F2"
                                                                     : "F3";
  return {{"dim", cfg.dim()},
          {"extent", extent},
          {"n", cfg.n},
          {"s", cfg.s},
          {"bounds", {{"alpha", cfg.alpha}, {"beta", cfg.beta}}},
          {"F", {{"family", fam_F}, {"c", cfg.F_c}, {"kappa_g", cfg.F_kappa_g}, {"d", cfg.F_d}}},
          {"L",
           {{"family", cfg.L_family == ObjectiveL::Family::Tracking ? "L1" : "L2"},
            {"nu", cfg.L_nu},
            {"tau", cfg.L_tau}}},
          {"seed", cfg.seed}};
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw Error("write failed: " + path.string());
}

}  // namespace fracocp
