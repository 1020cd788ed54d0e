#include "fracocp/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fracocp/errors.hpp"
#include "fracocp/expr.hpp"
#include "fracocp/field_io.hpp"
#include "fracocp/spectral.hpp"

namespace fracocp {

using nlohmann::json;

namespace {

std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

const json& require_object(const json& j, const std::string& ptr) {
  if (!j.is_object()) throw ConfigError(ptr, "expected an object");
  return j;
}

void reject_unknown(const json& j, const std::string& ptr, std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw ConfigError(child(ptr, key), "unknown key");
  }
}

double as_number(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw ConfigError(ptr, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(ptr, "must be finite");
  return v;
}

int as_int(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw ConfigError(ptr, "expected an integer");
  const auto v = j.get<long long>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(ptr, "integer out of range");
  }
  return static_cast<int>(v);
}

bool as_bool(const json& j, const std::string& ptr) {
  if (!j.is_boolean()) throw ConfigError(ptr, "expected true or false");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& ptr) {
  if (!j.is_string()) throw ConfigError(ptr, "expected a string");
  return j.get<std::string>();
}

std::vector<double> as_number_list(const json& j, const std::string& ptr) {
  if (!j.is_array()) throw ConfigError(ptr, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], child(ptr, i)));
  return out;
}

std::vector<int> as_int_list(const json& j, const std::string& ptr) {
  if (!j.is_array()) throw ConfigError(ptr, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_int(j[i], child(ptr, i)));
  return out;
}

template <class T, class Fn>
void read_opt(const json& obj, const std::string& ptr, const char* key, T& dst, Fn&& conv) {
  if (auto it = obj.find(key); it != obj.end()) dst = conv(*it, child(ptr, key));
}

DataSource parse_source(const json& j, const std::string& ptr, const std::filesystem::path& base, int dim) {
  DataSource src;
  src.pointer = ptr;
  if (j.is_number()) {
    src.kind = DataSource::Kind::Constant;
    src.value = as_number(j, ptr);
  } else if (j.is_string()) {
    src.kind = DataSource::Kind::Expression;
    src.text = j.get<std::string>();
    try {
      (void)parse_expr(src.text, dim);
    } catch (const ParseError& e) {
      throw ConfigError(ptr, e.what());
    }
  } else if (j.is_object()) {
    reject_unknown(j, ptr, {"csv"});
    if (!j.contains("csv")) throw ConfigError(child(ptr, "csv"), "missing CSV path");
    src.kind = DataSource::Kind::Csv;
    src.path = base / as_string(j["csv"], child(ptr, "csv"));
  } else {
    throw ConfigError(ptr, "expected a number, an expression string or {\"csv\": path}");
  }
  return src;
}

template <class Fn>
void wrap_settings(const std::string& ptr, Fn&& validate) {
  try {
    validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ptr, e.what());
  }
}

void parse_domain(const json& j, RunConfig& cfg) {
  const std::string ptr = "/domain";
  require_object(j, ptr);
  reject_unknown(j, ptr, {"dim", "extent", "n"});
  if (!j.contains("dim")) throw ConfigError(child(ptr, "dim"), "missing");
  const int dim = as_int(j["dim"], child(ptr, "dim"));
  if (dim != 1 && dim != 2) throw ConfigError(child(ptr, "dim"), "must be 1 or 2");

  cfg.extent.assign(static_cast<std::size_t>(dim), Interval{0.0, 1.0});
  if (auto it = j.find("extent"); it != j.end()) {
    const std::string ep = child(ptr, "extent");
    if (!it->is_array() || it->size() != static_cast<std::size_t>(dim)) {
      throw ConfigError(ep, "expected one [lo, hi] pair per axis");
    }
    for (std::size_t a = 0; a < it->size(); ++a) {
      const auto pair = as_number_list((*it)[a], child(ep, a));
      if (pair.size() != 2) throw ConfigError(child(ep, a), "expected [lo, hi]");
      if (!(pair[0] < pair[1])) throw ConfigError(child(ep, a), "lo must be < hi");
      cfg.extent[a] = {pair[0], pair[1]};
    }
  }

  if (!j.contains("n")) throw ConfigError(child(ptr, "n"), "missing");
  const json& jn = j["n"];
  if (jn.is_array()) {
    cfg.n = as_int_list(jn, child(ptr, "n"));
    if (cfg.n.size() != static_cast<std::size_t>(dim)) throw ConfigError(child(ptr, "n"), "expected one count per axis");
  } else {
    cfg.n.assign(static_cast<std::size_t>(dim), as_int(jn, child(ptr, "n")));
  }
  for (std::size_t a = 0; a < cfg.n.size(); ++a) {
    if (cfg.n[a] < 2) throw ConfigError(child(ptr, "n"), "need at least 2 interior nodes per axis");
  }
}

void parse_F(const json& j, RunConfig& cfg, const std::filesystem::path& base) {
  const std::string ptr = "/F";
  require_object(j, ptr);
  reject_unknown(j, ptr, {"family", "params", "f0"});
  if (!j.contains("family")) throw ConfigError(child(ptr, "family"), "missing");
  const std::string fam = as_string(j["family"], child(ptr, "family"));
  if (fam == "F1" || fam == "linear") {
    cfg.F_family = NonlinearityF::Family::Linear;
  } else if (fam == "F2" || fam == "cubic") {
    cfg.F_family = NonlinearityF::Family::Cubic;
  } else if (fam == "F3" || fam == "damping") {
    cfg.F_family = NonlinearityF::Family::Damping;
  } else {
    throw ConfigError(child(ptr, "family"), "unknown family '" + fam + "' (F1|linear, F2|cubic, F3|damping)");
  }
  if (auto it = j.find("params"); it != j.end()) {
    const std::string pp = child(ptr, "params");
    require_object(*it, pp);
    switch (cfg.F_family) {
      case NonlinearityF::Family::Linear:
        reject_unknown(*it, pp, {"c"});
        break;
      case NonlinearityF::Family::Cubic:
        reject_unknown(*it, pp, {"c", "kappa_g"});
        break;
      case NonlinearityF::Family::Damping:
        reject_unknown(*it, pp, {"c", "d"});
        break;
    }
    read_opt(*it, pp, "c", cfg.F_c, as_number);
    read_opt(*it, pp, "kappa_g", cfg.F_kappa_g, as_number);
    read_opt(*it, pp, "d", cfg.F_d, as_number);
  }
  if (!j.contains("f0")) throw ConfigError(child(ptr, "f0"), "missing");
  cfg.f0 = parse_source(j["f0"], child(ptr, "f0"), base, cfg.dim());
}

void parse_L(const json& j, RunConfig& cfg, const std::filesystem::path& base) {
  const std::string ptr = "/L";
  require_object(j, ptr);
  reject_unknown(j, ptr, {"family", "params", "y_d"});
  if (!j.contains("family")) throw ConfigError(child(ptr, "family"), "missing");
  const std::string fam = as_string(j["family"], child(ptr, "family"));
  if (fam == "L1" || fam == "tracking") {
    cfg.L_family = ObjectiveL::Family::Tracking;
  } else if (fam == "L2" || fam == "nonconvex") {
    cfg.L_family = ObjectiveL::Family::Nonconvex;
  } else {
    throw ConfigError(child(ptr, "family"), "unknown family '" + fam + "' (L1|tracking, L2|nonconvex)");
  }
  if (auto it = j.find("params"); it != j.end()) {
    const std::string pp = child(ptr, "params");
    require_object(*it, pp);
    if (cfg.L_family == ObjectiveL::Family::Tracking) {
      reject_unknown(*it, pp, {"nu"});
    } else {
      reject_unknown(*it, pp, {"nu", "tau"});
    }
    read_opt(*it, pp, "nu", cfg.L_nu, as_number);
    read_opt(*it, pp, "tau", cfg.L_tau, as_number);
  }
  if (!j.contains("y_d")) throw ConfigError(child(ptr, "y_d"), "missing");
  cfg.y_d = parse_source(j["y_d"], child(ptr, "y_d"), base, cfg.dim());
}

void parse_solver(const json& j, RunConfig& cfg) {
  const std::string ptr = "/solver";
  require_object(j, ptr);
  reject_unknown(j, ptr, {"newton_tol", "newton_max_iter", "damping", "linear_tol"});
  if (auto it = j.find("newton_tol"); it != j.end()) cfg.solve.newton_tol = as_number(*it, child(ptr, "newton_tol"));
  read_opt(j, ptr, "newton_max_iter", cfg.solve.newton_max_iter, as_int);
  read_opt(j, ptr, "damping", cfg.solve.damping, as_number);
  read_opt(j, ptr, "linear_tol", cfg.solve.linear_tol, as_number);
  wrap_settings(ptr, [&] { cfg.solve.validate(); });
}

void parse_optimizer(const json& j, RunConfig& cfg, const std::filesystem::path& base) {
  const std::string ptr = "/optimizer";
  require_object(j, ptr);
  reject_unknown(j, ptr, {"step0", "armijo_c", "shrink", "max_iter", "stat_tol", "use_newton", "cg_max_iter",
                          "cg_rel_tol", "min_step", "u0", "multistart"});
  auto& o = cfg.optim;
  read_opt(j, ptr, "step0", o.step0, as_number);
  read_opt(j, ptr, "armijo_c", o.armijo_c, as_number);
  read_opt(j, ptr, "shrink", o.shrink, as_number);
  read_opt(j, ptr, "max_iter", o.max_iter, as_int);
  if (auto it = j.find("stat_tol"); it != j.end()) o.stat_tol = as_number(*it, child(ptr, "stat_tol"));
  read_opt(j, ptr, "use_newton", o.use_newton, as_bool);
  read_opt(j, ptr, "cg_max_iter", o.cg_max_iter, as_int);
  read_opt(j, ptr, "cg_rel_tol", o.cg_rel_tol, as_number);
  read_opt(j, ptr, "min_step", o.min_step, as_number);
  if (auto it = j.find("u0"); it != j.end()) cfg.u0 = parse_source(*it, child(ptr, "u0"), base, cfg.dim());
  read_opt(j, ptr, "multistart", cfg.multistart, as_int);
  if (cfg.multistart < 1) throw ConfigError(child(ptr, "multistart"), "must be >= 1");
  wrap_settings(ptr, [&] { o.validate(); });
}

void parse_verify(const json& j, RunConfig& cfg) {
  const std::string ptr = "/verify";
  require_object(j, ptr);
  reject_unknown(j, ptr, {"n_scan", "golden_tol", "bound_rel_tol", "d_rel_tol", "d_abs_tol", "n_dirs", "eps_grid",
                          "n_trials", "linf_radii", "probe_radii", "n_per_radius", "integral_trials", "family_M",
                          "family_samples"});
  auto& v = cfg.verify;
  read_opt(j, ptr, "n_scan", v.n_scan, as_int);
  read_opt(j, ptr, "golden_tol", v.golden_tol, as_number);
  read_opt(j, ptr, "bound_rel_tol", v.bound_rel_tol, as_number);
  read_opt(j, ptr, "d_rel_tol", v.d_rel_tol, as_number);
  read_opt(j, ptr, "d_abs_tol", v.d_abs_tol, as_number);
  read_opt(j, ptr, "n_dirs", v.n_dirs, as_int);
  read_opt(j, ptr, "eps_grid", v.eps_grid, as_number_list);
  read_opt(j, ptr, "n_trials", v.n_trials, as_int);
  read_opt(j, ptr, "linf_radii", v.linf_radii, as_number_list);
  read_opt(j, ptr, "probe_radii", v.probe_radii, as_number_list);
  read_opt(j, ptr, "n_per_radius", v.n_per_radius, as_int);
  read_opt(j, ptr, "integral_trials", v.integral_trials, as_int);
  read_opt(j, ptr, "family_M", cfg.family_M, as_number);
  read_opt(j, ptr, "family_samples", cfg.family_samples, as_int);
  if (!(cfg.family_M > 0.0)) throw ConfigError(child(ptr, "family_M"), "must be positive");
  if (cfg.family_samples < 1) throw ConfigError(child(ptr, "family_samples"), "must be >= 1");
  wrap_settings(ptr, [&] { v.validate(); });
}

void parse_convergence(const json& j, RunConfig& cfg) {
  const std::string ptr = "/convergence";
  require_object(j, ptr);
  reject_unknown(j, ptr, {"n_list", "mode"});
  read_opt(j, ptr, "n_list", cfg.n_list, as_int_list);
  if (auto it = j.find("mode"); it != j.end()) {
    const std::string mode = as_string(*it, child(ptr, "mode"));
    if (mode == "state") {
      cfg.converge_optimal = false;
    } else if (mode == "optimal") {
      cfg.converge_optimal = true;
    } else {
      throw ConfigError(child(ptr, "mode"), "expected \"state\" or \"optimal\"");
    }
  }
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    if (cfg.n_list[i] < 2) throw ConfigError(child(child(ptr, "n_list"), i), "need at least 2 interior nodes");
    if (i > 0 && cfg.n_list[i] <= cfg.n_list[i - 1]) {
      throw ConfigError(child(child(ptr, "n_list"), i), "n_list must be increasing");
    }
  }
}

void parse_outputs(const json& j, RunConfig& cfg) {
  const std::string ptr = "/outputs";
  require_object(j, ptr);
  reject_unknown(j, ptr, {"dir", "formats"});
  if (auto it = j.find("dir"); it != j.end()) cfg.out_dir = as_string(*it, child(ptr, "dir"));
  if (auto it = j.find("formats"); it != j.end()) {
    const std::string fp = child(ptr, "formats");
    if (!it->is_array()) throw ConfigError(fp, "expected an array of \"csv\" / \"json\"");
    cfg.write_csv = cfg.write_json = false;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string f = as_string((*it)[i], child(fp, i));
      if (f == "csv") {
        cfg.write_csv = true;
      } else if (f == "json") {
        cfg.write_json = true;
      } else {
        throw ConfigError(child(fp, i), "unknown format '" + f + "'");
      }
    }
  }
}

}  // namespace

Field DataSource::realize(const GridPtr& grid) const {
  try {
    switch (kind) {
      case Kind::Constant:
        return Field::constant(grid, value);
      case Kind::Expression:
        return eval_on_grid(parse_expr(text, grid->dim()), grid);
      case Kind::Csv:
        return read_field_csv(path, grid);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(pointer, e.what());
  }
  throw ConfigError(pointer, "invalid data source");
}

RunConfig RunConfig::with_n(int nodes) const {
  RunConfig out = *this;
  out.n.assign(n.size(), nodes);
  return out;
}

RunConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  require_object(j, "");
  reject_unknown(j, "", {"schema", "domain", "s", "bounds", "F", "L", "solver", "optimizer", "verify",
                         "convergence", "seed", "outputs"});
  RunConfig cfg;
  if (!j.contains("schema")) throw ConfigError("/schema", "missing (expected 1)");
  cfg.schema = as_int(j["schema"], "/schema");
  if (cfg.schema != 1) throw ConfigError("/schema", "unsupported schema version " + std::to_string(cfg.schema));

  if (!j.contains("domain")) throw ConfigError("/domain", "missing");
  parse_domain(j["domain"], cfg);

  if (!j.contains("s")) throw ConfigError("/s", "missing");
  cfg.s = as_number(j["s"], "/s");
  if (!(cfg.s > 0.0 && cfg.s <= 1.0)) throw ConfigError("/s", "fractional order must lie in (0, 1]");

  if (!j.contains("bounds")) throw ConfigError("/bounds", "missing");
  {
    const json& b = require_object(j["bounds"], "/bounds");
    reject_unknown(b, "/bounds", {"alpha", "beta"});
    if (!b.contains("alpha")) throw ConfigError("/bounds/alpha", "missing");
    if (!b.contains("beta")) throw ConfigError("/bounds/beta", "missing");
    cfg.alpha = as_number(b["alpha"], "/bounds/alpha");
    cfg.beta = as_number(b["beta"], "/bounds/beta");
    if (!(cfg.beta > cfg.alpha)) throw ConfigError("/bounds/beta", "control box needs beta > alpha");
  }

  if (!j.contains("F")) throw ConfigError("/F", "missing");
  parse_F(j["F"], cfg, base_dir);
  if (!j.contains("L")) throw ConfigError("/L", "missing");
  parse_L(j["L"], cfg, base_dir);

  // Structural hypotheses on F and L, reported against the field that breaks them.
  if (cfg.F_family == NonlinearityF::Family::Damping && cfg.alpha < 0.0) {
    throw ConfigError("/bounds/alpha",
                      "F3 (damping) requires alpha >= 0: F must be nonincreasing in y on the control box");
  }
  if (cfg.F_c < 0.0) throw ConfigError("/F/params/c", "c < 0 breaks monotonicity of F in y (dF/dy <= 0)");
  if (cfg.F_family == NonlinearityF::Family::Cubic && std::abs(cfg.F_kappa_g) > 1.0) {
    throw ConfigError("/F/params/kappa_g", "|kappa_g| must be <= 1");
  }
  if (cfg.F_family == NonlinearityF::Family::Damping && cfg.F_d < 0.0) {
    throw ConfigError("/F/params/d", "d < 0 breaks monotonicity of F in y (dF/dy <= 0)");
  }
  if (cfg.L_nu < 0.0) throw ConfigError("/L/params/nu", "nu must be >= 0");

  cfg.u0.kind = DataSource::Kind::Constant;
  cfg.u0.value = 0.5 * (cfg.alpha + cfg.beta);
  cfg.u0.pointer = "/optimizer/u0";

  if (auto it = j.find("solver"); it != j.end()) parse_solver(*it, cfg);
  if (auto it = j.find("optimizer"); it != j.end()) parse_optimizer(*it, cfg, base_dir);
  cfg.optim.solve = cfg.solve;
  if (auto it = j.find("verify"); it != j.end()) parse_verify(*it, cfg);
  if (auto it = j.find("convergence"); it != j.end()) parse_convergence(*it, cfg);

  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0)) {
      throw ConfigError("/seed", "expected a nonnegative integer");
    }
    cfg.seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("outputs"); it != j.end()) parse_outputs(*it, cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("", "cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j, path.parent_path());
}

Scenario build_scenario(const RunConfig& cfg) {
  GridPtr grid;
  try {
    grid = build_grid(cfg.dim(), cfg.extent, cfg.n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/domain", e.what());
  }
  Field f0 = cfg.f0.realize(grid);
  Field y_d = cfg.y_d.realize(grid);
  Field u0 = cfg.u0.realize(grid);

  NonlinearityF F = [&] {
    switch (cfg.F_family) {
      case NonlinearityF::Family::Cubic:
        return NonlinearityF::cubic(f0, cfg.F_c, cfg.F_kappa_g);
      case NonlinearityF::Family::Damping:
        return NonlinearityF::damping(f0, cfg.F_c, cfg.F_d);
      case NonlinearityF::Family::Linear:
        break;
    }
    return NonlinearityF::linear(f0, cfg.F_c);
  }();
  ObjectiveL L = cfg.L_family == ObjectiveL::Family::Nonconvex ? ObjectiveL::nonconvex(y_d, cfg.L_nu, cfg.L_tau)
                                                               : ObjectiveL::tracking(y_d, cfg.L_nu);
  try {
    Problem prob(make_fractional_operator(grid, cfg.s), ControlBounds(cfg.alpha, cfg.beta), std::move(F),
                 std::move(L));
    return {grid, std::move(prob), std::move(u0)};
  } catch (const AssumptionViolation& e) {
    throw ConfigError("/F", e.what());
  }
}

}  // namespace fracocp
