#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracocp/grid.hpp"
#include "fracocp/optimize.hpp"
#include "fracocp/problem.hpp"
#include "fracocp/verify.hpp"

namespace fracocp {

/// A data field given as a constant, a closed-form expression or a CSV file.
struct DataSource {
  enum class Kind { Constant, Expression, Csv };
  Kind kind = Kind::Constant;
  double value = 0.0;
  std::string text;            ///< expression source
  std::filesystem::path path;  ///< resolved CSV path
  std::string pointer;         ///< JSON pointer of the field, for error messages

  Field realize(const GridPtr& grid) const;
};

struct RunConfig {
  int schema = 1;
  std::vector<Interval> extent;
  std::vector<int> n;
  double s = 0.5;
  double alpha = 0.0;
  double beta = 1.0;

  NonlinearityF::Family F_family = NonlinearityF::Family::Linear;
  double F_c = 0.0;
  double F_kappa_g = 0.0;
  double F_d = 1.0;
  DataSource f0;

  ObjectiveL::Family L_family = ObjectiveL::Family::Tracking;
  double L_nu = 0.0;
  double L_tau = 0.0;
  DataSource y_d;

  SolveSettings solve;
  OptimSettings optim;
  DataSource u0;
  /// Number of starts; extra starts are random smooth admissible controls.
  int multistart = 1;

  VerifySettings verify;
  double family_M = 10.0;
  int family_samples = 10000;

  std::vector<int> n_list;
  bool converge_optimal = false;  ///< refine the optimal control instead of the state at u0

  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  bool write_csv = true;
  bool write_json = true;

  int dim() const { return static_cast<int>(extent.size()); }
  /// Same configuration with n interior nodes on every axis.
  RunConfig with_n(int nodes) const;
};

/// Throws ConfigError with a JSON pointer. Relative CSV paths resolve against `base_dir`.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Reads and parses a config file. Malformed JSON is reported as ConfigError at pointer "".
RunConfig load_config(const std::filesystem::path& path);

/// Realizes data fields and builds the problem. Assumption violations are
/// rethrown as ConfigError pointing at the responsible field.
struct Scenario {
  GridPtr grid;
  Problem problem;
  Field u0;
};
Scenario build_scenario(const RunConfig& cfg);

}  // namespace fracocp
