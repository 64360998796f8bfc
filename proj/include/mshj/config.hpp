#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mshj/hamiltonian.hpp"
#include "mshj/scales.hpp"

namespace mshj {

/// Config error carrying a pointer to the offending section/key.
struct ConfigError : InvalidInput {
  ConfigError(const std::string& where, const std::string& what)
      : InvalidInput("[" + where + "] " + what), key(where) {}
  std::string key;
};

/// Key-value file with [section] headers.  Values are whitespace-separated
/// token rows; repeated keys accumulate rows (component lists).  '#' starts
/// a comment.
class ConfigFile {
 public:
  using Row = std::vector<std::string>;

  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  const std::vector<Row>& rows(const std::string& section, const std::string& key) const;
  std::string scalar(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key) const;
  /// Schema check: every present key must be listed; missing sections are fine.
  void reject_unknown(
      const std::map<std::string, std::vector<std::string>>& schema) const;

  const std::map<std::string, std::map<std::string, std::vector<Row>>>& data() const {
    return data_;
  }

 private:
  std::map<std::string, std::map<std::string, std::vector<Row>>> data_;
};

/// Validated run configuration: the problem (Hamiltonian + potential +
/// scales) and per-subcommand solver settings.
struct RunConfig {
  ClosedFormSpec ham;
  ScaleSystem scales = ScaleSystem::identity(1);

  // cell
  Eigen::VectorXd x;
  Eigen::VectorXd p;
  int cell_grid = 128;
  double lambda_min = 1e-3;
  double cell_tol = 1e-6;

  // box
  double box_radius = 200.0;
  int box_cells_per_unit = 32;
  double box_lambda = 0.05;

  // table
  double p_radius = 4.0;
  int p_nodes = 33;

  // average
  double avg_lambda = 1e-2;
  double avg_horizon = 1000.0;
  double avg_dt = 5e-3;
  std::string avg_policy = "constant";
  Eigen::VectorXd avg_y0;

  // resonance
  std::int64_t resonance_bound = 10'000;
  double resonance_tol = 1e-8;

  // homogenize
  double mu = 0.0;
  std::vector<double> eps_schedule;
  int cells_per_eps = 8;
  double horizon = 0.0;
  std::string u0_name = "cos";

  // output
  std::uint64_t seed = 2024;

  static RunConfig load(const std::string& path);
  static RunConfig from_config(const ConfigFile& file);

  std::function<double(const Eigen::VectorXd&)> initial_datum() const;
};

}  // namespace mshj
