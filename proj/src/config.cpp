#include "mshj/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mshj {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& where, const std::string& token) {
  try {
    size_t used = 0;
    // rationals allowed anywhere a number is
    const auto slash = token.find('/');
    if (slash != std::string::npos) {
      const double num = std::stod(token.substr(0, slash));
      const double den = std::stod(token.substr(slash + 1));
      if (den == 0) throw ConfigError(where, "zero denominator in '" + token + "'");
      return num / den;
    }
    const double v = std::stod(token, &used);
    if (used != token.size())
      throw ConfigError(where, "trailing characters in number '" + token + "'");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError(where, "expected a number, got '" + token + "'");
  }
}

int parse_int(const std::string& where, const std::string& token) {
  const double v = parse_number(where, token);
  if (std::abs(v - std::llround(v)) > 1e-9)
    throw ConfigError(where, "expected an integer, got '" + token + "'");
  return static_cast<int>(std::llround(v));
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

ConfigFile ConfigFile::parse_string(const std::string& text) {
  ConfigFile file;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno), "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("line " + std::to_string(lineno), "empty section name");
      file.data_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno), "key outside any section");
    Row row;
    std::istringstream vs(value);
    std::string tok;
    while (vs >> tok) row.push_back(tok);
    file.data_[section][key].push_back(std::move(row));
  }
  return file;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  const auto s = data_.find(section);
  return s != data_.end() && s->second.count(key) > 0;
}

const std::vector<ConfigFile::Row>& ConfigFile::rows(const std::string& section,
                                                     const std::string& key) const {
  const auto s = data_.find(section);
  if (s == data_.end()) throw ConfigError(section, "missing section");
  const auto k = s->second.find(key);
  if (k == s->second.end()) throw ConfigError(section + "] " + key, "missing key");
  return k->second;
}

std::string ConfigFile::scalar(const std::string& section, const std::string& key) const {
  const auto& r = rows(section, key);
  if (r.size() != 1 || r.front().size() != 1)
    throw ConfigError(section + "] " + key, "expected a single value");
  return r.front().front();
}

double ConfigFile::number(const std::string& section, const std::string& key) const {
  return parse_number(section + "] " + key, scalar(section, key));
}

void ConfigFile::reject_unknown(
    const std::map<std::string, std::vector<std::string>>& schema) const {
  for (const auto& [section, keys] : data_) {
    const auto s = schema.find(section);
    if (s == schema.end()) throw ConfigError(section, "unknown section");
    for (const auto& [key, rows] : keys) {
      (void)rows;
      bool ok = false;
      for (const auto& allowed : s->second)
        if (allowed == key) ok = true;
      if (!ok) throw ConfigError(section + "] " + key, "unknown key");
    }
  }
}

RunConfig RunConfig::load(const std::string& path) {
  return from_config(ConfigFile::parse_file(path));
}

RunConfig RunConfig::from_config(const ConfigFile& file) {
  static const std::map<std::string, std::vector<std::string>> schema = {
      {"hamiltonian", {"family", "dim", "scales", "a0", "a_sup"}},
      {"potential", {"kind", "constant", "component", "period", "plateau", "r_v"}},
      {"scales", {"gamma"}},
      {"cell", {"x", "p", "grid", "lambda_min", "tol"}},
      {"box", {"radius", "cells_per_unit", "lambda"}},
      {"table", {"p_radius", "p_nodes"}},
      {"average", {"lambda", "horizon", "dt", "policy", "y0"}},
      {"resonance", {"bound", "tol"}},
      {"homogenize", {"mu", "eps", "cells_per_eps", "horizon", "u0"}},
      {"output", {"seed"}},
  };
  file.reject_unknown(schema);

  RunConfig cfg;
  // --- Hamiltonian ---
  const std::string family =
      file.has("hamiltonian", "family") ? file.scalar("hamiltonian", "family") : "eikonal";
  const int dim =
      file.has("hamiltonian", "dim") ? parse_int("hamiltonian] dim", file.scalar("hamiltonian", "dim")) : 1;
  const int num_scales = file.has("hamiltonian", "scales")
                             ? parse_int("hamiltonian] scales", file.scalar("hamiltonian", "scales"))
                             : 1;
  cfg.ham.dim = dim;
  cfg.ham.num_scales = num_scales;
  if (family == "eikonal")
    cfg.ham.theta = 1;
  else if (family == "quadratic")
    cfg.ham.theta = 2;
  else
    throw ConfigError("hamiltonian] family", "must be 'eikonal' or 'quadratic'");
  cfg.ham.a0 = file.has("hamiltonian", "a0") ? file.number("hamiltonian", "a0") : 1.0;
  cfg.ham.a_sup =
      file.has("hamiltonian", "a_sup") ? file.number("hamiltonian", "a_sup") : 1.0;
  if (!(cfg.ham.a0 > 0)) throw ConfigError("hamiltonian] a0", "must be positive");
  if (cfg.ham.a_sup < cfg.ham.a0)
    throw ConfigError("hamiltonian] a_sup", "must be >= a0");

  // --- Potential ---
  const std::string kind =
      file.has("potential", "kind") ? file.scalar("potential", "kind") : "torus-trig";
  const double constant =
      file.has("potential", "constant") ? file.number("potential", "constant") : 0.0;
  std::vector<TrigComponent> comps;
  if (file.has("potential", "component")) {
    for (const auto& row : file.rows("potential", "component")) {
      if (row.size() != 5)
        throw ConfigError("potential] component",
                          "expected: scale axis frequency amplitude phase");
      TrigComponent c;
      c.scale = parse_int("potential] component", row[0]) - 1;
      c.axis = parse_int("potential] component", row[1]) - 1;
      c.frequency = parse_int("potential] component", row[2]);
      c.amplitude = parse_number("potential] component", row[3]);
      c.phase = parse_number("potential] component", row[4]);
      comps.push_back(c);
    }
  }
  if (kind == "torus-trig") {
    cfg.ham.potential = PotentialSpec::torus_trig(dim, num_scales, constant, comps);
  } else if (kind == "quasi-periodic") {
    std::vector<std::vector<ScaleRatio>> periods(
        num_scales, std::vector<ScaleRatio>(dim, ScaleRatio::one()));
    if (file.has("potential", "period")) {
      for (const auto& row : file.rows("potential", "period")) {
        if (row.size() != 3)
          throw ConfigError("potential] period", "expected: scale axis value");
        const int n = parse_int("potential] period", row[0]) - 1;
        const int i = parse_int("potential] period", row[1]) - 1;
        if (n < 0 || n >= num_scales || i < 0 || i >= dim)
          throw ConfigError("potential] period", "scale/axis out of range");
        periods[n][i] = ScaleRatio::parse(row[2]);
      }
    }
    cfg.ham.potential =
        PotentialSpec::quasi_periodic(dim, num_scales, constant, comps, periods);
  } else if (kind == "compact") {
    const double plateau =
        file.has("potential", "plateau") ? file.number("potential", "plateau") : 1.0;
    const double r_v = file.has("potential", "r_v") ? file.number("potential", "r_v") : 1.0;
    cfg.ham.potential = PotentialSpec::compact_deformation(dim, constant, plateau, r_v);
  } else {
    throw ConfigError("potential] kind",
                      "must be 'torus-trig', 'quasi-periodic' or 'compact'");
  }

  // --- Scales ---
  if (kind == "quasi-periodic") {
    if (file.has("scales", "gamma"))
      throw ConfigError("scales] gamma",
                        "quasi-periodic problems derive scales from the periods");
    cfg.scales = lift_quasi_periodic(cfg.ham).scales;
  } else {
    std::vector<std::vector<ScaleRatio>> gamma(
        num_scales, std::vector<ScaleRatio>(dim, ScaleRatio::one()));
    if (file.has("scales", "gamma")) {
      for (const auto& row : file.rows("scales", "gamma")) {
        if (row.size() != 3)
          throw ConfigError("scales] gamma", "expected: scale axis ratio");
        const int n = parse_int("scales] gamma", row[0]) - 1;
        const int i = parse_int("scales] gamma", row[1]) - 1;
        if (n < 0 || n >= num_scales || i < 0 || i >= dim)
          throw ConfigError("scales] gamma", "scale/axis out of range");
        gamma[n][i] = ScaleRatio::parse(row[2]);
      }
    }
    try {
      cfg.scales = ScaleSystem(dim, num_scales, std::move(gamma));
    } catch (const InvalidInput& e) {
      throw ConfigError("scales] gamma", e.what());
    }
  }

  // --- Solver sections ---
  const auto vec_of = [&](const std::string& section, const std::string& key,
                          int want) -> Eigen::VectorXd {
    const auto& r = file.rows(section, key);
    if (r.size() != 1) throw ConfigError(section + "] " + key, "expected one row");
    Eigen::VectorXd v(r.front().size());
    for (size_t j = 0; j < r.front().size(); ++j)
      v[j] = parse_number(section + "] " + key, r.front()[j]);
    if (want > 0 && v.size() != want)
      throw ConfigError(section + "] " + key, "wrong number of entries");
    return v;
  };

  cfg.x = Eigen::VectorXd::Zero(dim);
  cfg.p = Eigen::VectorXd::Zero(dim);
  if (file.has("cell", "x")) cfg.x = vec_of("cell", "x", dim);
  if (file.has("cell", "p")) cfg.p = vec_of("cell", "p", dim);
  if (file.has("cell", "grid"))
    cfg.cell_grid = parse_int("cell] grid", file.scalar("cell", "grid"));
  if (file.has("cell", "lambda_min")) cfg.lambda_min = file.number("cell", "lambda_min");
  if (file.has("cell", "tol")) cfg.cell_tol = file.number("cell", "tol");
  if (!(cfg.lambda_min > 0)) throw ConfigError("cell] lambda_min", "must be positive");
  if (!(cfg.cell_tol > 0)) throw ConfigError("cell] tol", "must be positive");

  if (file.has("box", "radius")) cfg.box_radius = file.number("box", "radius");
  if (file.has("box", "cells_per_unit"))
    cfg.box_cells_per_unit =
        parse_int("box] cells_per_unit", file.scalar("box", "cells_per_unit"));
  if (file.has("box", "lambda")) cfg.box_lambda = file.number("box", "lambda");
  if (!(cfg.box_lambda > 0)) throw ConfigError("box] lambda", "must be positive");

  if (file.has("table", "p_radius")) cfg.p_radius = file.number("table", "p_radius");
  if (file.has("table", "p_nodes"))
    cfg.p_nodes = parse_int("table] p_nodes", file.scalar("table", "p_nodes"));

  if (file.has("average", "lambda")) cfg.avg_lambda = file.number("average", "lambda");
  if (file.has("average", "horizon")) cfg.avg_horizon = file.number("average", "horizon");
  if (file.has("average", "dt")) cfg.avg_dt = file.number("average", "dt");
  if (file.has("average", "policy")) cfg.avg_policy = file.scalar("average", "policy");
  if (cfg.avg_policy != "constant" && cfg.avg_policy != "greedy")
    throw ConfigError("average] policy", "must be 'constant' or 'greedy'");
  cfg.avg_y0 = Eigen::VectorXd::Zero(dim * num_scales);
  if (file.has("average", "y0")) cfg.avg_y0 = vec_of("average", "y0", dim * num_scales);
  if (!(cfg.avg_lambda > 0)) throw ConfigError("average] lambda", "must be positive");

  if (file.has("resonance", "bound"))
    cfg.resonance_bound = parse_int("resonance] bound", file.scalar("resonance", "bound"));
  if (file.has("resonance", "tol")) cfg.resonance_tol = file.number("resonance", "tol");

  if (file.has("homogenize", "mu")) cfg.mu = file.number("homogenize", "mu");
  if (file.has("homogenize", "eps")) {
    const auto& r = file.rows("homogenize", "eps");
    for (const auto& row : r)
      for (const auto& tok : row)
        cfg.eps_schedule.push_back(parse_number("homogenize] eps", tok));
  }
  if (file.has("homogenize", "cells_per_eps"))
    cfg.cells_per_eps =
        parse_int("homogenize] cells_per_eps", file.scalar("homogenize", "cells_per_eps"));
  if (file.has("homogenize", "horizon")) cfg.horizon = file.number("homogenize", "horizon");
  if (file.has("homogenize", "u0")) cfg.u0_name = file.scalar("homogenize", "u0");
  if (cfg.u0_name != "cos" && cfg.u0_name != "cone" && cfg.u0_name != "zero")
    throw ConfigError("homogenize] u0", "must be 'cos', 'cone' or 'zero'");

  if (file.has("output", "seed"))
    cfg.seed = static_cast<std::uint64_t>(
        parse_int("output] seed", file.scalar("output", "seed")));
  return cfg;
}

std::function<double(const Eigen::VectorXd&)> RunConfig::initial_datum() const {
  if (u0_name == "cos")
    return [](const Eigen::VectorXd& x) {
      return std::cos(2.0 * 3.1415926535897932384626433832795 * x[0]);
    };
  if (u0_name == "cone")
    return [](const Eigen::VectorXd& x) {
      return -(x.array() - 0.5).matrix().norm();
    };
  return [](const Eigen::VectorXd&) { return 0.0; };
}

}  // namespace mshj
