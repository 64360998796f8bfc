#include "mshj/report_io.hpp"

#include <cstdio>
#include <fstream>

namespace mshj {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {
Json vec_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}
}  // namespace

Json to_json(const ResonanceReport& report) {
  Json j;
  j["search_bound"] = report.search_bound;
  j["tol"] = report.tol;
  j["resonant"] = report.any_resonant();
  Json axes = Json::array();
  for (const auto& a : report.axes) {
    Json ja;
    ja["resonant"] = a.resonant;
    ja["arithmetic"] = a.decided_exactly ? "exact" : "floating";
    if (a.witness) {
      Json z = Json::array();
      for (Eigen::Index k = 0; k < a.witness->z.size(); ++k)
        z.push_back(a.witness->z[k]);
      ja["witness_z"] = z;
      ja["witness_m"] = a.witness->m;
    }
    axes.push_back(ja);
  }
  j["axes"] = axes;
  j["interpretation_note"] = report.interpretation_note;
  return j;
}

Json to_json(const CellSolution& sol) {
  Json j;
  j["lambda"] = sol.lambda;
  j["residual"] = sol.residual;
  j["lam_w_mean"] = sol.lam_w_mean;
  j["lam_w_osc"] = sol.lam_w_osc;
  j["iterations"] = sol.iterations;
  return j;
}

Json to_json(const EffectiveValue& ev) {
  Json j;
  j["hbar"] = ev.hbar;
  j["flatness"] = ev.flatness;
  j["schedule"] = ev.schedule;
  j["solution"] = to_json(ev.solution);
  return j;
}

Json to_json(const BoxCellSolution& sol) {
  Json j;
  j["radius"] = sol.radius;
  j["spacing"] = sol.spacing;
  j["lambda"] = sol.lambda;
  j["effective_value"] = sol.effective_value;
  j["readout_inner"] = sol.readout_inner;
  j["readout_outer"] = sol.readout_outer;
  j["residual"] = sol.residual;
  j["iterations"] = sol.iterations;
  j["shell_radii"] = std::vector<double>(sol.shell_radii.data(),
                                         sol.shell_radii.data() + sol.shell_radii.size());
  j["shell_slopes"] =
      std::vector<double>(sol.shell_slopes.data(),
                          sol.shell_slopes.data() + sol.shell_slopes.size());
  return j;
}

Json to_json(const ConsistencyReport& report) {
  Json j;
  j["torus_value"] = report.torus_value;
  j["torus_flatness"] = report.torus_flatness;
  j["box_value"] = report.box_value;
  j["difference"] = report.difference;
  j["torus_error_estimate"] = report.torus_error_estimate;
  j["box_error_estimate"] = report.box_error_estimate;
  j["resonant"] = report.resonant;
  if (report.resonant)
    j["note"] = "scales resonate: effective value may lose x-p regularity guarantees";
  return j;
}

Json to_json(const TrajectoryRun& run) {
  Json j;
  j["dt"] = run.dt;
  j["horizon"] = run.horizon;
  j["discounted_payoff"] = run.discounted_payoff;
  j["running_average"] = run.running_average;
  j["recorded_states"] = run.states.rows();
  return j;
}

Json to_json(const RayAverageReport& report) {
  Json j;
  j["c_estimate"] = report.c_estimate;
  j["max_deviation"] = report.max_deviation;
  j["c_xp"] = report.c_xp;
  j["margin"] = report.margin;
  j["horizons"] = report.horizons;
  j["per_sample"] = std::vector<double>(
      report.per_sample.data(), report.per_sample.data() + report.per_sample.size());
  return j;
}

Json to_json(const ConvergenceReport& report) {
  Json j;
  j["eps"] = report.eps;
  j["sup_errors"] = report.sup_errors;
  j["interior_errors"] = report.interior_errors;
  j["boundary_errors"] = report.boundary_errors;
  j["observed_orders"] = report.observed_orders;
  j["scheme_errors"] = report.scheme_errors;
  std::vector<int> flags;
  for (bool b : report.hfloor_flags) flags.push_back(b ? 1 : 0);
  j["hfloor_flags"] = flags;
  return j;
}

Json table_sidecar(const EffectiveTable& table) {
  Json j;
  j["x"] = vec_json(table.x);
  j["p_lo"] = vec_json(table.grid.lo);
  j["p_hi"] = vec_json(table.grid.hi);
  j["p_nodes"] = table.grid.counts;
  j["schedule"] = table.schedule;
  j["torus_cells"] = table.torus_cells;
  j["tol"] = table.tol;
  j["failed_entries"] = static_cast<int>(
      std::count(table.failed.begin(), table.failed.end(), std::uint8_t(1)));
  return j;
}

namespace {
void write_indexed_csv(const std::string& path, int axes,
                       const std::function<void(long, std::vector<long>&)>& decompose,
                       long points, const Eigen::ArrayXd& w) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open output file " + path);
  for (int a = 0; a < axes; ++a) out << "i" << a + 1 << ",";
  out << "value\n";
  std::vector<long> idx(axes);
  for (long f = 0; f < points; ++f) {
    decompose(f, idx);
    for (int a = 0; a < axes; ++a) out << idx[a] << ",";
    out << format_double(w[f]) << "\n";
  }
}
}  // namespace

void write_field_csv(const std::string& path, const TorusGrid& grid,
                     const Eigen::ArrayXd& w) {
  const int D = grid.axes();
  std::vector<long> strides(D, 1);
  for (int a = D - 2; a >= 0; --a) strides[a] = strides[a + 1] * grid.cells(a + 1);
  write_indexed_csv(
      path, D,
      [&](long f, std::vector<long>& idx) {
        for (int a = 0; a < D; ++a) {
          idx[a] = f / strides[a];
          f %= strides[a];
        }
      },
      grid.points(), w);
}

void write_field_csv(const std::string& path, const SpatialGrid& grid,
                     const Eigen::ArrayXd& u) {
  const int d = grid.dim;
  const int m = grid.nodes_per_axis();
  std::vector<long> strides(d, 1);
  for (int a = d - 2; a >= 0; --a) strides[a] = strides[a + 1] * m;
  write_indexed_csv(
      path, d,
      [&](long f, std::vector<long>& idx) {
        for (int a = 0; a < d; ++a) {
          idx[a] = f / strides[a];
          f %= strides[a];
        }
      },
      grid.points(), u);
}

void write_table_csv(const std::string& path, const EffectiveTable& table) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open output file " + path);
  const int d = table.grid.dim();
  for (int i = 0; i < d; ++i) out << "p" << i + 1 << ",";
  out << "hbar,flatness\n";
  for (long f = 0; f < table.grid.points(); ++f) {
    const Eigen::VectorXd p = table.grid.node(f);
    for (int i = 0; i < d; ++i) out << format_double(p[i]) << ",";
    out << format_double(table.values[f]) << "," << format_double(table.flatness[f])
        << "\n";
  }
}

}  // namespace mshj
