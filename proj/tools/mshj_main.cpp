// Command-line front end: wires config files to the solver modules and emits
// machine-readable JSON/CSV.  Exit codes: 0 success, 1 invalid config,
// 2 non-convergence, 3 property violation, 4 budget exceeded.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "mshj/average.hpp"
#include "mshj/cell.hpp"
#include "mshj/config.hpp"
#include "mshj/effective.hpp"
#include "mshj/homogenize.hpp"
#include "mshj/report_io.hpp"
#include "verify/criteria.hpp"

namespace {

using namespace mshj;

constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitPropertyViolation = 3;
constexpr int kExitBudgetExceeded = 4;

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

int run_resonance(const RunConfig& cfg) {
  const ResonanceReport report =
      check_condition_a(cfg.scales, cfg.resonance_bound, cfg.resonance_tol);
  Json j = to_json(report);
  j["seed"] = cfg.seed;
  emit(j);
  return kExitOk;
}

int run_cell(const RunConfig& cfg, const std::string& csv_path) {
  Json j;
  j["seed"] = cfg.seed;
  const auto& pot = cfg.ham.potential;
  if (pot.kind() == PotentialSpec::Kind::CompactDeformation) {
    BoxSolveOptions opts;
    opts.tol = cfg.cell_tol;
    const BoxCellSolution sol =
        solve_cell_unbounded(cfg.ham, cfg.x, cfg.p, cfg.box_lambda, cfg.box_radius,
                             cfg.box_cells_per_unit, opts);
    j["box"] = to_json(sol);
    emit(j);
    return kExitOk;
  }
  Hamiltonian ham(cfg.ham);
  ScaleSystem scales = cfg.scales;
  if (pot.kind() == PotentialSpec::Kind::QuasiPeriodic) {
    LiftResult lift = lift_quasi_periodic(cfg.ham);
    ham = Hamiltonian(lift.lifted);
    scales = lift.scales;
  }
  const TorusGrid grid =
      TorusGrid::uniform(cfg.ham.dim, cfg.ham.num_scales, cfg.cell_grid);
  CellSolveOptions opts;
  opts.tol = cfg.cell_tol;
  const EffectiveValue ev = effective_value(
      ham, cfg.x, cfg.p, scales, grid, lambda_schedule(1.0, 0.5, cfg.lambda_min), opts);
  j["effective"] = to_json(ev);
  emit(j);
  if (!csv_path.empty()) write_field_csv(csv_path, grid, ev.solution.w);
  return kExitOk;
}

int run_table(const RunConfig& cfg, const std::string& csv_path,
              const std::string& sidecar_path) {
  Hamiltonian ham(cfg.ham);
  ScaleSystem scales = cfg.scales;
  if (cfg.ham.potential.kind() == PotentialSpec::Kind::QuasiPeriodic) {
    LiftResult lift = lift_quasi_periodic(cfg.ham);
    ham = Hamiltonian(lift.lifted);
    scales = lift.scales;
  } else if (cfg.ham.potential.kind() == PotentialSpec::Kind::CompactDeformation) {
    throw InvalidInput("table: compact-deformation potentials use the box solver");
  }
  const TorusGrid grid =
      TorusGrid::uniform(cfg.ham.dim, cfg.ham.num_scales, cfg.cell_grid);
  const MomentumGrid pg =
      MomentumGrid::symmetric(cfg.ham.dim, cfg.p_radius, cfg.p_nodes);
  CellSolveOptions opts;
  opts.tol = cfg.cell_tol;
  const EffectiveTable table = build_table(
      ham, cfg.x, scales, pg, lambda_schedule(1.0, 0.5, cfg.lambda_min), grid, opts);
  Json j = table_sidecar(table);
  j["seed"] = cfg.seed;
  emit(j);
  write_table_csv(csv_path, table);
  if (!sidecar_path.empty()) {
    std::ofstream out(sidecar_path);
    out << j.dump(2) << "\n";
  }
  return kExitOk;
}

int run_average(const RunConfig& cfg) {
  // control rewrite of the configured closed form
  const MomentumBox box = MomentumBox::cube(cfg.ham.dim, cfg.p.norm() + 1.0);
  ClosedFormSpec closed = cfg.ham;
  if (closed.potential.kind() == PotentialSpec::Kind::QuasiPeriodic)
    closed = lift_quasi_periodic(cfg.ham).lifted;
  const auto rewrite = closed_to_control(closed, box);

  Json j;
  j["seed"] = cfg.seed;
  j["policy"] = cfg.avg_policy;
  j["rewrite_error_bound"] = rewrite.error_bound;
  if (cfg.avg_policy == "greedy") {
    const TorusGrid grid =
        TorusGrid::uniform(cfg.ham.dim, cfg.ham.num_scales, cfg.cell_grid);
    CellSolveOptions copts;
    copts.tol = cfg.cell_tol;
    const EffectiveValue ev =
        effective_value(Hamiltonian(closed), cfg.x, cfg.p, cfg.scales, grid,
                        lambda_schedule(1.0, 0.5, std::max(cfg.avg_lambda, 1e-3)),
                        copts);
    const TrajectoryRun run =
        run_greedy_policy(rewrite.spec, cfg.x, cfg.p, cfg.avg_y0, cfg.scales,
                          cfg.avg_lambda, cfg.avg_dt, cfg.avg_horizon, ev.solution,
                          grid);
    j["run"] = to_json(run);
    j["value"] = run.discounted_payoff;
    j["cell_hbar"] = ev.hbar;
  } else {
    const double value =
        discounted_value(rewrite.spec, cfg.x, cfg.p, cfg.avg_y0, cfg.scales,
                         cfg.avg_lambda, PolicySource::ConstantControls, cfg.avg_dt,
                         cfg.avg_horizon);
    j["value"] = value;
    j["effective_value_upper_bound"] = -value;
  }
  emit(j);
  return kExitOk;
}

int run_homogenize(const RunConfig& cfg, const std::string& report_path,
                   const std::string& csv_prefix) {
  if (cfg.eps_schedule.empty())
    throw ConfigError("homogenize] eps", "epsilon schedule required");
  StudyOptions opts;
  opts.torus_cells = cfg.cell_grid;
  opts.lambda_min = cfg.lambda_min;
  opts.cell_tol = cfg.cell_tol;
  opts.p_radius = cfg.p_radius;
  opts.p_nodes = cfg.p_nodes;
  opts.cells_per_eps = cfg.cells_per_eps;
  const ConvergenceReport report =
      convergence_study(Hamiltonian(cfg.ham), cfg.scales, cfg.eps_schedule, cfg.mu,
                        cfg.initial_datum(), cfg.horizon, opts);
  Json j = to_json(report);
  j["seed"] = cfg.seed;
  emit(j);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    out << j.dump(2) << "\n";
  }
  if (!csv_prefix.empty()) write_table_csv(csv_prefix + "_table.csv", report.table);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"effective Hamiltonians for multiscale Hamilton-Jacobi-Bellman "
               "equations via discounted ergodic cell problems"};
  app.require_subcommand(1);

  std::string config_path, csv_path, sidecar_path, report_path, csv_prefix;
  double lambda_min = -1, tol = -1, avg_lambda = -1, avg_horizon = -1, avg_dt = -1,
         mu_flag = -1, horizon_flag = -1;
  int grid_cells = -1;
  std::string policy_flag, eps_flag;
  std::vector<int> criteria_ids;
  std::uint64_t seed_flag = 0;
  bool seed_set = false;

  auto* resonance = app.add_subcommand("resonance", "Condition A report as JSON");
  resonance->add_option("config", config_path)->required();

  auto* cell = app.add_subcommand("cell", "discounted cell problem diagnostics");
  cell->add_option("config", config_path)->required();
  cell->add_option("--lambda-min", lambda_min);
  cell->add_option("--grid", grid_cells);
  cell->add_option("--tol", tol);
  cell->add_option("--csv", csv_path, "write the w field as CSV");

  auto* table = app.add_subcommand("table", "effective Hamiltonian table");
  table->add_option("config", config_path)->required();
  table->add_option("--lambda-min", lambda_min);
  table->add_option("--grid", grid_cells);
  table->add_option("--tol", tol);
  table->add_option("--csv", csv_path)->default_val("table.csv");
  table->add_option("--sidecar", sidecar_path);

  auto* average = app.add_subcommand("average", "trajectory-oracle value");
  average->add_option("config", config_path)->required();
  average->add_option("--lambda", avg_lambda);
  average->add_option("--horizon", avg_horizon);
  average->add_option("--dt", avg_dt);
  average->add_option("--policy", policy_flag);

  auto* homogenize = app.add_subcommand("homogenize", "epsilon-convergence study");
  homogenize->add_option("config", config_path)->required();
  homogenize->add_option("--eps-schedule", eps_flag, "comma-separated epsilons");
  homogenize->add_option("--mu", mu_flag);
  homogenize->add_option("--horizon", horizon_flag);
  homogenize->add_option("--report", report_path);
  homogenize->add_option("--csv", csv_prefix);

  auto* verify = app.add_subcommand("verify", "run the verification suite");
  verify->add_option("config", config_path);
  verify->add_option("--criterion", criteria_ids);
  verify->add_option("--seed", seed_flag)->each([&](const std::string&) {
    seed_set = true;
  });

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      std::uint64_t seed = 2024;
      if (!config_path.empty()) seed = RunConfig::load(config_path).seed;
      if (seed_set) seed = seed_flag;
      const auto results = mshj::verify::run_criteria(criteria_ids, seed);
      return mshj::verify::print_results(results);
    }

    RunConfig cfg = RunConfig::load(config_path);
    if (lambda_min > 0) cfg.lambda_min = lambda_min;
    if (tol > 0) cfg.cell_tol = tol;
    if (grid_cells > 0) cfg.cell_grid = grid_cells;
    if (avg_lambda > 0) cfg.avg_lambda = avg_lambda;
    if (avg_horizon > 0) cfg.avg_horizon = avg_horizon;
    if (avg_dt > 0) cfg.avg_dt = avg_dt;
    if (!policy_flag.empty()) cfg.avg_policy = policy_flag;
    if (mu_flag > 0) cfg.mu = mu_flag;
    if (horizon_flag > 0) {
      cfg.horizon = horizon_flag;
      cfg.mu = 0.0;
    }
    if (!eps_flag.empty()) {
      cfg.eps_schedule.clear();
      std::istringstream in(eps_flag);
      std::string tok;
      while (std::getline(in, tok, ','))
        cfg.eps_schedule.push_back(std::stod(tok));
    }

    if (resonance->parsed()) return run_resonance(cfg);
    if (cell->parsed()) return run_cell(cfg, csv_path);
    if (table->parsed()) return run_table(cfg, csv_path, sidecar_path);
    if (average->parsed()) return run_average(cfg);
    if (homogenize->parsed()) return run_homogenize(cfg, report_path, csv_prefix);
    return kExitInvalidConfig;
  } catch (const BudgetExceeded& e) {
    emit(Json{{"error", {{"kind", "budget-exceeded"}, {"what", e.what()}}}});
    return kExitBudgetExceeded;
  } catch (const NonConvergence& e) {
    emit(Json{{"error",
               {{"kind", "non-convergence"},
                {"what", e.what()},
                {"last_residual", e.last_residual}}}});
    return kExitNonConvergence;
  } catch (const OutOfValidity& e) {
    emit(Json{{"error", {{"kind", "out-of-validity"}, {"what", e.what()}}}});
    return kExitNonConvergence;
  } catch (const InvalidInput& e) {
    emit(Json{{"error", {{"kind", "invalid-config"}, {"what", e.what()}}}});
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    emit(Json{{"error", {{"kind", "internal"}, {"what", e.what()}}}});
    return kExitPropertyViolation;
  }
}
