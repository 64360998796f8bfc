#include "verify/criteria.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>

#include "mshj/average.hpp"
#include "mshj/cell.hpp"
#include "mshj/effective.hpp"
#include "mshj/homogenize.hpp"
#include "verify/oracles.hpp"

namespace mshj::verify {

namespace {

using Eigen::VectorXd;
constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << what;
    }
  }
  void note(const std::string& what) {
    if (detail.tellp() > 0) detail << "; ";
    detail << what;
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

VectorXd scalar_vec(double v) { return VectorXd::Constant(1, v); }

// --- shared problem builders -------------------------------------------------

// H = |q|^theta - (2 + sin 2 pi y), single scale, 1D
ClosedFormSpec single_scale_eikonal(int theta) {
  ClosedFormSpec spec;
  spec.dim = 1;
  spec.num_scales = 1;
  spec.theta = theta;
  spec.potential = PotentialSpec::torus_trig(1, 1, 2.0, {{0, 0, 1, 1.0, 0.0}});
  return spec;
}

// two-scale control form: b = alpha in {-1,0,1}, g = 2 + .5 sin 2pi y1 + .5 sin 2pi y2
ControlHamiltonianSpec two_scale_control() {
  ControlHamiltonianSpec spec;
  spec.dim = 1;
  spec.num_scales = 2;
  const PotentialSpec pot = PotentialSpec::torus_trig(
      1, 2, 2.0, {{0, 0, 1, 0.5, 0.0}, {1, 0, 1, 0.5, 0.0}});
  spec.controls = ControlSet::enumerated(
      {scalar_vec(-1.0), scalar_vec(0.0), scalar_vec(1.0)});
  spec.drift = [](const VectorXd&, const VectorXd&, const VectorXd& a) { return a; };
  spec.cost = [pot](const VectorXd&, const VectorXd& ys, const VectorXd&) {
    return pot.eval_torus(ys);
  };
  spec.sup_drift = 1.0;
  spec.sup_cost = 3.0;
  return spec;
}

ScaleSystem two_scale_system(bool resonant) {
  std::vector<std::vector<ScaleRatio>> gamma(2);
  gamma[0] = {ScaleRatio::one()};
  gamma[1] = {resonant ? ScaleRatio::rational(1, 2)
                       : ScaleRatio::irrational(std::sqrt(2.0))};
  return ScaleSystem(1, 2, std::move(gamma));
}

// quasi-periodic eikonal with periods (1, sqrt 2)
ClosedFormSpec quasi_periodic_eikonal() {
  ClosedFormSpec spec;
  spec.dim = 1;
  spec.num_scales = 2;
  spec.theta = 1;
  std::vector<std::vector<ScaleRatio>> periods(2);
  periods[0] = {ScaleRatio::one()};
  periods[1] = {ScaleRatio::irrational(std::sqrt(2.0))};
  spec.potential = PotentialSpec::quasi_periodic(
      1, 2, 2.0, {{0, 0, 1, 0.5, 0.0}, {1, 0, 1, 0.5, 0.0}}, periods);
  return spec;
}

ClosedFormSpec compact_well() {
  ClosedFormSpec spec;
  spec.dim = 1;
  spec.num_scales = 1;
  spec.theta = 1;
  spec.potential = PotentialSpec::compact_deformation(1, 0.0, 1.0, 1.0);
  return spec;
}

struct Cache {
  std::optional<EffectiveTable> c1_table_theta1;
  std::optional<EffectiveTable> c1_table_theta2;
  std::optional<EffectiveTable> c2_table_eikonal;
  std::optional<EffectiveTable> c2_table_quadratic;
  std::optional<EffectiveTable> c3_coarse_table;

  struct C3Run {
    EffectiveValue nonres;
    EffectiveValue res;
    ControlHamiltonianSpec spec;
    ScaleSystem scales_nonres = ScaleSystem::identity(1);
  };
  std::optional<C3Run> c3;
};

const EffectiveTable& c2_eikonal_table(Cache& cache) {
  if (!cache.c2_table_eikonal) {
    const TorusGrid grid = TorusGrid::uniform(1, 1, 256);
    const MomentumGrid pg = MomentumGrid::symmetric(1, 4.0, 33);
    cache.c2_table_eikonal =
        build_table(Hamiltonian(single_scale_eikonal(1)), scalar_vec(0.0),
                    ScaleSystem::identity(1), pg, lambda_schedule(1.0, 0.5, 1e-3),
                    grid);
  }
  return *cache.c2_table_eikonal;
}

const EffectiveTable& c2_quadratic_table(Cache& cache) {
  if (!cache.c2_table_quadratic) {
    const TorusGrid grid = TorusGrid::uniform(1, 1, 256);
    const MomentumGrid pg = MomentumGrid::symmetric(1, 4.0, 33);
    cache.c2_table_quadratic =
        build_table(Hamiltonian(single_scale_eikonal(2)), scalar_vec(0.0),
                    ScaleSystem::identity(1), pg, lambda_schedule(1.0, 0.5, 1e-3),
                    grid);
  }
  return *cache.c2_table_quadratic;
}

const Cache::C3Run& c3_run(Cache& cache) {
  if (!cache.c3) {
    Cache::C3Run run{.nonres = {}, .res = {}, .spec = two_scale_control(),
                     .scales_nonres = two_scale_system(false)};
    const TorusGrid grid = TorusGrid::uniform(1, 2, 128);
    const std::vector<double> schedule = lambda_schedule(1.0, 0.5, 1e-3);
    CellSolveOptions opts;
    opts.tol = 2e-4;
    run.nonres = effective_value(Hamiltonian(run.spec), scalar_vec(0.0),
                                 scalar_vec(0.0), run.scales_nonres, grid, schedule,
                                 opts);
    run.res =
        effective_value(Hamiltonian(run.spec), scalar_vec(0.0), scalar_vec(0.0),
                        two_scale_system(true), grid, schedule, opts);
    cache.c3 = std::move(run);
  }
  return *cache.c3;
}

// --- criteria ----------------------------------------------------------------

CriterionResult criterion1(Cache&, std::uint64_t) {
  Check c;
  const double c0 = 0.7;
  const TorusGrid grid = TorusGrid::uniform(1, 1, 16);
  const std::vector<double> schedule = lambda_schedule(1.0, 0.5, 1e-3);
  CellSolveOptions opts;
  opts.tol = 1e-9;
  for (int theta : {1, 2}) {
    ClosedFormSpec spec;
    spec.dim = 1;
    spec.num_scales = 1;
    spec.theta = theta;
    spec.potential = PotentialSpec::torus_trig(1, 1, c0, {});
    for (double pv : {0.0, 1.0, 2.0}) {
      const EffectiveValue ev =
          effective_value(Hamiltonian(spec), scalar_vec(0.0), scalar_vec(pv),
                          ScaleSystem::identity(1), grid, schedule, opts);
      const double expected = std::pow(std::abs(pv), theta) - c0;
      c.expect(std::abs(ev.hbar - expected) <= 1e-6,
               "theta=" + std::to_string(theta) + " p=" + fmt(pv) + " error " +
                   fmt(std::abs(ev.hbar - expected)));
      c.expect(ev.flatness <= 1e-8,
               "theta=" + std::to_string(theta) + " p=" + fmt(pv) + " flatness " +
                   fmt(ev.flatness));
    }
  }
  return {1, "constant-potential exactness", c.ok, c.detail.str(), 0.0};
}

CriterionResult criterion2(Cache& cache, std::uint64_t) {
  Check c;
  const auto v = [](double y) { return 2.0 + std::sin(kTwoPi * y); };
  {
    const EffectiveTable& table = c2_eikonal_table(cache);
    double sup = 0.0;
    for (long f = 0; f < table.grid.points(); ++f) {
      const double p = table.grid.node(f)[0];
      sup = std::max(sup,
                     std::abs(table.values[f] - oracles::effective_eikonal_1d(v, p)));
    }
    c.note("eikonal sup err " + fmt(sup));
    c.expect(sup <= 3e-2, "eikonal table off by " + fmt(sup));
  }
  {
    const EffectiveTable& table = c2_quadratic_table(cache);
    double sup = 0.0;
    for (long f = 0; f < table.grid.points(); ++f) {
      const double p = table.grid.node(f)[0];
      sup = std::max(
          sup, std::abs(table.values[f] - oracles::effective_quadratic_1d(v, p)));
    }
    c.note("quadratic sup err " + fmt(sup));
    c.expect(sup <= 5e-2, "quadratic table off by " + fmt(sup));
  }
  return {2, "1D quadrature-oracle tables", c.ok, c.detail.str(), 0.0};
}

CriterionResult criterion3(Cache& cache, std::uint64_t) {
  Check c;
  const Cache::C3Run& run = c3_run(cache);
  c.note("flatness nonres " + fmt(run.nonres.flatness) + " res " +
         fmt(run.res.flatness));
  c.expect(run.nonres.flatness <= 0.5 * run.res.flatness,
           "non-resonant flatness not below half the resonant one");
  c.expect(std::abs(run.nonres.hbar - (-1.0)) <= 5e-2,
           "non-resonant effective value " + fmt(run.nonres.hbar) + " != -1");

  // independent trajectory oracle: rest near the potential minimum
  VectorXd y0(2);
  y0 << 0.75, 0.75;
  const double oracle =
      discounted_value(run.spec, scalar_vec(0.0), scalar_vec(0.0), y0,
                       run.scales_nonres, 1e-2, PolicySource::ConstantControls,
                       5e-3, 1000.0);
  c.note("trajectory oracle " + fmt(oracle));
  c.expect(std::abs(-run.nonres.hbar - oracle) <= 5e-2,
           "cell value and trajectory oracle disagree");
  return {3, "two-scale ergodic flatness", c.ok, c.detail.str(), 0.0};
}

CriterionResult criterion4(Cache& cache, std::uint64_t) {
  Check c;
  const Cache::C3Run& run = c3_run(cache);
  const TorusGrid grid = TorusGrid::uniform(1, 2, 128);
  CellProblem problem{Hamiltonian(run.spec), scalar_vec(0.0), scalar_vec(0.0),
                      run.scales_nonres, run.nonres.solution.lambda};
  const CorrectorSample sample =
      restrict_diagonal(run.nonres.solution, grid, problem, 2.0, 400);
  const double h = grid.spacing(0);
  const double bound = run.nonres.solution.lam_w_osc + 10.0 * h;
  const double measured_c = (sample.residual_p95 - run.nonres.solution.lam_w_osc) / h;
  c.note("p95 " + fmt(sample.residual_p95) + ", lam*osc(w) " +
         fmt(run.nonres.solution.lam_w_osc) + ", measured C " + fmt(measured_c));
  c.expect(sample.residual_p95 <= bound,
           "diagonal residual p95 " + fmt(sample.residual_p95) + " above " + fmt(bound));
  return {4, "diagonal corrector residual", c.ok, c.detail.str(), 0.0};
}

CriterionResult criterion5(Cache& cache, std::uint64_t) {
  Check c;
  const double c0 = 0.7;
  if (!cache.c1_table_theta1 || !cache.c1_table_theta2) {
    const TorusGrid grid = TorusGrid::uniform(1, 1, 16);
    const MomentumGrid pg = MomentumGrid::symmetric(1, 4.0, 33);
    const std::vector<double> schedule = lambda_schedule(1.0, 0.5, 1e-3);
    CellSolveOptions opts;
    opts.tol = 1e-9;
    for (int theta : {1, 2}) {
      ClosedFormSpec spec;
      spec.dim = 1;
      spec.num_scales = 1;
      spec.theta = theta;
      spec.potential = PotentialSpec::torus_trig(1, 1, c0, {});
      auto table = build_table(Hamiltonian(spec), scalar_vec(0.0),
                               ScaleSystem::identity(1), pg, schedule, grid, opts);
      (theta == 1 ? cache.c1_table_theta1 : cache.c1_table_theta2) = std::move(table);
    }
  }
  if (!cache.c3_coarse_table) {
    ClosedFormSpec spec;
    spec.dim = 1;
    spec.num_scales = 2;
    spec.theta = 1;
    spec.potential = PotentialSpec::torus_trig(
        1, 2, 2.0, {{0, 0, 1, 0.5, 0.0}, {1, 0, 1, 0.5, 0.0}});
    const TorusGrid grid = TorusGrid::uniform(1, 2, 64);
    const MomentumGrid pg = MomentumGrid::symmetric(1, 4.0, 9);
    CellSolveOptions opts;
    opts.tol = 5e-4;
    cache.c3_coarse_table =
        build_table(Hamiltonian(spec), scalar_vec(0.0), two_scale_system(false), pg,
                    lambda_schedule(1.0, 0.5, 4e-3), grid, opts);
  }

  struct Entry {
    const EffectiveTable* table;
    double theta;
    double h;
    const char* name;
  };
  const std::vector<Entry> entries = {
      {&*cache.c1_table_theta1, 1.0, 1.0 / 16, "c1-theta1"},
      {&*cache.c1_table_theta2, 2.0, 1.0 / 16, "c1-theta2"},
      {&c2_eikonal_table(cache), 1.0, 1.0 / 256, "c2-eikonal"},
      {&c2_quadratic_table(cache), 2.0, 1.0 / 256, "c2-quadratic"},
      {&*cache.c3_coarse_table, 1.0, 1.0 / 64, "c3-two-scale"},
  };
  for (const auto& e : entries) {
    const double scheme_error = e.table->flatness.maxCoeff() + 10.0 * e.h;
    const PropertyReport report = check_properties(*e.table, 2.0 * scheme_error);
    c.note(std::string(e.name) + ": coercivity " + fmt(report.coercivity_fit) +
           ", lipschitz " + fmt(report.lipschitz_estimate) + ", violations " +
           std::to_string(report.convexity_violations.size()));
    c.expect(report.convexity_violations.empty(),
             std::string(e.name) + ": midpoint convexity violated");
    c.expect(std::isfinite(report.lipschitz_estimate),
             std::string(e.name) + ": Lipschitz estimate not finite");
    c.expect(std::abs(report.coercivity_fit - e.theta) <= 0.15,
             std::string(e.name) + ": coercivity fit " + fmt(report.coercivity_fit) +
                 " away from " + fmt(e.theta));
  }
  return {5, "effective-Hamiltonian property suite", c.ok, c.detail.str(), 0.0};
}

CriterionResult criterion6(Cache&, std::uint64_t) {
  Check c;
  StudyOptions opts;
  opts.torus_cells = 256;
  opts.lambda_min = 1e-3;
  opts.cells_per_eps = 8;
  opts.solver.tol = 1e-7;
  const ConvergenceReport report = convergence_study(
      Hamiltonian(single_scale_eikonal(1)), ScaleSystem::identity(1),
      {1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32}, 1.0, nullptr, 0.0, opts);
  std::ostringstream errs;
  for (double e : report.sup_errors) errs << " " << fmt(e);
  c.note("sup errors" + errs.str());
  for (size_t k = 0; k + 1 < report.sup_errors.size(); ++k) {
    const bool floored = report.hfloor_flags[k] || report.hfloor_flags[k + 1];
    c.expect(report.sup_errors[k + 1] < report.sup_errors[k] || floored,
             "errors not decreasing at eps " + fmt(report.eps[k + 1]) +
                 " (not at the h-floor)");
  }
  return {6, "homogenization convergence", c.ok, c.detail.str(), 0.0};
}

CriterionResult criterion7(Cache&, std::uint64_t) {
  Check c;
  const ClosedFormSpec spec = quasi_periodic_eikonal();
  ConsistencyOptions opts;
  for (double pv : {0.0, 1.0, 2.0}) {
    const ConsistencyReport report =
        quasi_torus_consistency(spec, scalar_vec(0.0), scalar_vec(pv), opts);
    c.note("p=" + fmt(pv) + ": torus " + fmt(report.torus_value) + " box " +
           fmt(report.box_value));
    c.expect(report.difference <= 5e-2,
             "p=" + fmt(pv) + ": torus/box difference " + fmt(report.difference));
    c.expect(!report.resonant, "p=" + fmt(pv) + ": lift unexpectedly resonant");
  }
  return {7, "quasi-periodic torus/box consistency", c.ok, c.detail.str(), 0.0};
}

CriterionResult criterion8(Cache&, std::uint64_t) {
  Check c;
  const ClosedFormSpec spec = compact_well();
  BoxSolveOptions opts;
  opts.tol = 1e-4;
  for (double pv : {0.0, 0.5, 2.0}) {
    const BoxCellSolution sol =
        solve_cell_unbounded(spec, scalar_vec(0.0), scalar_vec(pv), 0.05, 200.0, 32,
                             opts);
    const double expected = std::abs(pv) - 1.0;
    c.note("p=" + fmt(pv) + ": value " + fmt(sol.effective_value));
    c.expect(std::abs(sol.effective_value - expected) <= 5e-2,
             "p=" + fmt(pv) + ": value " + fmt(sol.effective_value) + " != " +
                 fmt(expected));
    bool monotone = true;
    for (int k = 0; k + 1 < sol.shell_slopes.size(); ++k)
      if (sol.shell_slopes[k + 1] > sol.shell_slopes[k] + 1e-9) monotone = false;
    c.expect(monotone, "p=" + fmt(pv) + ": shell slopes not decreasing");
  }
  return {8, "class-B1 compact deformation", c.ok, c.detail.str(), 0.0};
}

CriterionResult criterion9(Cache&, std::uint64_t) {
  Check c;
  std::vector<Hamiltonian> specs;
  std::vector<ScaleSystem> scales;
  for (int n = 1; n <= 6; ++n) {
    ClosedFormSpec spec;
    spec.dim = 1;
    spec.num_scales = 1;
    spec.theta = 1;
    spec.potential = PotentialSpec::torus_trig(
        1, 1, 2.0,
        {{0, 0, 1, 1.0, 0.0}, {0, 0, 1, std::pow(2.0, -n), 0.5 * 3.14159265358979324}});
    specs.emplace_back(spec);
    scales.push_back(ScaleSystem::identity(1));
  }
  const TorusGrid grid = TorusGrid::uniform(1, 1, 128);
  const MomentumGrid pg = MomentumGrid::symmetric(1, 4.0, 17);
  CellSolveOptions opts;
  opts.tol = 1e-5;
  const B0LimitResult result = b0_limit_table(
      specs, scales, scalar_vec(0.0), pg, lambda_schedule(1.0, 0.5, 2e-3), grid, opts);
  const double scheme_error = 2e-3 + 10.0 / 128;
  for (size_t k = 0; k < result.cauchy_gaps.size(); ++k) {
    const double bound = std::pow(2.0, -double(k + 1)) + 2.0 * scheme_error;
    c.note("gap " + std::to_string(k + 1) + " = " + fmt(result.cauchy_gaps[k]));
    c.expect(result.cauchy_gaps[k] <= bound,
             "gap " + std::to_string(k + 1) + " = " + fmt(result.cauchy_gaps[k]) +
                 " above " + fmt(bound));
  }
  return {9, "class-B0 limit gaps", c.ok, c.detail.str(), 0.0};
}

CriterionResult criterion10(Cache&, std::uint64_t seed) {
  Check c;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // (a) Lax-Friedrichs flux monotonicity
  {
    const ClosedFormSpec closed = single_scale_eikonal(1);
    const auto rewrite = closed_to_control(closed, MomentumBox::cube(1, 3.0));
    const Hamiltonian ham(rewrite.spec);
    const NumericalHamiltonianParams params =
        estimate_dissipation(ham, scalar_vec(0.0), MomentumBox::cube(1, 3.0));
    int violations = 0;
    for (int k = 0; k < 1200; ++k) {
      const VectorXd ys = scalar_vec(unit(rng));
      const double pm = -2.5 + 5.0 * unit(rng);
      const double pp = -2.5 + 5.0 * unit(rng);
      const double delta = 0.4 * unit(rng) + 1e-3;
      const double base = lf_numerical_hamiltonian(ham, params, scalar_vec(0.0), ys,
                                                   scalar_vec(pm), scalar_vec(pp));
      if (pp + delta <= 3.0) {
        const double up = lf_numerical_hamiltonian(
            ham, params, scalar_vec(0.0), ys, scalar_vec(pm), scalar_vec(pp + delta));
        if (up > base + 1e-12) ++violations;
      }
      if (pm + delta <= 3.0) {
        const double up = lf_numerical_hamiltonian(
            ham, params, scalar_vec(0.0), ys, scalar_vec(pm + delta), scalar_vec(pp));
        if (up < base - 1e-12) ++violations;
      }
    }
    c.note("flux monotonicity violations " + std::to_string(violations));
    c.expect(violations == 0, "LF flux monotonicity violated");
  }

  // shared small problem for the sweep-map properties
  const ClosedFormSpec closed = single_scale_eikonal(1);
  const auto rewrite = closed_to_control(closed, MomentumBox::cube(1, 6.0));
  const TorusGrid grid = TorusGrid::uniform(1, 1, 16);
  CellProblem problem{Hamiltonian(rewrite.spec), scalar_vec(0.0), scalar_vec(1.0),
                      ScaleSystem::identity(1), 0.5};
  CellSolveOptions plain;
  plain.accelerate = false;

  // (b) discrete comparison: w <= w' is preserved by one sweep
  {
    int violations = 0;
    for (int k = 0; k < 1000; ++k) {
      Eigen::ArrayXd w(grid.points()), bump(grid.points());
      for (long f = 0; f < grid.points(); ++f) {
        w[f] = 4.0 * unit(rng) - 2.0;
        bump[f] = 2.0 * unit(rng);
      }
      const Eigen::ArrayXd sa = cell_sweep(problem, grid, w, plain);
      const Eigen::ArrayXd sb = cell_sweep(problem, grid, w + bump, plain);
      if ((sb - sa).minCoeff() < -1e-12) ++violations;
    }
    c.note("comparison violations " + std::to_string(violations));
    c.expect(violations == 0, "discrete comparison violated");
  }

  // (c) contraction factor 1/(1 + lambda tau) per plain sweep
  {
    const double tau = cell_tau(problem, grid, plain);
    const double factor = 1.0 / (1.0 + problem.lambda * tau);
    int violations = 0;
    for (int k = 0; k < 1000; ++k) {
      Eigen::ArrayXd w(grid.points());
      for (long f = 0; f < grid.points(); ++f) w[f] = 6.0 * unit(rng) - 3.0;
      const double r0 = cell_residual(problem, grid, w, plain).abs().maxCoeff();
      const Eigen::ArrayXd w1 = cell_sweep(problem, grid, w, plain);
      const double r1 = cell_residual(problem, grid, w1, plain).abs().maxCoeff();
      if (r1 > factor * r0 * (1.0 + 1e-9) + 1e-12) ++violations;
    }
    c.note("contraction violations " + std::to_string(violations));
    c.expect(violations == 0, "contraction factor violated");
  }

  // (d) uniform bound |lambda w| <= sup|g| + |p| sup|b| along plain iterates
  {
    int violations = 0;
    int probes = 0;
    for (int j = 0; j < 10; ++j) {
      const double amp1 = unit(rng);
      const double amp2 = 0.5 * unit(rng);
      const double pv = 4.0 * unit(rng) - 2.0;
      ClosedFormSpec spec;
      spec.dim = 1;
      spec.num_scales = 1;
      spec.theta = 1;
      spec.potential = PotentialSpec::torus_trig(
          1, 1, 2.0, {{0, 0, 1, amp1, 0.0}, {0, 0, 2, amp2, 1.0}});
      double sup_v = 0.0;
      for (int s = 0; s < 4096; ++s) {
        Eigen::VectorXd y = scalar_vec(double(s) / 4096);
        sup_v = std::max(sup_v, std::abs(spec.potential.eval_torus(y)));
      }
      const double bound = sup_v + std::abs(pv) * 1.0 + 1e-9;
      CellProblem prob{Hamiltonian(spec), scalar_vec(0.0), scalar_vec(pv),
                       ScaleSystem::identity(1), 0.25};
      Eigen::ArrayXd w = Eigen::ArrayXd::Zero(grid.points());
      for (int it = 0; it < 128; ++it) {
        w = cell_sweep(prob, grid, w, plain);
        ++probes;
        if ((prob.lambda * w).abs().maxCoeff() > bound) ++violations;
      }
    }
    c.note("bound probes " + std::to_string(probes) + ", violations " +
           std::to_string(violations));
    c.expect(violations == 0, "uniform lambda-w bound violated");
  }
  return {10, "scheme property suite", c.ok, c.detail.str(), 0.0};
}

}  // namespace

std::vector<CriterionResult> run_criteria(const std::vector<int>& ids,
                                          std::uint64_t seed) {
  using Fn = CriterionResult (*)(Cache&, std::uint64_t);
  const std::vector<Fn> criteria = {criterion1, criterion2, criterion3, criterion4,
                                    criterion5, criterion6, criterion7, criterion8,
                                    criterion9, criterion10};
  Cache cache;
  std::vector<CriterionResult> results;
  for (int k = 0; k < static_cast<int>(criteria.size()); ++k) {
    const int id = k + 1;
    if (!ids.empty() && std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult res;
    try {
      res = criteria[k](cache, seed);
    } catch (const std::exception& e) {
      res.id = id;
      res.name = "criterion " + std::to_string(id);
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                start)
                      .count();
    results.push_back(std::move(res));
  }
  return results;
}

int print_results(const std::vector<CriterionResult>& results) {
  int failures = 0;
  for (const auto& r : results) {
    std::printf("[%s] criterion %2d: %-38s (%.1f s)%s%s\n", r.pass ? "PASS" : "FAIL",
                r.id, r.name.c_str(), r.seconds, r.detail.empty() ? "" : " -- ",
                r.detail.c_str());
    if (!r.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures,
              results.size());
  return failures == 0 ? 0 : 3;
}

}  // namespace mshj::verify
