#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mshj/cell.hpp"
#include "verify/oracles.hpp"

using namespace mshj;
using Eigen::VectorXd;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

VectorXd vec1(double v) { return VectorXd::Constant(1, v); }

ClosedFormSpec eikonal_sin_1d() {
  ClosedFormSpec spec;
  spec.dim = 1;
  spec.num_scales = 1;
  spec.theta = 1;
  spec.potential = PotentialSpec::torus_trig(1, 1, 2.0, {{0, 0, 1, 1.0, 0.0}});
  return spec;
}

const auto v_sin = [](double y) { return 2.0 + std::sin(kTwoPi * y); };
}  // namespace

TEST_CASE("constant solution of the y-independent quadratic problem") {
  ClosedFormSpec spec;
  spec.dim = 2;
  spec.num_scales = 1;
  spec.theta = 2;
  spec.potential = PotentialSpec::torus_trig(2, 1, 0.0, {});
  VectorXd p(2);
  p << 1.0, 1.0;
  CellProblem problem{Hamiltonian(spec), VectorXd::Zero(2), p,
                      ScaleSystem::identity(2), 0.5};
  const TorusGrid grid = TorusGrid::uniform(2, 1, 8);
  CellSolveOptions opts;
  opts.tol = 1e-12;
  const CellSolution sol = solve_cell(problem, grid, opts);
  // lambda w = -|p|^2 = -2, so w = -4 everywhere
  CHECK(sol.w.maxCoeff() == doctest::Approx(-4.0).epsilon(1e-9));
  CHECK(sol.w.minCoeff() == doctest::Approx(-4.0).epsilon(1e-9));
  CHECK(sol.lam_w_osc <= 1e-12);
  CHECK(sol.residual <= 1e-12);
}

TEST_CASE("1D eikonal cell problem against the quadrature oracle") {
  const ClosedFormSpec spec = eikonal_sin_1d();
  const TorusGrid grid = TorusGrid::uniform(1, 1, 256);
  CellSolveOptions opts;
  opts.tol = 1e-5;

  CellProblem problem{Hamiltonian(spec), vec1(0.0), vec1(0.0),
                      ScaleSystem::identity(1), 0.01};
  const CellSolution at0 = solve_cell(problem, grid, opts);
  // H_bar(0) = -min V = -1, so mean(lambda w) is near +1
  CHECK(std::abs(at0.lam_w_mean - 1.0) <= 3e-2);

  problem.p = vec1(4.0);
  const CellSolution at4 = solve_cell(problem, grid, opts);
  CHECK(std::abs(-at4.lam_w_mean - oracles::effective_eikonal_1d(v_sin, 4.0)) <=
        3e-2);
  CHECK(std::abs(-at4.lam_w_mean - 2.0) <= 3e-2);
}

TEST_CASE("effective_value: exact flatness for y-independent Hamiltonians") {
  ClosedFormSpec spec;
  spec.dim = 1;
  spec.num_scales = 1;
  spec.theta = 1;
  spec.potential = PotentialSpec::torus_trig(1, 1, 1.3, {});
  const TorusGrid grid = TorusGrid::uniform(1, 1, 16);
  const EffectiveValue ev =
      effective_value(Hamiltonian(spec), vec1(0.0), vec1(2.0),
                      ScaleSystem::identity(1), grid, lambda_schedule(1.0, 0.5, 1e-3),
                      {.tol = 1e-10});
  CHECK(ev.flatness == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev.hbar == doctest::Approx(2.0 - 1.3).epsilon(1e-8));
}

TEST_CASE("effective_value: 1D eikonal flattens along the schedule") {
  const ClosedFormSpec spec = eikonal_sin_1d();
  const TorusGrid grid = TorusGrid::uniform(1, 1, 256);
  const EffectiveValue ev =
      effective_value(Hamiltonian(spec), vec1(0.0), vec1(0.0),
                      ScaleSystem::identity(1), grid, lambda_schedule(1.0, 0.5, 1e-3),
                      {.tol = 1e-5});
  CHECK(ev.flatness <= 5e-2);
  CHECK(std::abs(ev.hbar - (-1.0)) <= 3e-2);
}

TEST_CASE("uniform bound |lambda w| <= sup|g| + |p| sup|b| at convergence") {
  const ClosedFormSpec spec = eikonal_sin_1d();
  const TorusGrid grid = TorusGrid::uniform(1, 1, 64);
  for (double pv : {0.0, 1.5, -3.0}) {
    CellProblem problem{Hamiltonian(spec), vec1(0.0), vec1(pv),
                        ScaleSystem::identity(1), 0.05};
    const CellSolution sol = solve_cell(problem, grid, {.tol = 1e-8});
    const double bound = 3.0 + std::abs(pv) * 1.0 + 1e-6;
    CHECK((sol.lambda * sol.w).abs().maxCoeff() <= bound);
  }
}

TEST_CASE("grid refinement: effective value moves by O(h)") {
  const ClosedFormSpec spec = eikonal_sin_1d();
  const std::vector<double> schedule = lambda_schedule(1.0, 0.5, 5e-3);
  double prev = 0.0;
  double prev_diff = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int cells = 64 << k;
    const TorusGrid grid = TorusGrid::uniform(1, 1, cells);
    const EffectiveValue ev =
        effective_value(Hamiltonian(spec), vec1(0.0), vec1(1.0),
                        ScaleSystem::identity(1), grid, schedule, {.tol = 1e-6});
    if (k > 0) {
      const double diff = std::abs(ev.hbar - prev);
      CHECK(diff <= 10.0 * (64.0 / cells) / 64.0);  // C * h with C <= 10
      if (k > 1) CHECK(diff <= prev_diff + 1e-3);
      prev_diff = diff;
    }
    prev = ev.hbar;
  }
}

TEST_CASE("restrict_diagonal: identity embedding reproduces the periodic corrector") {
  const ClosedFormSpec spec = eikonal_sin_1d();
  const TorusGrid grid = TorusGrid::uniform(1, 1, 256);
  CellProblem problem{Hamiltonian(spec), vec1(0.0), vec1(0.0),
                      ScaleSystem::identity(1), 1e-3};
  CellSolveOptions opts;
  opts.tol = 1e-6;
  const EffectiveValue ev =
      effective_value(Hamiltonian(spec), vec1(0.0), vec1(0.0),
                      ScaleSystem::identity(1), grid, lambda_schedule(1.0, 0.5, 1e-3),
                      opts);
  const CorrectorSample sample =
      restrict_diagonal(ev.solution, grid, problem, 2.0, 300);
  // residual stays within lambda osc(w) + C h with a small measured C
  CHECK(sample.residual_p95 <= ev.solution.lam_w_osc + 10.0 * grid.spacing(0));
  CHECK(sample.values.size() == 300);
}

TEST_CASE("restrict_diagonal: constant solution gives vanishing residual") {
  ClosedFormSpec spec;
  spec.dim = 1;
  spec.num_scales = 1;
  spec.theta = 1;
  spec.potential = PotentialSpec::torus_trig(1, 1, 0.8, {});
  const TorusGrid grid = TorusGrid::uniform(1, 1, 32);
  CellProblem problem{Hamiltonian(spec), vec1(0.0), vec1(0.0),
                      ScaleSystem::identity(1), 0.5};
  const CellSolution sol = solve_cell(problem, grid, {.tol = 1e-11});
  const CorrectorSample sample = restrict_diagonal(sol, grid, problem, 1.0, 50);
  CHECK(sample.residual_max <= 1e-9);
}

TEST_CASE("out-of-validity: too-small momentum box is reported") {
  const ClosedFormSpec spec = eikonal_sin_1d();
  const TorusGrid grid = TorusGrid::uniform(1, 1, 64);
  CellProblem problem{Hamiltonian(spec), vec1(0.0), vec1(0.0),
                      ScaleSystem::identity(1), 0.01};
  CellSolveOptions opts;
  opts.tol = 1e-6;
  opts.q_margin = 0.4;  // corrector gradients reach ~3 here
  opts.check_every = 1;
  CHECK_THROWS_AS(solve_cell(problem, grid, opts), OutOfValidity);
}

TEST_CASE("non-convergence carries the last residual") {
  const ClosedFormSpec spec = eikonal_sin_1d();
  const TorusGrid grid = TorusGrid::uniform(1, 1, 64);
  CellProblem problem{Hamiltonian(spec), vec1(0.0), vec1(0.0),
                      ScaleSystem::identity(1), 0.01};
  CellSolveOptions opts;
  opts.tol = 1e-12;
  opts.max_iter = 5;
  try {
    solve_cell(problem, grid, opts);
    CHECK(false);
  } catch (const NonConvergence& e) {
    CHECK(e.last_residual > 0.0);
    CHECK(e.iterations == 5);
  }
}

TEST_CASE("box solve: constant potential normalizes to zero") {
  ClosedFormSpec spec;
  spec.dim = 1;
  spec.num_scales = 1;
  spec.theta = 1;
  spec.potential = PotentialSpec::compact_deformation(1, 0.0, 0.0, 0.0);
  ClosedFormSpec shifted = spec;
  shifted.potential = PotentialSpec::compact_deformation(1, 0.0, 1.4, 0.0);  // V = 1.4
  BoxSolveOptions opts;
  opts.tol = 1e-10;
  const BoxCellSolution sol =
      solve_cell_unbounded(shifted, vec1(0.0), vec1(0.0), 0.1, 20.0, 8, opts);
  CHECK(sol.v.abs().maxCoeff() <= 1e-7);
  CHECK(sol.effective_value == doctest::Approx(-1.4).epsilon(1e-7));
}

TEST_CASE("box solve: compact well reaches |p| - 1 in the far field") {
  ClosedFormSpec spec;
  spec.dim = 1;
  spec.num_scales = 1;
  spec.theta = 1;
  spec.potential = PotentialSpec::compact_deformation(1, 0.0, 1.0, 1.0);
  BoxSolveOptions opts;
  opts.tol = 1e-4;
  const BoxCellSolution sol =
      solve_cell_unbounded(spec, vec1(0.0), vec1(0.0), 0.05, 160.0, 16, opts);
  CHECK(std::abs(sol.effective_value - (-1.0)) <= 5e-2);
  // sublinearity: slopes shrink with the shell radius
  for (int k = 0; k + 1 < sol.shell_slopes.size(); ++k)
    CHECK(sol.shell_slopes[k + 1] <= sol.shell_slopes[k] + 1e-9);
}

TEST_CASE("box solve rejects R < 4 R_V") {
  ClosedFormSpec spec;
  spec.dim = 1;
  spec.num_scales = 1;
  spec.theta = 1;
  spec.potential = PotentialSpec::compact_deformation(1, 0.0, 1.0, 10.0);
  CHECK_THROWS_AS(solve_cell_unbounded(spec, vec1(0.0), vec1(0.0), 0.1, 20.0, 8, {}),
                  InvalidInput);
}

TEST_CASE("torus/box consistency for a plain periodic potential") {
  ClosedFormSpec spec;
  spec.dim = 1;
  spec.num_scales = 1;
  spec.theta = 1;
  spec.potential = PotentialSpec::quasi_periodic(1, 1, 2.0, {{0, 0, 1, 1.0, 0.0}},
                                                 {{ScaleRatio::one()}});
  ConsistencyOptions opts;
  opts.torus_cells = 128;
  opts.lambda_min = 2e-3;
  opts.box_lambda = 0.08;
  opts.box_radius = 80.0;
  opts.box_cells_per_unit = 128;
  const ConsistencyReport report =
      quasi_torus_consistency(spec, vec1(0.0), vec1(0.0), opts);
  CHECK(report.difference <= 1e-2);
  CHECK(report.difference <= report.torus_error_estimate + report.box_error_estimate);
  CHECK(!report.resonant);
}
