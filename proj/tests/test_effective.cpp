#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mshj/effective.hpp"

using namespace mshj;
using Eigen::VectorXd;

namespace {
VectorXd vec1(double v) { return VectorXd::Constant(1, v); }

EffectiveTable manual_table_1d(double radius, int nodes,
                               const std::function<double(double)>& f) {
  EffectiveTable table;
  table.x = vec1(0.0);
  table.grid = MomentumGrid::symmetric(1, radius, nodes);
  table.values.resize(nodes);
  table.flatness.setZero(nodes);
  table.failed.assign(nodes, 0);
  for (long k = 0; k < nodes; ++k) table.values[k] = f(table.grid.node(k)[0]);
  return table;
}

ClosedFormSpec eikonal_sin() {
  ClosedFormSpec spec;
  spec.dim = 1;
  spec.num_scales = 1;
  spec.theta = 1;
  spec.potential = PotentialSpec::torus_trig(1, 1, 2.0, {{0, 0, 1, 1.0, 0.0}});
  return spec;
}
}  // namespace

TEST_CASE("interpolation: nodes exact, midpoints averaged, box enforced") {
  const auto table =
      manual_table_1d(4.0, 33, [](double p) { return p * p; });
  CHECK(interpolate(table, vec1(1.0)) == doctest::Approx(1.0));
  CHECK(interpolate(table, vec1(0.125)) ==
        doctest::Approx(0.5 * (0.0 + 0.0625)));  // mean of the two nodes
  CHECK_THROWS_AS(interpolate(table, vec1(4.5)), OutOfValidity);

  // |p|^2 on a unit-step grid queried at 0.5: bilinear overshoot 0.25
  const auto coarse = manual_table_1d(4.0, 9, [](double p) { return p * p; });
  CHECK(interpolate(coarse, vec1(0.5)) == doctest::Approx(0.5));
}

TEST_CASE("check_properties: quadratic and flat-eikonal closed forms") {
  const auto quad = manual_table_1d(4.0, 33, [](double p) { return p * p; });
  const PropertyReport rq = check_properties(quad, 1e-9);
  CHECK(rq.convexity_violations.empty());
  CHECK(std::abs(rq.coercivity_fit - 2.0) <= 0.1);
  CHECK(rq.lipschitz_estimate == doctest::Approx(7.75));  // |16 - 14.0625| / 0.25

  const auto eik = manual_table_1d(
      4.0, 33, [](double p) { return std::max(-1.0, std::abs(p) - 2.0); });
  const PropertyReport re = check_properties(eik, 1e-9);
  CHECK(re.convexity_violations.empty());
  CHECK(std::abs(re.coercivity_fit - 1.0) <= 0.1);

  auto corrupted = eik;
  corrupted.values[16] -= 1.0;  // dent the middle node
  const PropertyReport rbad = check_properties(corrupted, 1e-9);
  CHECK(!rbad.convexity_violations.empty());
}

TEST_CASE("build_table: sup-norm stability under a constant cost shift") {
  const TorusGrid grid = TorusGrid::uniform(1, 1, 16);
  const MomentumGrid pg = MomentumGrid::symmetric(1, 2.0, 5);
  const std::vector<double> schedule = lambda_schedule(1.0, 0.5, 1e-2);
  CellSolveOptions opts;
  opts.tol = 1e-10;

  ClosedFormSpec base;
  base.dim = 1;
  base.num_scales = 1;
  base.theta = 1;
  base.potential = PotentialSpec::torus_trig(1, 1, 0.6, {});
  ClosedFormSpec shifted = base;
  shifted.potential = PotentialSpec::torus_trig(1, 1, 0.6 + 0.25, {});

  const EffectiveTable t0 = build_table(Hamiltonian(base), vec1(0.0),
                                        ScaleSystem::identity(1), pg, schedule, grid,
                                        opts);
  const EffectiveTable t1 = build_table(Hamiltonian(shifted), vec1(0.0),
                                        ScaleSystem::identity(1), pg, schedule, grid,
                                        opts);
  // adding c to g lowers every entry by exactly c
  CHECK(((t1.values - t0.values) + 0.25).abs().maxCoeff() <= 1e-8);
}

TEST_CASE("build_table: momentum symmetry for Phi(|p|) - V families") {
  const TorusGrid grid = TorusGrid::uniform(1, 1, 64);
  const MomentumGrid pg = MomentumGrid::symmetric(1, 3.0, 13);
  const EffectiveTable table =
      build_table(Hamiltonian(eikonal_sin()), vec1(0.0), ScaleSystem::identity(1), pg,
                  lambda_schedule(1.0, 0.5, 5e-3), grid, {.tol = 1e-6});
  for (long k = 0; k < pg.points(); ++k) {
    const long mirror = pg.points() - 1 - k;
    CHECK(std::abs(table.values[k] - table.values[mirror]) <= 5e-3);
  }
  CHECK(!table.any_failed());
}

TEST_CASE("build_table: all-failed propagates as non-convergence") {
  const TorusGrid grid = TorusGrid::uniform(1, 1, 64);
  const MomentumGrid pg = MomentumGrid::symmetric(1, 1.0, 3);
  CellSolveOptions opts;
  opts.tol = 1e-12;
  opts.max_iter = 2;
  CHECK_THROWS_AS(build_table(Hamiltonian(eikonal_sin()), vec1(0.0),
                              ScaleSystem::identity(1), pg,
                              lambda_schedule(1.0, 0.5, 0.5), grid, opts),
                  NonConvergence);
}

TEST_CASE("b0 limit: identical specs give exactly zero gaps") {
  const TorusGrid grid = TorusGrid::uniform(1, 1, 32);
  const MomentumGrid pg = MomentumGrid::symmetric(1, 2.0, 5);
  std::vector<Hamiltonian> specs(3, Hamiltonian(eikonal_sin()));
  std::vector<ScaleSystem> scales(3, ScaleSystem::identity(1));
  const B0LimitResult result =
      b0_limit_table(specs, scales, vec1(0.0), pg, lambda_schedule(1.0, 0.5, 1e-2),
                     grid, {.tol = 1e-8});
  REQUIRE(result.cauchy_gaps.size() == 2);
  CHECK(result.cauchy_gaps[0] == 0.0);  // deterministic rebuild, bitwise equal
  CHECK(result.cauchy_gaps[1] == 0.0);
}

TEST_CASE("b0 limit: geometric perturbations give geometric gaps") {
  const TorusGrid grid = TorusGrid::uniform(1, 1, 64);
  const MomentumGrid pg = MomentumGrid::symmetric(1, 2.0, 5);
  std::vector<Hamiltonian> specs;
  std::vector<ScaleSystem> scales;
  for (int n = 1; n <= 4; ++n) {
    ClosedFormSpec spec = eikonal_sin();
    spec.potential = PotentialSpec::torus_trig(
        1, 1, 2.0, {{0, 0, 1, 1.0, 0.0}, {0, 0, 2, std::pow(2.0, -n), 0.0}});
    specs.emplace_back(spec);
    scales.push_back(ScaleSystem::identity(1));
  }
  const B0LimitResult result =
      b0_limit_table(specs, scales, vec1(0.0), pg, lambda_schedule(1.0, 0.5, 5e-3),
                     grid, {.tol = 1e-7});
  for (size_t k = 0; k < result.cauchy_gaps.size(); ++k)
    CHECK(result.cauchy_gaps[k] <=
          std::pow(2.0, -double(k + 1)) + 2.0 * (5e-3 + 10.0 / 64));
}
