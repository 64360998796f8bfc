#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mshj/homogenize.hpp"
#include "verify/oracles.hpp"

using namespace mshj;
using Eigen::VectorXd;

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;

VectorXd vec1(double v) { return VectorXd::Constant(1, v); }

ClosedFormSpec eikonal_const_v(double c) {
  ClosedFormSpec spec;
  spec.dim = 1;
  spec.num_scales = 1;
  spec.theta = 1;
  spec.potential = PotentialSpec::torus_trig(1, 1, c, {});
  return spec;
}

ClosedFormSpec eikonal_sin() {
  ClosedFormSpec spec;
  spec.dim = 1;
  spec.num_scales = 1;
  spec.theta = 1;
  spec.potential = PotentialSpec::torus_trig(1, 1, 2.0, {{0, 0, 1, 1.0, 0.0}});
  return spec;
}

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
}  // namespace

TEST_CASE("stationary: |u'| - 1 against the closed-form solution") {
  // mu u + |u'| - 1 = 0 on (0,1), u = 0 at the boundary:
  // u(x) = 1 - exp(-min(x, 1-x)), checked by substitution.
  OscillatoryProblem prob;
  prob.ham = Hamiltonian(eikonal_const_v(1.0));
  prob.scales = ScaleSystem::identity(1);
  prob.eps1 = 1.0;
  prob.mu = 1.0;
  double prev_err = 1.0;
  for (int cells : {64, 128}) {
    const SpatialGrid grid = SpatialGrid::dirichlet(1, cells);
    const Eigen::ArrayXd u = solve_oscillatory_stationary(prob, grid);
    double err = 0.0;
    for (long f = 0; f < grid.points(); ++f) {
      const double x = grid.node(f)[0];
      const double exact = 1.0 - std::exp(-std::min(x, 1.0 - x));
      err = std::max(err, std::abs(u[f] - exact));
    }
    CHECK(err <= 8.0 / cells);  // C h with a modest constant
    CHECK(err <= prev_err);
    prev_err = err;
    // stationary bound ||u|| <= sup |H(.,.,0)| / mu
    CHECK(u.abs().maxCoeff() <= 1.0 / prob.mu + 1e-9);
  }
}

TEST_CASE("stationary: epsilon-independent Hamiltonian ignores epsilon") {
  OscillatoryProblem prob;
  prob.ham = Hamiltonian(eikonal_const_v(1.0));
  prob.scales = ScaleSystem::identity(1);
  prob.mu = 1.0;
  const SpatialGrid grid = SpatialGrid::dirichlet(1, 64);
  prob.eps1 = 0.25;
  const Eigen::ArrayXd a = solve_oscillatory_stationary(prob, grid);
  prob.eps1 = 0.125;
  const Eigen::ArrayXd b = solve_oscillatory_stationary(prob, grid);
  CHECK((a - b).abs().maxCoeff() == 0.0);  // identical runs, bitwise
}

TEST_CASE("stationary: resolution rule is enforced") {
  OscillatoryProblem prob;
  prob.ham = Hamiltonian(eikonal_sin());
  prob.scales = ScaleSystem::identity(1);
  prob.eps1 = 1.0 / 16;
  prob.mu = 1.0;
  const SpatialGrid grid = SpatialGrid::dirichlet(1, 64);  // h = 1/64 > eps/8
  CHECK_THROWS_AS(solve_oscillatory_stationary(prob, grid), InvalidInput);
}

TEST_CASE("evolution: H == 0 transports nothing") {
  ControlHamiltonianSpec null_spec;
  null_spec.dim = 1;
  null_spec.num_scales = 1;
  null_spec.controls = ControlSet::enumerated({vec1(0.0)});
  null_spec.drift = [](const VectorXd&, const VectorXd&, const VectorXd& a) {
    return a;
  };
  null_spec.cost = [](const VectorXd&, const VectorXd&, const VectorXd&) {
    return 0.0;
  };
  OscillatoryProblem prob;
  prob.ham = Hamiltonian(null_spec);
  prob.scales = ScaleSystem::identity(1);
  prob.eps1 = 1.0;
  prob.u0 = [](const VectorXd& x) { return std::sin(2.0 * kPi * x[0]); };
  prob.horizon = 0.5;
  const SpatialGrid grid = SpatialGrid::periodic(1, 64);
  const Eigen::ArrayXd u = solve_oscillatory_evolution(prob, grid, 0.01);
  for (long f = 0; f < grid.points(); ++f)
    CHECK(u[f] == doctest::Approx(prob.u0(grid.node(f))).epsilon(1e-12));
}

TEST_CASE("evolution: cone shrinks by the Hopf-Lax formula under H = |Du|") {
  OscillatoryProblem prob;
  prob.ham = Hamiltonian(eikonal_const_v(0.0));  // H = |q|
  prob.scales = ScaleSystem::identity(1);
  prob.eps1 = 1.0;
  prob.u0 = [](const VectorXd& x) { return -std::abs(x[0] - 0.5); };
  prob.horizon = 0.25;
  const SpatialGrid grid = SpatialGrid::periodic(1, 256);
  const Eigen::ArrayXd u = solve_oscillatory_evolution(prob, grid, 0.9 / 256 / 1.2);

  const auto u0_periodic = [&](const VectorXd& z) {
    double zz = std::fmod(z[0], 1.0);
    if (zz < 0) zz += 1.0;
    return -std::abs(zz - 0.5);
  };
  double sup = 0.0, sup_flat = 0.0;
  for (long f = 0; f < grid.points(); ++f) {
    const VectorXd x = grid.node(f);
    const double oracle =
        oracles::hopf_lax_min(u0_periodic, x, prob.horizon, x[0] - 0.3, x[0] + 0.3,
                              2400);
    const double err = std::abs(u[f] - oracle);
    sup = std::max(sup, err);
    // away from the cone tip the solution is exactly linear
    if (std::abs(x[0] - 0.5) > 0.1 && std::min(x[0], 1.0 - x[0]) > 0.1)
      sup_flat = std::max(sup_flat, err);
  }
  CHECK(sup <= 6e-2);
  CHECK(sup_flat <= 2e-2);
}

TEST_CASE("evolution: constant datum with H(0) = 0 stays constant") {
  OscillatoryProblem prob;
  prob.ham = Hamiltonian(eikonal_const_v(0.0));
  prob.scales = ScaleSystem::identity(1);
  prob.eps1 = 1.0;
  prob.u0 = [](const VectorXd&) { return 0.7; };
  prob.horizon = 0.3;
  const SpatialGrid grid = SpatialGrid::periodic(1, 32);
  const Eigen::ArrayXd u = solve_oscillatory_evolution(prob, grid, 0.01);
  CHECK((u - 0.7).abs().maxCoeff() <= 1e-13);
}

TEST_CASE("evolution: CFL violation is rejected") {
  OscillatoryProblem prob;
  prob.ham = Hamiltonian(eikonal_const_v(0.0));
  prob.scales = ScaleSystem::identity(1);
  prob.eps1 = 1.0;
  prob.u0 = [](const VectorXd&) { return 0.0; };
  prob.horizon = 0.1;
  const SpatialGrid grid = SpatialGrid::periodic(1, 128);
  CHECK_THROWS_AS(solve_oscillatory_evolution(prob, grid, 0.5), InvalidInput);
}

TEST_CASE("effective stationary: constant table gives u = c/mu inside") {
  const auto table = manual_table_1d(8.0, 5, [](double) { return -0.8; });
  const SpatialGrid grid = SpatialGrid::dirichlet(1, 16);
  const Eigen::ArrayXd u = solve_effective_stationary(table, 2.0, grid);
  for (long f = 0; f < grid.points(); ++f) {
    const double x = grid.node(f)[0];
    if (x == 0.0 || x == 1.0)
      CHECK(u[f] == 0.0);
    else
      CHECK(u[f] == doctest::Approx(0.4).epsilon(1e-10));
  }
}

TEST_CASE("effective stationary: flat-eikonal table stays positive and symmetric") {
  const auto table = manual_table_1d(
      4.0, 33, [](double p) { return std::max(-1.0, std::abs(p) - 2.0); });
  const SpatialGrid grid = SpatialGrid::dirichlet(1, 64);
  const Eigen::ArrayXd u = solve_effective_stationary(table, 1.0, grid);
  CHECK(u.minCoeff() >= -1e-12);
  const int m = grid.nodes_per_axis();
  for (int j = 0; j < m; ++j)
    CHECK(u[j] == doctest::Approx(u[m - 1 - j]).epsilon(1e-10));
}

TEST_CASE("effective stationary: matches the closed form of |p| - 1") {
  const auto table =
      manual_table_1d(4.0, 33, [](double p) { return std::abs(p) - 1.0; });
  const SpatialGrid grid = SpatialGrid::dirichlet(1, 128);
  const Eigen::ArrayXd u = solve_effective_stationary(table, 1.0, grid);
  double err = 0.0;
  for (long f = 0; f < grid.points(); ++f) {
    const double x = grid.node(f)[0];
    err = std::max(err,
                   std::abs(u[f] - (1.0 - std::exp(-std::min(x, 1.0 - x)))));
  }
  CHECK(err <= 8.0 / 128);
}

TEST_CASE("effective stationary: gradient leaving the table box is reported") {
  const auto table = manual_table_1d(0.2, 5, [](double p) { return std::abs(p) - 1.0; });
  const SpatialGrid grid = SpatialGrid::dirichlet(1, 32);
  CHECK_THROWS_AS(solve_effective_stationary(table, 1.0, grid), OutOfValidity);
}

TEST_CASE("discrete comparison and contraction for the evolution solver") {
  const auto table =
      manual_table_1d(4.0, 33, [](double p) { return std::abs(p) - 1.0; });
  const SpatialGrid grid = SpatialGrid::periodic(1, 32);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::ArrayXd a(grid.points()), bump(grid.points());
    const double phase = unif(rng);
    for (long f = 0; f < grid.points(); ++f) {
      const double x = grid.node(f)[0];
      a[f] = 0.5 * std::sin(2.0 * kPi * (x + phase));
      bump[f] = 0.05 * unif(rng);
    }
    std::vector<double> av(a.data(), a.data() + a.size());
    std::vector<double> bv(av);
    for (size_t i = 0; i < bv.size(); ++i) bv[i] += bump[i];
    const auto interp = [&](const std::vector<double>& vals) {
      return [&grid, vals](const VectorXd& x) {
        const double s = x[0] * grid.cells.front();
        const long j = std::min<long>(grid.points() - 1, static_cast<long>(s));
        const long jn = (j + 1) % grid.points();
        const double frac = s - j;
        return (1.0 - frac) * vals[j] + frac * vals[jn];
      };
    };
    const Eigen::ArrayXd ua =
        solve_effective_evolution(table, interp(av), 0.1, grid, 0.005);
    const Eigen::ArrayXd ub =
        solve_effective_evolution(table, interp(bv), 0.1, grid, 0.005);
    CHECK((ub - ua).minCoeff() >= -1e-12);  // comparison
    CHECK((ub - ua).abs().maxCoeff() <= bump.maxCoeff() + 1e-12);  // contraction
  }
}

TEST_CASE("convergence study: single-scale eikonal shrinks the error") {
  StudyOptions opts;
  opts.torus_cells = 128;
  opts.lambda_min = 5e-3;
  opts.p_nodes = 17;
  opts.cell_tol = 1e-6;
  const ConvergenceReport report =
      convergence_study(Hamiltonian(eikonal_sin()), ScaleSystem::identity(1),
                        {1.0 / 4, 1.0 / 8, 1.0 / 16}, 1.0, nullptr, 0.0, opts);
  REQUIRE(report.sup_errors.size() == 3);
  for (size_t k = 0; k + 1 < report.sup_errors.size(); ++k) {
    const bool floored = report.hfloor_flags[k] || report.hfloor_flags[k + 1];
    CHECK((report.sup_errors[k + 1] < report.sup_errors[k] || floored));
  }
  CHECK(report.boundary_errors.size() == 3);
  CHECK(report.scheme_errors.size() == 3);
}
