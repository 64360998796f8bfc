#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "mshj/effective.hpp"
#include "mshj/hamiltonian.hpp"
#include "mshj/scales.hpp"

namespace mshj {

/// Spatial grid on the unit box: Dirichlet nodes include the boundary
/// (pinned to 0); periodic nodes cover [0,1) with wraparound (all-space
/// evolution via periodic padding of the data).
struct SpatialGrid {
  enum class Domain { DirichletUnitBox, PeriodicUnitBox };
  Domain domain = Domain::DirichletUnitBox;
  int dim = 1;
  std::vector<int> cells;

  static SpatialGrid dirichlet(int dim, int cells);
  static SpatialGrid periodic(int dim, int cells);
  int nodes_per_axis() const;
  long points() const;
  double spacing() const { return 1.0 / cells.front(); }
  Eigen::VectorXd node(long flat) const;
};

/// Oscillatory problem mu u + H(x, x/eps^1, ..., x/eps^N, Du) = 0 (mu > 0) or
/// u_t + H(...) = 0 with initial datum u0 up to `horizon`.
struct OscillatoryProblem {
  Hamiltonian ham;
  ScaleSystem scales = ScaleSystem::identity(1);
  double eps1 = 1.0;
  double mu = 0.0;  // stationary when > 0
  std::function<double(const Eigen::VectorXd&)> u0;  // evolution
  double horizon = 0.0;
};

struct HomogenizerOptions {
  double tol = 1e-7;
  int max_iter = 2'000'000;
  double cfl_safety = 0.9;
  double sigma_safety = 1.2;
  double q_margin = -1.0;
  /// Oscillation-resolution rule h <= (fast feature scale)/resolution_rule.
  int resolution_rule = 8;
};

Eigen::ArrayXd solve_oscillatory_stationary(const OscillatoryProblem& prob,
                                            const SpatialGrid& grid,
                                            const HomogenizerOptions& opts = {});

Eigen::ArrayXd solve_oscillatory_evolution(const OscillatoryProblem& prob,
                                           const SpatialGrid& grid, double dt,
                                           const HomogenizerOptions& opts = {});

Eigen::ArrayXd solve_effective_stationary(const EffectiveTable& table, double mu,
                                          const SpatialGrid& grid,
                                          const HomogenizerOptions& opts = {});

Eigen::ArrayXd solve_effective_evolution(const EffectiveTable& table,
                                         const std::function<double(const Eigen::VectorXd&)>& u0,
                                         double horizon, const SpatialGrid& grid,
                                         double dt, const HomogenizerOptions& opts = {});

struct ConvergenceReport {
  std::vector<double> eps;
  std::vector<double> sup_errors;       // ||u_eps - u_bar|| on the common nodes
  std::vector<double> interior_errors;  // away from a 0.1-wide boundary band
  std::vector<double> boundary_errors;  // inside the band
  std::vector<double> observed_orders;  // log2(err_k / err_{k+1})
  std::vector<double> scheme_errors;    // per-eps h-refinement estimate of u_bar
  std::vector<bool> hfloor_flags;       // error at or below 3x scheme error
  EffectiveTable table;
};

struct StudyOptions {
  HomogenizerOptions solver;
  int torus_cells = 256;
  double lambda_min = 1e-3;
  double cell_tol = 1e-6;
  double p_radius = 4.0;
  int p_nodes = 33;
  int cells_per_eps = 8;  // grid rule: cells = cells_per_eps / eps
  double evolution_dt_factor = 0.5;
};

/// Builds the effective table once, then runs oscillatory vs effective solves
/// over the epsilon schedule (stationary when mu > 0, else evolution).
ConvergenceReport convergence_study(const Hamiltonian& ham, const ScaleSystem& scales,
                                    const std::vector<double>& eps_schedule,
                                    double mu,
                                    const std::function<double(const Eigen::VectorXd&)>& u0,
                                    double horizon, const StudyOptions& opts = {});

}  // namespace mshj
