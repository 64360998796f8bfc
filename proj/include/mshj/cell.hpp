#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "mshj/hamiltonian.hpp"
#include "mshj/scales.hpp"
#include "mshj/torus_grid.hpp"

namespace mshj {

/// Discounted ergodic cell problem, frozen (x, p):
///   lambda w + H(x, y^1..y^N, p + sum_n Gamma^n grad_{y^n} w) = 0 on T^{d x N}.
struct CellProblem {
  Hamiltonian ham;
  Eigen::VectorXd x;
  Eigen::VectorXd p;
  ScaleSystem scales = ScaleSystem::identity(1);
  double lambda = 1.0;
};

struct CellSolution {
  Eigen::ArrayXd w;
  double lambda = 0.0;
  double residual = 0.0;
  double lam_w_mean = 0.0;
  double lam_w_osc = 0.0;  // flatness: osc(lambda * w) over the grid
  int iterations = 0;
};

struct CellSolveOptions {
  double tol = 1e-6;
  int max_iter = 2'000'000;
  /// Exact elimination of the constant residual mode each sweep.  The plain
  /// mode (false) is the provably monotone fixed-point map used by the
  /// scheme-property tests.
  bool accelerate = true;
  double cfl_safety = 0.9;
  double sigma_safety = 1.2;
  /// Extra momentum-box margin beyond |p| for the dissipation estimate;
  /// negative selects a coercivity-based default.
  double q_margin = -1.0;
  /// Optional externally fixed dissipation parameters.
  std::optional<NumericalHamiltonianParams> params;
  /// Optional warm start (defaults to w = 0).
  std::optional<Eigen::ArrayXd> warm_start;
  /// Sweep interval for the p-box validity check.
  int check_every = 16;
};

CellSolution solve_cell(const CellProblem& problem, const TorusGrid& grid,
                        const CellSolveOptions& opts = {});

/// One plain Jacobi sweep of the frozen iteration map (exposed for the
/// discrete-comparison and contraction property tests).
Eigen::ArrayXd cell_sweep(const CellProblem& problem, const TorusGrid& grid,
                          const Eigen::ArrayXd& w,
                          const CellSolveOptions& opts = {});
/// Residual field lambda w + H_num(w) of the discrete problem.
Eigen::ArrayXd cell_residual(const CellProblem& problem, const TorusGrid& grid,
                             const Eigen::ArrayXd& w,
                             const CellSolveOptions& opts = {});
/// Pseudo-time step the solver would use (CFL bound).
double cell_tau(const CellProblem& problem, const TorusGrid& grid,
                const CellSolveOptions& opts = {});

/// lambda_0 * factor^k halving schedule, ending exactly at lambda_min.
std::vector<double> lambda_schedule(double lambda0 = 1.0, double factor = 0.5,
                                    double lambda_min = 1e-3);

struct EffectiveValue {
  double hbar = 0.0;      // -mean(lambda_min * w)
  double flatness = 0.0;  // osc(lambda_min * w), the ergodicity certificate
  CellSolution solution;  // at lambda_min
  std::vector<double> schedule;
};

/// lambda-continuation with warm starts along `schedule` (strictly
/// decreasing); reads the effective value off the last stage.
EffectiveValue effective_value(const Hamiltonian& ham, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& p, const ScaleSystem& scales,
                               const TorusGrid& grid,
                               const std::vector<double>& schedule,
                               const CellSolveOptions& opts = {});

/// Diagonal restriction v(y1) = w(G^1 y1, ..., G^N y1) with the residual of
/// the approximated cell problem measured by finite differences along y1.
struct CorrectorSample {
  Eigen::MatrixXd points;   // samples x d
  Eigen::VectorXd values;   // v at the samples
  double residual_mean = 0.0;
  double residual_p95 = 0.0;
  double residual_max = 0.0;
  double delta = 0.0;  // achieved delta (95th percentile residual)
};

CorrectorSample restrict_diagonal(const CellSolution& sol, const TorusGrid& grid,
                                  const CellProblem& problem, double box_radius,
                                  int num_samples, double fd_step = -1.0);

/// Truncated-box solve of the unbounded cell problem
///   lambda v + F(x, y, p + grad v) = 0 on [-R, R]^d
/// with one-sided upwind closure at the boundary and v(0) = 0 normalization.
struct BoxCellSolution {
  double radius = 0.0;
  double spacing = 0.0;
  Eigen::ArrayXd v;  // normalized, v(center) = 0
  double lambda = 0.0;
  double effective_value = 0.0;  // -lambda v averaged over the readout region
  double readout_inner = 0.0;    // |y| window of the readout region
  double readout_outer = 0.0;
  Eigen::VectorXd shell_radii;
  Eigen::VectorXd shell_slopes;  // max |v(y)-v(0)|/|y| per shell
  double residual = 0.0;
  int iterations = 0;
};

enum class BoxReadout {
  /// Mean of -lambda v over a central window; for potentials that keep
  /// oscillating at infinity (quasi-periodic).
  CentralWindow,
  /// Mean of -lambda v over a far annulus lambda*|y| >> 1, outside the
  /// influence horizon of a compact deformation (class B1).
  FarShell,
  /// Pick by potential kind.
  Auto,
};

struct BoxSolveOptions {
  double tol = 1e-5;
  int max_iter = 2'000'000;
  double cfl_safety = 0.9;
  double sigma_safety = 1.2;
  double q_margin = -1.0;
  BoxReadout readout = BoxReadout::Auto;
  int shells = 10;
  std::optional<Eigen::ArrayXd> warm_start;
};

BoxCellSolution solve_cell_unbounded(const ClosedFormSpec& spec,
                                     const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& p, double lambda,
                                     double radius, int cells_per_unit,
                                     const BoxSolveOptions& opts = {});

/// Computes the effective value twice -- through the lifted torus problem and
/// through the truncated box (with lambda-pair extrapolation) -- and reports
/// the difference against both schemes' error estimates.
struct ConsistencyReport {
  double torus_value = 0.0;
  double torus_flatness = 0.0;
  double box_value = 0.0;
  double difference = 0.0;
  double torus_error_estimate = 0.0;
  double box_error_estimate = 0.0;
  bool resonant = false;  // Condition A status of the lifted scales
};

struct ConsistencyOptions {
  int torus_cells = 96;
  double lambda_min = 1e-3;
  double box_lambda = 0.08;  // extrapolated against box_lambda/2
  double box_radius = 150.0;
  int box_cells_per_unit = 48;
  double tol = 1e-5;
};

ConsistencyReport quasi_torus_consistency(const ClosedFormSpec& spec,
                                          const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& p,
                                          const ConsistencyOptions& opts = {});

}  // namespace mshj
