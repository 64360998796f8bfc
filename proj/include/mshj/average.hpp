#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "mshj/cell.hpp"
#include "mshj/hamiltonian.hpp"
#include "mshj/scales.hpp"

namespace mshj {

/// One simulated trajectory of the embedded fast system
/// dY/dt = (Gamma^1 b, ..., Gamma^N b) with its discounted payoff
/// lambda \int e^{-lambda t} (g + <b,p>) dt.
struct TrajectoryRun {
  double dt = 0.0;
  double horizon = 0.0;
  Eigen::MatrixXd states;          // decimated samples x (d*N)
  std::vector<int> control_sequence;  // decimated control indices
  double discounted_payoff = 0.0;
  double running_average = 0.0;  // (1/T) \int (g + <b,p>) dt at the horizon
};

enum class PolicySource { ConstantControls, GreedyFromCell };

/// Simulates the constant policy alpha = controls[alpha_index].
TrajectoryRun run_constant_policy(const ControlHamiltonianSpec& spec,
                                  const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                                  const Eigen::VectorXd& y0, const ScaleSystem& scales,
                                  double lambda, int alpha_index, double dt, double T);

/// Follows at each step the maximizing control of the cell Hamiltonian with
/// q = p + sum_n Gamma^n grad_{y^n} w interpolated from the cell solution.
TrajectoryRun run_greedy_policy(const ControlHamiltonianSpec& spec,
                                const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                                const Eigen::VectorXd& y0, const ScaleSystem& scales,
                                double lambda, double dt, double T,
                                const CellSolution& cell, const TorusGrid& grid);

/// Minimum discounted payoff over the policy class.  Upper bound on the true
/// infimum (Eq-18-style control representation); requires lambda*T >= 5.
double discounted_value(const ControlHamiltonianSpec& spec, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& p, const Eigen::VectorXd& y0,
                        const ScaleSystem& scales, double lambda,
                        PolicySource policy, double dt, double T,
                        const CellSolution* cell = nullptr,
                        const TorusGrid* grid = nullptr);

/// (1/T) \int_0^T V(y0 + t z) dt by composite midpoint quadrature.
double ray_average(const PotentialSpec& potential, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y0, const Eigen::VectorXd& z, double T,
                   double dt);

struct RayAverageReport {
  Eigen::VectorXd per_sample;   // ray average per (y0, z) at the largest T
  double c_estimate = 0.0;      // mean of the sample
  double max_deviation = 0.0;   // sup |per_sample - c_estimate|
  double c_xp = 0.0;            // candidate c(x,p) = max_a (c + <p,a>), |a| = 1
  double margin = 0.0;          // worst Eq-(28)-style slack, <= 0 when satisfied
  std::vector<double> horizons;
};

/// Estimates the direction-uniform ray average c(x,alpha) over a sample of
/// rays, at an increasing horizon schedule; the margin uses the <p,alpha>
/// reading of the class-B1 inequality.
RayAverageReport b1_certificate(const PotentialSpec& potential,
                                const Eigen::VectorXd& x,
                                const std::vector<Eigen::VectorXd>& starts,
                                const std::vector<Eigen::VectorXd>& directions,
                                const std::vector<double>& horizons, double dt,
                                const Eigen::VectorXd& p);

}  // namespace mshj
