#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "mshj/cell.hpp"

namespace mshj {

/// Momentum lattice specification: box [lo, hi] with `counts` nodes per axis.
struct MomentumGrid {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  std::vector<int> counts;

  static MomentumGrid symmetric(int dim, double radius, int nodes_per_axis);
  int dim() const { return static_cast<int>(counts.size()); }
  long points() const;
  Eigen::VectorXd node(long flat) const;
  double step(int axis) const { return (hi[axis] - lo[axis]) / (counts[axis] - 1); }
};

/// Sampled effective Hamiltonian over a momentum lattice, with per-entry
/// flatness diagnostics and build provenance.
struct EffectiveTable {
  Eigen::VectorXd x;
  MomentumGrid grid;
  Eigen::ArrayXd values;
  Eigen::ArrayXd flatness;
  std::vector<std::uint8_t> failed;  // per-entry failure mask
  // provenance
  std::vector<double> schedule;
  std::vector<int> torus_cells;
  double tol = 0.0;

  bool any_failed() const;
};

/// Runs effective_value per lattice node, warm-starting along momentum lines.
EffectiveTable build_table(const Hamiltonian& ham, const Eigen::VectorXd& x,
                           const ScaleSystem& scales, const MomentumGrid& p_grid,
                           const std::vector<double>& schedule, const TorusGrid& grid,
                           const CellSolveOptions& opts = {});

/// Multilinear interpolation; exact at table nodes; throws OutOfValidity
/// outside the box.
double interpolate(const EffectiveTable& table, const Eigen::VectorXd& p);

struct ConvexityViolation {
  long node_a = 0;
  long node_b = 0;
  double margin = 0.0;  // H((pa+pb)/2) - (H(pa)+H(pb))/2 beyond tolerance
};

struct PropertyReport {
  double lipschitz_estimate = 0.0;
  std::vector<ConvexityViolation> convexity_violations;
  double coercivity_fit = 0.0;
  bool pass(double theta, double theta_tol) const;
};

/// Midpoint convexity over all axis-aligned node pairs with on-grid
/// midpoints, adjacent-node Lipschitz estimate, and an offset-robust dyadic
/// growth-exponent fit for the coercivity power.
PropertyReport check_properties(const EffectiveTable& table, double tol);

struct B0LimitResult {
  EffectiveTable table;  // last table of the sequence
  std::vector<double> cauchy_gaps;  // sup |F^{k+1} - F^k| per step
};

/// Builds the effective tables of an approximating sequence of quasi-periodic
/// Hamiltonians and reports the successive sup-norm gaps.
B0LimitResult b0_limit_table(const std::vector<Hamiltonian>& specs,
                             const std::vector<ScaleSystem>& scales,
                             const Eigen::VectorXd& x, const MomentumGrid& p_grid,
                             const std::vector<double>& schedule,
                             const TorusGrid& grid,
                             const CellSolveOptions& opts = {});

}  // namespace mshj
