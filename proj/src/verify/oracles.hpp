#pragma once

#include <Eigen/Dense>

#include <functional>

namespace mshj::oracles {

/// Independent reference values used by the verification suite.  Everything
/// here is quadrature/enumeration on closed formulas -- no shared code with
/// the grid solvers.

/// min and mean of a 1-periodic scalar potential by dense sampling.
double periodic_min(const std::function<double(double)>& v, int samples = 200001);
double periodic_mean(const std::function<double(double)>& v, int samples = 200001);

/// Effective Hamiltonian of H = |q| - V(y) in 1D:
///   max(-min V, |p| - mean V).
double effective_eikonal_1d(const std::function<double(double)>& v, double p,
                            int samples = 200001);

/// Effective Hamiltonian of H = |q|^2 - V(y) in 1D: the root c of
///   integral sqrt(c + V(y)) dy = |p|,
/// clamped at the flat value -min V.
double effective_quadratic_1d(const std::function<double(double)>& v, double p,
                              int samples = 200001);

/// Hopf-Lax value for u_t + |Du| = 0: min of u0 over the ball |z - x| <= t,
/// evaluated by direct minimization over a sampled grid.
double hopf_lax_min(const std::function<double(const Eigen::VectorXd&)>& u0,
                    const Eigen::VectorXd& x, double t, double lo, double hi,
                    int samples_per_axis);

}  // namespace mshj::oracles
