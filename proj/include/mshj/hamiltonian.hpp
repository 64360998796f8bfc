#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "mshj/errors.hpp"
#include "mshj/potential.hpp"
#include "mshj/scales.hpp"

namespace mshj {

/// Finite sampled control set.
class ControlSet {
 public:
  enum class Tag { Enumerated, UnitBallDirections, BoxGrid };

  ControlSet() = default;  // empty; populate through the factories

  static ControlSet enumerated(std::vector<Eigen::VectorXd> samples);
  /// {-1,+1} in 1D; `count` evenly spaced unit vectors in 2D.
  static ControlSet unit_ball_directions(int dim, int count);
  /// Uniform lattice on [-radius, radius]^dim with `per_axis` nodes per axis.
  static ControlSet box_grid(int dim, double radius, int per_axis);

  Tag tag() const { return tag_; }
  int dim() const { return dim_; }
  int size() const { return static_cast<int>(samples_.size()); }
  const std::vector<Eigen::VectorXd>& samples() const { return samples_; }
  const Eigen::VectorXd& operator[](int k) const { return samples_[k]; }
  double grid_step() const { return grid_step_; }  // BoxGrid only

 private:
  Tag tag_ = Tag::Enumerated;
  int dim_ = 0;
  double grid_step_ = 0.0;
  std::vector<Eigen::VectorXd> samples_;
};

/// Control-form Hamiltonian H = sup_a { -<b(x,ys,a),p> - g(x,ys,a) }.
/// `ys` is the stacked fast variable (length d*N, block n holds y^n).
struct ControlHamiltonianSpec {
  using DriftFn = std::function<Eigen::VectorXd(
      const Eigen::VectorXd& x, const Eigen::VectorXd& ys, const Eigen::VectorXd& a)>;
  using CostFn = std::function<double(
      const Eigen::VectorXd& x, const Eigen::VectorXd& ys, const Eigen::VectorXd& a)>;
  using LipschitzFn =
      std::function<double(const Eigen::VectorXd& x, const Eigen::VectorXd& a)>;

  int dim = 1;
  int num_scales = 1;
  DriftFn drift;
  CostFn cost;
  ControlSet controls;
  LipschitzFn lipschitz;  // optional
  double sup_drift = 0.0;
  double sup_cost = 0.0;
  /// When set, ys is a physical point in R^d rather than a stacked torus
  /// point in T^{d x N} (truncated-domain problems).
  bool physical_fast = false;
};

/// Closed-form families: a(x,ys)|p| - V (theta = 1) and a(x,ys)|p|^2 - V
/// (theta = 2).  a >= a0 > 0; a == null means a == 1.
struct ClosedFormSpec {
  using CoeffFn =
      std::function<double(const Eigen::VectorXd& x, const Eigen::VectorXd& ys)>;

  int dim = 1;
  int num_scales = 1;
  int theta = 1;  // coercivity exponent, 1 or 2
  PotentialSpec potential = PotentialSpec::torus_trig(1, 1, 0.0, {});
  CoeffFn coeff_a;   // null => constant 1
  double a0 = 1.0;   // uniform lower bound of a
  double a_sup = 1.0;

  double coeff(const Eigen::VectorXd& x, const Eigen::VectorXd& ys) const {
    return coeff_a ? coeff_a(x, ys) : 1.0;
  }
};

using Hamiltonian = std::variant<ClosedFormSpec, ControlHamiltonianSpec>;

int ham_dim(const Hamiltonian& ham);
int ham_num_scales(const Hamiltonian& ham);
/// Bound of |H(x,.,p)|: sup|g| + |p| sup|b| (control form) or the closed-form
/// analogue.
double ham_value_bound(const Hamiltonian& ham, const Eigen::VectorXd& p);

/// H(x, ys, p).  Ties in the control sup resolve to the first maximizer in
/// sample order.
double eval_hamiltonian(const Hamiltonian& ham, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& ys, const Eigen::VectorXd& p);
/// Index of the maximizing control (first maximizer).  Control form only.
int argmax_control(const ControlHamiltonianSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& ys, const Eigen::VectorXd& p);

/// Componentwise momentum box [lo, hi].
struct MomentumBox {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static MomentumBox cube(int dim, double radius);
  bool contains(const Eigen::VectorXd& p) const;
  double sup_norm2() const;  // largest |p|_2 over the box corners
};

struct ClosedToControlResult {
  ControlHamiltonianSpec spec;
  double error_bound = 0.0;  // sup over p_box of |closed - control| guarantee
};

/// Rewrites a closed-form Hamiltonian as a finite control sup whose value
/// agrees on p_box up to the returned discretization bound.
/// theta = 1: b = a*alpha over unit directions, g = V (exact in 1D).
/// theta = 2: b = alpha over a box grid of radius 2*a_sup*|p|_max,
///            g = |alpha|^2/(4a) + V.
ClosedToControlResult closed_to_control(const ClosedFormSpec& spec,
                                        const MomentumBox& p_box,
                                        int directions = 32, int grid_per_axis = 81);

/// Artificial-dissipation coefficients sigma_i >= sup |dH/dp_i| on p_box.
struct NumericalHamiltonianParams {
  Eigen::VectorXd sigma;
  MomentumBox p_box;
};

/// Estimates sigma by central-difference probing of dH/dp over sampled
/// (ys, p in p_box), then applies the safety factor.
NumericalHamiltonianParams estimate_dissipation(const Hamiltonian& ham,
                                                const Eigen::VectorXd& x,
                                                const MomentumBox& p_box,
                                                int y_samples = 64, int p_samples = 48,
                                                double safety = 1.2);

/// Lax-Friedrichs flux H(x,ys,(p_minus+p_plus)/2) - sum_i sigma_i
/// (p_plus_i - p_minus_i)/2; monotone for arguments inside p_box.
double lf_numerical_hamiltonian(const Hamiltonian& ham,
                                const NumericalHamiltonianParams& params,
                                const Eigen::VectorXd& x, const Eigen::VectorXd& ys,
                                const Eigen::VectorXd& p_minus,
                                const Eigen::VectorXd& p_plus);

struct LiftResult {
  ClosedFormSpec lifted;  // torus-periodic potential on T^{d x N}
  ScaleSystem scales;
};

/// Lifts a quasi-periodic closed-form Hamiltonian (periods T^n_i, T^1_i = 1)
/// to the product torus.  Gamma^n = diag(T^1_i / T^n_i) and each component is
/// rescaled to be exactly 1-periodic in its own factor, so that the diagonal
/// identity V'(x, G^1 y, ..., G^N y) = V(x, y) holds exactly.
LiftResult lift_quasi_periodic(const ClosedFormSpec& spec);

/// Samples torus periodicity and the Lipschitz bound (Eq-style contracts) on
/// a deterministic point set; throws InvalidInput on violation.
void spot_check_spec(const ControlHamiltonianSpec& spec, const Eigen::VectorXd& x,
                     int samples = 16);

}  // namespace mshj
