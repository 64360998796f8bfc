#pragma once

#include <Eigen/Dense>

#include <vector>

#include "mshj/errors.hpp"
#include "mshj/scales.hpp"

namespace mshj {

/// One sinusoidal term of a potential: amplitude * sin(2*pi*k*y/T + phase)
/// acting on axis `axis` of scale factor `scale`.
struct TrigComponent {
  int scale = 0;      // n, 0-based
  int axis = 0;       // i, 0-based
  int frequency = 1;  // integer k >= 1
  double amplitude = 0.0;
  double phase = 0.0;
};

/// Potentials come in three shapes: exactly 1-periodic trig sums on the
/// product torus, quasi-periodic sums of N periodic components with periods
/// T^n_i, and compact deformations of a constant (bounded, equal to the
/// constant outside |y| <= R_V, e.g. V(y) = min(|y|, 1)).
class PotentialSpec {
 public:
  enum class Kind { TorusTrig, QuasiPeriodic, CompactDeformation };

  static PotentialSpec torus_trig(int dim, int num_scales, double constant,
                                  std::vector<TrigComponent> components);

  /// periods[n][i] = T^n_i; component frequencies are relative to these.
  static PotentialSpec quasi_periodic(int dim, int num_scales, double constant,
                                      std::vector<TrigComponent> components,
                                      std::vector<std::vector<ScaleRatio>> periods);

  /// V(y) = constant + min(plateau * |y| / r_v, plateau); r_v = 0 gives the
  /// constant potential.
  static PotentialSpec compact_deformation(int dim, double constant, double plateau,
                                           double r_v);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  int num_scales() const { return num_scales_; }
  double constant() const { return constant_; }
  double plateau() const { return plateau_; }
  double r_v() const { return r_v_; }
  const std::vector<TrigComponent>& components() const { return components_; }
  const std::vector<std::vector<ScaleRatio>>& periods() const { return periods_; }
  double period_value(int scale, int axis) const { return periods_[scale][axis].value(); }

  /// Value on the product torus at stacked coordinates ys (length d*N,
  /// block n holding y^n).  TorusTrig only.
  double eval_torus(const Eigen::VectorXd& ys) const;

  /// Value at a physical point y (length d).  QuasiPeriodic and
  /// CompactDeformation only.
  double eval_physical(const Eigen::VectorXd& y) const;

  /// Crude but safe bounds from the coefficient lists.
  double upper_bound() const;
  double lower_bound() const;
  double sup_abs() const;

 private:
  PotentialSpec() = default;
  Kind kind_ = Kind::TorusTrig;
  int dim_ = 1;
  int num_scales_ = 1;
  double constant_ = 0.0;
  double plateau_ = 0.0;
  double r_v_ = 0.0;
  std::vector<TrigComponent> components_;
  std::vector<std::vector<ScaleRatio>> periods_;
};

}  // namespace mshj
