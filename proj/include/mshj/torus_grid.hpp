#pragma once

#include <Eigen/Dense>

#include <vector>

#include "mshj/errors.hpp"

namespace mshj {

/// Uniform periodic grid on the product torus T^{d x N}.  Axes are stacked
/// scale-major: axis a = n*d + i holds y^n_i.  Points are flattened row-major
/// with the last axis fastest.
class TorusGrid {
 public:
  TorusGrid(int dim, int num_scales, std::vector<int> cells);
  static TorusGrid uniform(int dim, int num_scales, int cells);

  int dim() const { return dim_; }
  int num_scales() const { return num_scales_; }
  int axes() const { return static_cast<int>(cells_.size()); }
  long points() const { return points_; }
  int cells(int axis) const { return cells_[axis]; }
  double spacing(int axis) const { return 1.0 / cells_[axis]; }

  /// Flat indices of the +1 / -1 neighbors along `axis` (periodic wrap).
  const Eigen::ArrayXi& shift_plus(int axis) const { return shift_plus_[axis]; }
  const Eigen::ArrayXi& shift_minus(int axis) const { return shift_minus_[axis]; }

  /// Coordinate along `axis` of every grid point (value in [0,1)).
  const Eigen::ArrayXd& coordinate(int axis) const { return coords_[axis]; }

  /// Multilinear periodic interpolation of a grid function at ys in R^{d*N}
  /// (coordinates wrapped into [0,1)).
  double interpolate(const Eigen::ArrayXd& w, const Eigen::VectorXd& ys) const;

  Eigen::VectorXd point(long flat) const;

 private:
  int dim_;
  int num_scales_;
  std::vector<int> cells_;
  std::vector<long> strides_;
  long points_;
  std::vector<Eigen::ArrayXi> shift_plus_;
  std::vector<Eigen::ArrayXi> shift_minus_;
  std::vector<Eigen::ArrayXd> coords_;
};

}  // namespace mshj
