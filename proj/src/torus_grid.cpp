#include "mshj/torus_grid.hpp"

#include <cmath>

namespace mshj {

TorusGrid::TorusGrid(int dim, int num_scales, std::vector<int> cells)
    : dim_(dim), num_scales_(num_scales), cells_(std::move(cells)) {
  if (dim_ < 1 || num_scales_ < 1)
    throw InvalidInput("torus grid: d, N must be positive");
  if (static_cast<int>(cells_.size()) != dim_ * num_scales_)
    throw InvalidInput("torus grid: need one cell count per axis (d*N)");
  for (int m : cells_)
    if (m < 8) throw InvalidInput("torus grid: every axis needs at least 8 cells");

  const int D = axes();
  strides_.assign(D, 1);
  for (int a = D - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * cells_[a + 1];
  points_ = strides_[0] * cells_[0];

  shift_plus_.resize(D);
  shift_minus_.resize(D);
  coords_.resize(D);
  for (int a = 0; a < D; ++a) {
    shift_plus_[a].resize(points_);
    shift_minus_[a].resize(points_);
    coords_[a].resize(points_);
  }
  std::vector<int> idx(D, 0);
  for (long f = 0; f < points_; ++f) {
    for (int a = 0; a < D; ++a) {
      const long stride = strides_[a];
      const int m = cells_[a];
      const int j = idx[a];
      shift_plus_[a][f] = static_cast<int>(f + (j + 1 == m ? stride * (1 - m) : stride));
      shift_minus_[a][f] = static_cast<int>(f - (j == 0 ? stride * (1 - m) : stride));
      coords_[a][f] = static_cast<double>(j) / m;
    }
    int a = D - 1;
    while (a >= 0 && ++idx[a] == cells_[a]) idx[a--] = 0;
  }
}

TorusGrid TorusGrid::uniform(int dim, int num_scales, int cells) {
  return TorusGrid(dim, num_scales, std::vector<int>(dim * num_scales, cells));
}

Eigen::VectorXd TorusGrid::point(long flat) const {
  const int D = axes();
  Eigen::VectorXd y(D);
  for (int a = 0; a < D; ++a) y[a] = coords_[a][flat];
  return y;
}

double TorusGrid::interpolate(const Eigen::ArrayXd& w, const Eigen::VectorXd& ys) const {
  const int D = axes();
  if (ys.size() != D) throw InvalidInput("torus interpolation: wrong point dimension");
  std::vector<int> base(D);
  std::vector<double> frac(D);
  for (int a = 0; a < D; ++a) {
    double v = std::fmod(ys[a], 1.0);
    if (v < 0) v += 1.0;
    const double s = v * cells_[a];
    int j = static_cast<int>(s);
    if (j >= cells_[a]) j = cells_[a] - 1;
    base[a] = j;
    frac[a] = s - j;
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << D); ++corner) {
    double weight = 1.0;
    long flat = 0;
    for (int a = 0; a < D; ++a) {
      const bool up = (corner >> a) & 1;
      weight *= up ? frac[a] : 1.0 - frac[a];
      int j = base[a] + (up ? 1 : 0);
      if (j == cells_[a]) j = 0;
      flat += strides_[a] * j;
    }
    acc += weight * w[flat];
  }
  return acc;
}

}  // namespace mshj
