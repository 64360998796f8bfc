#include "mshj/potential.hpp"

#include <cmath>

namespace mshj {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_components(int dim, int num_scales,
                      const std::vector<TrigComponent>& comps) {
  for (const auto& c : comps) {
    if (c.scale < 0 || c.scale >= num_scales)
      throw InvalidInput("potential component: scale index out of range");
    if (c.axis < 0 || c.axis >= dim)
      throw InvalidInput("potential component: axis index out of range");
    if (c.frequency < 1)
      throw InvalidInput("potential component: frequency must be a positive integer");
    if (!std::isfinite(c.amplitude) || !std::isfinite(c.phase))
      throw InvalidInput("potential component: amplitude/phase must be finite");
  }
}
}  // namespace

PotentialSpec PotentialSpec::torus_trig(int dim, int num_scales, double constant,
                                        std::vector<TrigComponent> components) {
  if (dim < 1 || num_scales < 1) throw InvalidInput("potential: d, N must be positive");
  check_components(dim, num_scales, components);
  PotentialSpec spec;
  spec.kind_ = Kind::TorusTrig;
  spec.dim_ = dim;
  spec.num_scales_ = num_scales;
  spec.constant_ = constant;
  spec.components_ = std::move(components);
  return spec;
}

PotentialSpec PotentialSpec::quasi_periodic(
    int dim, int num_scales, double constant, std::vector<TrigComponent> components,
    std::vector<std::vector<ScaleRatio>> periods) {
  if (dim < 1 || num_scales < 1) throw InvalidInput("potential: d, N must be positive");
  check_components(dim, num_scales, components);
  if (static_cast<int>(periods.size()) != num_scales)
    throw InvalidInput("potential: periods must have N rows");
  for (const auto& row : periods) {
    if (static_cast<int>(row.size()) != dim)
      throw InvalidInput("potential: period rows must have d entries");
    for (const auto& t : row)
      if (!(t.value() > 0)) throw InvalidInput("potential: periods must be positive");
  }
  PotentialSpec spec;
  spec.kind_ = Kind::QuasiPeriodic;
  spec.dim_ = dim;
  spec.num_scales_ = num_scales;
  spec.constant_ = constant;
  spec.components_ = std::move(components);
  spec.periods_ = std::move(periods);
  return spec;
}

PotentialSpec PotentialSpec::compact_deformation(int dim, double constant,
                                                 double plateau, double r_v) {
  if (dim < 1) throw InvalidInput("potential: d must be positive");
  if (r_v < 0) throw InvalidInput("potential: R_V must be >= 0");
  if (!std::isfinite(plateau)) throw InvalidInput("potential: plateau must be finite");
  PotentialSpec spec;
  spec.kind_ = Kind::CompactDeformation;
  spec.dim_ = dim;
  spec.num_scales_ = 1;
  spec.constant_ = constant;
  spec.plateau_ = plateau;
  spec.r_v_ = r_v;
  return spec;
}

double PotentialSpec::eval_torus(const Eigen::VectorXd& ys) const {
  if (kind_ != Kind::TorusTrig)
    throw InvalidInput("potential: eval_torus requires a torus-periodic spec");
  if (ys.size() != static_cast<Eigen::Index>(dim_) * num_scales_)
    throw InvalidInput("potential: ys must have length d*N");
  double v = constant_;
  for (const auto& c : components_)
    v += c.amplitude * std::sin(kTwoPi * c.frequency * ys[c.scale * dim_ + c.axis] + c.phase);
  return v;
}

double PotentialSpec::eval_physical(const Eigen::VectorXd& y) const {
  if (y.size() != dim_) throw InvalidInput("potential: y must have length d");
  switch (kind_) {
    case Kind::QuasiPeriodic: {
      double v = constant_;
      for (const auto& c : components_) {
        const double t = periods_[c.scale][c.axis].value();
        v += c.amplitude * std::sin(kTwoPi * c.frequency * y[c.axis] / t + c.phase);
      }
      return v;
    }
    case Kind::CompactDeformation: {
      if (r_v_ == 0.0) return constant_ + plateau_;
      const double r = y.norm();
      return constant_ + std::min(plateau_ * r / r_v_, plateau_);
    }
    case Kind::TorusTrig:
      throw InvalidInput("potential: torus-periodic spec has no physical-space value");
  }
  return 0.0;
}

double PotentialSpec::upper_bound() const {
  double v = constant_;
  for (const auto& c : components_) v += std::abs(c.amplitude);
  if (kind_ == Kind::CompactDeformation) v += std::max(plateau_, 0.0);
  return v;
}

double PotentialSpec::lower_bound() const {
  double v = constant_;
  for (const auto& c : components_) v -= std::abs(c.amplitude);
  if (kind_ == Kind::CompactDeformation) v += std::min(plateau_, 0.0);
  return v;
}

double PotentialSpec::sup_abs() const {
  return std::max(std::abs(upper_bound()), std::abs(lower_bound()));
}

}  // namespace mshj
