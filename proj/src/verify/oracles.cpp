#include "verify/oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mshj::oracles {

double periodic_min(const std::function<double(double)>& v, int samples) {
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) m = std::min(m, v(double(k) / samples));
  return m;
}

double periodic_mean(const std::function<double(double)>& v, int samples) {
  double acc = 0.0;
  for (int k = 0; k < samples; ++k) acc += v((k + 0.5) / samples);
  return acc / samples;
}

double effective_eikonal_1d(const std::function<double(double)>& v, double p,
                            int samples) {
  return std::max(-periodic_min(v, samples), std::abs(p) - periodic_mean(v, samples));
}

double effective_quadratic_1d(const std::function<double(double)>& v, double p,
                              int samples) {
  const double vmin = periodic_min(v, samples);
  const auto momentum = [&](double c) {
    // integral of sqrt(c + V) over one period, composite midpoint
    double acc = 0.0;
    for (int k = 0; k < samples; ++k)
      acc += std::sqrt(std::max(0.0, c + v((k + 0.5) / samples)));
    return acc / samples;
  };
  const double flat_reach = momentum(-vmin);
  if (std::abs(p) <= flat_reach) return -vmin;
  double lo = -vmin;
  double hi = p * p + std::abs(vmin) + 1.0;
  while (momentum(hi) < std::abs(p)) hi = 2.0 * hi + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (momentum(mid) < std::abs(p) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double hopf_lax_min(const std::function<double(const Eigen::VectorXd&)>& u0,
                    const Eigen::VectorXd& x, double t, double lo, double hi,
                    int samples_per_axis) {
  const int d = static_cast<int>(x.size());
  if (d != 1) throw std::invalid_argument("hopf_lax_min: sampled oracle is 1D");
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= samples_per_axis; ++k) {
    Eigen::VectorXd z(1);
    z[0] = lo + (hi - lo) * k / samples_per_axis;
    if (std::abs(z[0] - x[0]) <= t + 1e-12) best = std::min(best, u0(z));
  }
  return best;
}

}  // namespace mshj::oracles
