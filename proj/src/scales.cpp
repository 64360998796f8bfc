#include "mshj/scales.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mshj {

ScaleRatio ScaleRatio::rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InvalidInput("scale ratio: zero denominator");
  if (num == 0) throw InvalidInput("scale ratio: gamma must be nonzero");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  ScaleRatio r;
  r.exact_ = true;
  r.num_ = num / g;
  r.den_ = den / g;
  r.value_ = static_cast<double>(r.num_) / static_cast<double>(r.den_);
  return r;
}

ScaleRatio ScaleRatio::irrational(double value) {
  if (!std::isfinite(value) || value == 0.0)
    throw InvalidInput("scale ratio: gamma must be finite and nonzero");
  ScaleRatio r;
  r.exact_ = false;
  r.value_ = value;
  return r;
}

ScaleRatio ScaleRatio::parse(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const std::int64_t num = std::stoll(text.substr(0, slash));
    const std::int64_t den = std::stoll(text.substr(slash + 1));
    return rational(num, den);
  }
  return irrational(std::stod(text));
}

std::string ScaleRatio::str() const {
  if (exact_) return std::to_string(num_) + "/" + std::to_string(den_);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value_);
  return buf;
}

ScaleSystem::ScaleSystem(int dim, int num_scales,
                         std::vector<std::vector<ScaleRatio>> gamma)
    : dim_(dim), num_scales_(num_scales), gamma_(std::move(gamma)) {
  if (dim_ < 1 || num_scales_ < 1)
    throw InvalidInput("scale system: d and N must be positive");
  if (static_cast<int>(gamma_.size()) != num_scales_)
    throw InvalidInput("scale system: gamma must have N rows");
  for (const auto& row : gamma_)
    if (static_cast<int>(row.size()) != dim_)
      throw InvalidInput("scale system: gamma rows must have d entries");
  for (int i = 0; i < dim_; ++i) {
    const ScaleRatio& g = gamma_[0][i];
    if (!g.exact() || g.num() != 1 || g.den() != 1)
      throw InvalidInput("scale system: gamma^1_i must equal 1 (normalization)");
  }
  values_.resize(num_scales_, dim_);
  for (int n = 0; n < num_scales_; ++n)
    for (int i = 0; i < dim_; ++i) values_(n, i) = gamma_[n][i].value();
}

ScaleSystem ScaleSystem::identity(int dim) {
  std::vector<std::vector<ScaleRatio>> g(1, std::vector<ScaleRatio>(dim, ScaleRatio::one()));
  return ScaleSystem(dim, 1, std::move(g));
}

namespace {

// Spiral coordinate sequence 0, 1, -1, 2, -2, ... up to |z| <= B.
inline std::int64_t spiral_value(std::int64_t step) {
  return (step % 2 == 1) ? (step + 1) / 2 : -(step / 2);
}

// Searches nonzero tuples (z^2..z^N), small max-norm first, for a relation
// sum gamma_n z_n within tol of an integer.  Only tuples whose first nonzero
// coordinate is positive are visited (a relation and its negation carry the
// same information).
std::optional<ResonanceWitness> search_relations(const std::vector<double>& gammas,
                                                 std::int64_t bound, double tol,
                                                 std::int64_t& budget) {
  const int k = static_cast<int>(gammas.size());
  std::vector<std::int64_t> steps(k, 0);  // spiral step per coordinate
  std::vector<std::int64_t> z(k, 0);
  // Odometer over spiral steps; step range per coordinate is [0, 2B].
  const std::int64_t steps_per_coord = 2 * bound;
  while (true) {
    // advance odometer
    int pos = k - 1;
    while (pos >= 0) {
      if (steps[pos] < steps_per_coord) {
        ++steps[pos];
        break;
      }
      steps[pos] = 0;
      --pos;
    }
    if (pos < 0) return std::nullopt;  // exhausted
    for (int j = 0; j < k; ++j) z[j] = spiral_value(steps[j]);

    // canonical representative: first nonzero coordinate positive
    int first = 0;
    while (first < k && z[first] == 0) ++first;
    if (first == k) continue;           // all-zero tuple
    if (z[first] < 0) continue;         // mirror image

    if (--budget < 0)
      throw BudgetExceeded("condition A search: tuple budget exhausted");

    double s = 0.0;
    for (int j = 0; j < k; ++j) s += gammas[j] * static_cast<double>(z[j]);
    const double m = std::round(s);
    if (std::abs(s - m) <= tol) {
      ResonanceWitness w;
      w.z.resize(k);
      for (int j = 0; j < k; ++j) w.z[j] = static_cast<int>(z[j]);
      w.m = static_cast<std::int64_t>(m);
      return w;
    }
  }
}

}  // namespace

ResonanceReport check_condition_a(const ScaleSystem& scales, std::int64_t bound,
                                  double tol, std::int64_t tuple_budget) {
  if (bound < 1) throw InvalidInput("condition A: bound must be >= 1");
  if (tol < 0) throw InvalidInput("condition A: tol must be >= 0");

  const int d = scales.dim();
  const int N = scales.num_scales();
  bool all_exact = true;
  for (int n = 1; n < N; ++n)
    for (int i = 0; i < d; ++i)
      if (!scales.gamma(n, i).exact()) all_exact = false;
  if (tol == 0.0 && !all_exact)
    throw InvalidInput("condition A: tol = 0 requires all ratios exact rational");

  ResonanceReport report;
  report.search_bound = bound;
  report.tol = tol;
  report.interpretation_note =
      "trivial family (z^1 arbitrary, z^n = 0 for n >= 2) excluded; operative "
      "condition is rational independence of {1} and {gamma^n_i : n >= 2} per axis";
  report.axes.resize(d);

  std::int64_t budget = tuple_budget;
  for (int i = 0; i < d; ++i) {
    AxisResonance& axis = report.axes[i];
    if (N == 1) {
      axis.resonant = false;
      axis.decided_exactly = true;
      continue;
    }
    // Any exact rational entry yields the relation gamma * den = num.
    bool handled = false;
    for (int n = 1; n < N && !handled; ++n) {
      const ScaleRatio& g = scales.gamma(n, i);
      if (g.exact()) {
        ResonanceWitness w;
        w.z = Eigen::VectorXi::Zero(N - 1);
        w.z[n - 1] = static_cast<int>(g.den());
        w.m = g.num();
        axis.resonant = true;
        axis.decided_exactly = true;
        axis.witness = w;
        handled = true;
      }
    }
    if (handled) continue;

    std::vector<double> gammas(N - 1);
    for (int n = 1; n < N; ++n) gammas[n - 1] = scales.gamma(n, i).value();
    std::optional<ResonanceWitness> w;
    try {
      w = search_relations(gammas, bound, tol, budget);
    } catch (const BudgetExceeded&) {
      throw BudgetExceeded("condition A: budget exhausted on axis " +
                           std::to_string(i + 1) + " of " + std::to_string(d));
    }
    axis.decided_exactly = false;
    axis.resonant = w.has_value();
    axis.witness = w;
  }
  return report;
}

OrbitStats orbit_gap(const Eigen::VectorXd& omega, int iterations) {
  if (iterations < 2) throw InvalidInput("orbit_gap: need at least 2 iterations");
  const int M = static_cast<int>(omega.size());
  if (M < 1) throw InvalidInput("orbit_gap: omega must be nonempty");

  OrbitStats stats;
  stats.iterations = iterations;

  if (M == 1) {
    std::vector<double> pts(iterations);
    const double w = omega[0];
    for (int k = 0; k < iterations; ++k) {
      double v = std::fmod(k * w, 1.0);
      if (v < 0) v += 1.0;
      pts[k] = v;
    }
    std::sort(pts.begin(), pts.end());
    double max_gap = 1.0 - pts.back() + pts.front();  // circular wrap gap
    for (int k = 1; k < iterations; ++k)
      max_gap = std::max(max_gap, pts[k] - pts[k - 1]);
    stats.max_gap = max_gap;
    stats.covering_radius = max_gap / 2.0;
    return stats;
  }

  // Bucket occupancy on a grid of side ceil(K^(1/M)), then a multi-source
  // BFS (Chebyshev neighborhood, torus wrap) from occupied buckets.
  const int side = std::max(2, static_cast<int>(std::ceil(std::pow(double(iterations), 1.0 / M))));
  std::int64_t total = 1;
  for (int j = 0; j < M; ++j) total *= side;
  std::vector<int> dist(static_cast<size_t>(total), -1);
  std::vector<std::int64_t> queue;
  queue.reserve(static_cast<size_t>(total));

  std::vector<double> point(M, 0.0);
  for (int k = 0; k < iterations; ++k) {
    std::int64_t idx = 0;
    for (int j = 0; j < M; ++j) {
      double v = std::fmod(k * omega[j], 1.0);
      if (v < 0) v += 1.0;
      int c = std::min(side - 1, static_cast<int>(v * side));
      idx = idx * side + c;
    }
    if (dist[static_cast<size_t>(idx)] < 0) {
      dist[static_cast<size_t>(idx)] = 0;
      queue.push_back(idx);
    }
  }

  std::vector<int> coord(M), ncoord(M);
  size_t head = 0;
  int max_dist = 0;
  while (head < queue.size()) {
    const std::int64_t idx = queue[head++];
    std::int64_t rem = idx;
    for (int j = M - 1; j >= 0; --j) {
      coord[j] = static_cast<int>(rem % side);
      rem /= side;
    }
    const int dhere = dist[static_cast<size_t>(idx)];
    // Chebyshev neighbors: offsets in {-1,0,1}^M minus the origin.
    std::vector<int> off(M, -1);
    while (true) {
      bool origin = true;
      for (int j = 0; j < M; ++j)
        if (off[j] != 0) origin = false;
      if (!origin) {
        std::int64_t nidx = 0;
        for (int j = 0; j < M; ++j) {
          ncoord[j] = (coord[j] + off[j] + side) % side;
          nidx = nidx * side + ncoord[j];
        }
        if (dist[static_cast<size_t>(nidx)] < 0) {
          dist[static_cast<size_t>(nidx)] = dhere + 1;
          max_dist = std::max(max_dist, dhere + 1);
          queue.push_back(nidx);
        }
      }
      int j = M - 1;
      while (j >= 0 && off[j] == 1) {
        off[j] = -1;
        --j;
      }
      if (j < 0) break;
      ++off[j];
    }
  }

  const double cell = 1.0 / side;
  stats.max_gap = 0.0;
  stats.covering_radius = (max_dist + 0.5) * cell * std::sqrt(double(M));
  stats.covering_radius = std::min(stats.covering_radius, std::sqrt(double(M)) / 2.0);
  return stats;
}

Eigen::MatrixXd realize_epsilon(const ScaleSystem& scales, double eps1) {
  if (!(eps1 > 0)) throw InvalidInput("realize_epsilon: eps1 must be positive");
  return eps1 * scales.gamma_values().cwiseInverse();
}

}  // namespace mshj
