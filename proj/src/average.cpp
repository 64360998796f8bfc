#include "mshj/average.hpp"

#include <cmath>

namespace mshj {

namespace {

constexpr int kDecimate = 64;  // keep every 64th state in the run record

// Stacked embedded drift (Gamma^1 b, ..., Gamma^N b) at a torus point.
Eigen::VectorXd embedded_drift(const ControlHamiltonianSpec& spec,
                               const Eigen::VectorXd& x, const Eigen::VectorXd& ys,
                               const Eigen::MatrixXd& gamma,
                               const Eigen::VectorXd& alpha, Eigen::VectorXd& b_out) {
  b_out = spec.drift(x, ys, alpha);
  const int d = spec.dim;
  const int N = spec.num_scales;
  Eigen::VectorXd rate(d * N);
  for (int n = 0; n < N; ++n)
    for (int i = 0; i < d; ++i) rate[n * d + i] = gamma(n, i) * b_out[i];
  return rate;
}

void wrap_torus(Eigen::VectorXd& ys) {
  for (Eigen::Index a = 0; a < ys.size(); ++a) {
    ys[a] = std::fmod(ys[a], 1.0);
    if (ys[a] < 0) ys[a] += 1.0;
  }
}

template <class PickControl>
TrajectoryRun simulate(const ControlHamiltonianSpec& spec, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& p, const Eigen::VectorXd& y0,
                       const ScaleSystem& scales, double lambda, double dt, double T,
                       PickControl&& pick) {
  if (!(dt > 0) || !(T > 0)) throw InvalidInput("trajectory: dt, T must be positive");
  const double speed = std::max(1.0, spec.sup_drift * scales.gamma_values()
                                                          .cwiseAbs()
                                                          .maxCoeff());
  if (dt > 0.5 / speed)
    throw InvalidInput("trajectory: dt exceeds the stability bound for this drift");
  if (y0.size() != static_cast<Eigen::Index>(spec.dim) * spec.num_scales)
    throw InvalidInput("trajectory: y0 must live on the product torus");

  const long steps = static_cast<long>(std::ceil(T / dt));
  const Eigen::MatrixXd gamma = scales.gamma_values();

  TrajectoryRun run;
  run.dt = dt;
  run.horizon = steps * dt;
  const long keep = steps / kDecimate + 2;
  run.states.resize(keep, y0.size());
  run.control_sequence.reserve(keep);

  Eigen::VectorXd ys = y0;
  wrap_torus(ys);
  Eigen::VectorXd b(spec.dim);
  double payoff = 0.0;   // lambda \int e^{-lambda t} (g + <b,p>) dt
  double running = 0.0;  // \int (g + <b,p>) dt
  // exact per-step discount weight: lambda \int_{t_k}^{t_k+dt} e^{-lambda t}
  const double decay = std::exp(-lambda * dt);
  double weight = 1.0 - decay;  // at t_0 = 0
  long kept = 0;
  for (long k = 0; k < steps; ++k) {
    const int ci = pick(ys);
    const Eigen::VectorXd& alpha = spec.controls[ci];
    if (k % kDecimate == 0) {
      run.states.row(kept) = ys.transpose();
      run.control_sequence.push_back(ci);
      ++kept;
    }
    const Eigen::VectorXd rate = embedded_drift(spec, x, ys, gamma, alpha, b);
    const double instant = spec.cost(x, ys, alpha) + b.dot(p);
    payoff += weight * instant;
    weight *= decay;
    running += instant * dt;
    ys += dt * rate;
    wrap_torus(ys);
  }
  run.states.conservativeResize(kept, Eigen::NoChange);
  run.discounted_payoff = payoff;
  run.running_average = running / run.horizon;
  return run;
}

}  // namespace

TrajectoryRun run_constant_policy(const ControlHamiltonianSpec& spec,
                                  const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                                  const Eigen::VectorXd& y0, const ScaleSystem& scales,
                                  double lambda, int alpha_index, double dt, double T) {
  if (alpha_index < 0 || alpha_index >= spec.controls.size())
    throw InvalidInput("trajectory: control index out of range");
  return simulate(spec, x, p, y0, scales, lambda, dt, T,
                  [alpha_index](const Eigen::VectorXd&) { return alpha_index; });
}

TrajectoryRun run_greedy_policy(const ControlHamiltonianSpec& spec,
                                const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                                const Eigen::VectorXd& y0, const ScaleSystem& scales,
                                double lambda, double dt, double T,
                                const CellSolution& cell, const TorusGrid& grid) {
  const int d = spec.dim;
  const int N = spec.num_scales;
  const Eigen::MatrixXd gamma = scales.gamma_values();
  double hmin = 1.0;
  for (int a = 0; a < grid.axes(); ++a) hmin = std::min(hmin, grid.spacing(a));
  auto pick = [&, hmin](const Eigen::VectorXd& ys) {
    // q = p + sum_n Gamma^n grad_{y^n} w by interpolated central differences
    Eigen::VectorXd q = p;
    for (int n = 0; n < N; ++n) {
      for (int i = 0; i < d; ++i) {
        Eigen::VectorXd yp = ys, ym = ys;
        yp[n * d + i] += hmin;
        ym[n * d + i] -= hmin;
        const double der =
            (grid.interpolate(cell.w, yp) - grid.interpolate(cell.w, ym)) /
            (2.0 * hmin);
        q[i] += gamma(n, i) * der;
      }
    }
    return argmax_control(spec, x, ys, q);
  };
  return simulate(spec, x, p, y0, scales, lambda, dt, T, pick);
}

double discounted_value(const ControlHamiltonianSpec& spec, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& p, const Eigen::VectorXd& y0,
                        const ScaleSystem& scales, double lambda, PolicySource policy,
                        double dt, double T, const CellSolution* cell,
                        const TorusGrid* grid) {
  if (!(lambda * T >= 5.0))
    throw InvalidInput("discounted_value: need lambda*T >= 5 (discount tail)");
  if (policy == PolicySource::GreedyFromCell) {
    if (!cell || !grid)
      throw InvalidInput("discounted_value: greedy policy needs a cell solution");
    return run_greedy_policy(spec, x, p, y0, scales, lambda, dt, T, *cell, *grid)
        .discounted_payoff;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < spec.controls.size(); ++k) {
    const double val =
        run_constant_policy(spec, x, p, y0, scales, lambda, k, dt, T)
            .discounted_payoff;
    best = std::min(best, val);
  }
  return best;
}

double ray_average(const PotentialSpec& potential, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y0, const Eigen::VectorXd& z, double T,
                   double dt) {
  (void)x;
  if (!(T > 0) || !(dt > 0)) throw InvalidInput("ray_average: T, dt must be positive");
  if (std::abs(z.norm() - 1.0) > 1e-9)
    throw InvalidInput("ray_average: z must be a unit vector");
  const long M = std::max<long>(1, static_cast<long>(std::ceil(T / dt)));
  const double step = T / M;
  double acc = 0.0;
  for (long k = 0; k < M; ++k)
    acc += potential.eval_physical(y0 + ((k + 0.5) * step) * z);
  return acc / M;
}

RayAverageReport b1_certificate(const PotentialSpec& potential,
                                const Eigen::VectorXd& x,
                                const std::vector<Eigen::VectorXd>& starts,
                                const std::vector<Eigen::VectorXd>& directions,
                                const std::vector<double>& horizons, double dt,
                                const Eigen::VectorXd& p) {
  if (starts.empty() || directions.empty() || horizons.empty())
    throw InvalidInput("b1_certificate: empty sample");
  RayAverageReport report;
  report.horizons = horizons;
  const double T = horizons.back();
  const long n = static_cast<long>(starts.size()) * directions.size();
  report.per_sample.resize(n);
  long idx = 0;
  for (const auto& y0 : starts)
    for (const auto& z : directions)
      report.per_sample[idx++] = ray_average(potential, x, y0, z, T, dt);
  report.c_estimate = report.per_sample.mean();
  report.max_deviation =
      (report.per_sample.array() - report.c_estimate).abs().maxCoeff();
  // c(x,p) = max over sampled unit alpha of c(x,alpha) + <p,alpha>; with the
  // direction sample standing in for the alpha sphere the worst slack is
  // max_a (c + <p,a>) - c(x,p).
  double cxp = -std::numeric_limits<double>::infinity();
  idx = 0;
  for (const auto& y0 : starts) {
    (void)y0;
    for (const auto& z : directions) {
      cxp = std::max(cxp, report.per_sample[idx] + p.dot(z));
      ++idx;
    }
  }
  report.c_xp = cxp;
  double margin = -std::numeric_limits<double>::infinity();
  idx = 0;
  for (const auto& y0 : starts) {
    (void)y0;
    for (const auto& z : directions) {
      margin = std::max(margin, report.per_sample[idx] + p.dot(z) - cxp);
      ++idx;
    }
  }
  report.margin = margin;
  return report;
}

}  // namespace mshj
