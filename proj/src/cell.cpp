#include "mshj/cell.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mshj {

namespace {

Eigen::VectorXd recurrence_point_unit(int k, int dim) {
  double phi = 1.0;
  for (int it = 0; it < 32; ++it) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
  Eigen::VectorXd u(dim);
  double alpha = 1.0;
  for (int j = 0; j < dim; ++j) {
    alpha /= phi;
    u[j] = std::fmod(0.5 + alpha * (k + 1), 1.0);
  }
  return u;
}

double default_q_margin(const Hamiltonian& ham, const Eigen::VectorXd& p) {
  if (const auto* cf = std::get_if<ClosedFormSpec>(&ham)) {
    const double g = cf->a_sup * std::pow(p.norm(), cf->theta) +
                     2.0 * cf->potential.sup_abs() + 1.0;
    return std::pow(g / cf->a0, 1.0 / cf->theta) + 1.0;
  }
  const auto& spec = std::get<ControlHamiltonianSpec>(ham);
  return 4.0 + spec.sup_cost + spec.sup_drift * p.norm();
}

MomentumBox momentum_box_around(const Eigen::VectorXd& p, double margin) {
  MomentumBox box;
  box.lo = p.array() - margin;
  box.hi = p.array() + margin;
  return box;
}

// Precomputed grid tables and per-sweep workspace for the monotone
// Lax-Friedrichs discretization of lambda w + H(x, ., p + Gamma grad w) = 0.
class TorusCellOperator {
 public:
  TorusCellOperator(const CellProblem& problem, const TorusGrid& grid,
                    const CellSolveOptions& opts)
      : problem_(problem), grid_(grid) {
    const int d = ham_dim(problem.ham);
    const int N = ham_num_scales(problem.ham);
    if (problem.scales.dim() != d || problem.scales.num_scales() != N)
      throw InvalidInput("solve_cell: scale system does not match the Hamiltonian");
    if (grid.dim() != d || grid.num_scales() != N)
      throw InvalidInput("solve_cell: grid does not match the Hamiltonian");
    if (!(problem.lambda > 0)) throw InvalidInput("solve_cell: lambda must be positive");
    d_ = d;
    N_ = N;
    P_ = grid.points();

    if (opts.params) {
      params_ = *opts.params;
    } else {
      const double margin =
          opts.q_margin > 0 ? opts.q_margin : default_q_margin(problem.ham, problem.p);
      params_ = estimate_dissipation(problem.ham, problem.x,
                                     momentum_box_around(problem.p, margin), 64, 33,
                                     opts.sigma_safety);
    }

    const Eigen::MatrixXd gv = problem.scales.gamma_values();
    sigma_axis_.resize(d * N);
    gamma_axis_.resize(d * N);
    double denom = 0.0;
    for (int n = 0; n < N; ++n) {
      for (int i = 0; i < d; ++i) {
        const int a = n * d + i;
        gamma_axis_[a] = gv(n, i);
        sigma_axis_[a] = params_.sigma[i] * std::abs(gv(n, i));
        denom += sigma_axis_[a] / grid.spacing(a);
      }
    }
    tau_ = denom > 1e-300 ? opts.cfl_safety / denom : 1e3 / problem.lambda;

    build_tables();

    const int D = d * N;
    dc_.resize(D, Eigen::ArrayXd(P_));
    dd_.resize(D, Eigen::ArrayXd(P_));
    q_.resize(d, Eigen::ArrayXd(P_));
    scratch_.resize(P_);
    scratch2_.resize(P_);
  }

  double tau() const { return tau_; }
  const NumericalHamiltonianParams& params() const { return params_; }

  // R = lambda w + H_num(w).  When `check_range`, verifies that the one-sided
  // momentum arguments stay in the certified box.
  void apply(const Eigen::ArrayXd& w, Eigen::ArrayXd& R, bool check_range) {
    const int D = d_ * N_;
    for (int a = 0; a < D; ++a) {
      const double h = grid_.spacing(a);
      scratch_ = w(grid_.shift_plus(a));    // w at +1 neighbor
      scratch2_ = w(grid_.shift_minus(a));  // w at -1 neighbor
      dc_[a] = (scratch_ - scratch2_) * (0.5 / h);
      dd_[a] = (scratch_ - 2.0 * w + scratch2_) * (1.0 / h);
    }
    for (int i = 0; i < d_; ++i) {
      q_[i].setConstant(problem_.p[i]);
      for (int n = 0; n < N_; ++n) q_[i] += gamma_axis_[n * d_ + i] * dc_[n * d_ + i];
    }
    if (check_range) check_momentum_range();

    hamiltonian_field(R);  // R := H(x, ., q)
    for (int a = 0; a < D; ++a) R -= (0.5 * sigma_axis_[a]) * dd_[a];
    R += problem_.lambda * w;
  }

 private:
  void build_tables() {
    if (const auto* cf = std::get_if<ClosedFormSpec>(&problem_.ham)) {
      if (cf->potential.kind() != PotentialSpec::Kind::TorusTrig)
        throw InvalidInput("solve_cell: torus solver needs a torus-periodic potential");
      v_field_.resize(P_);
      Eigen::VectorXd ys(d_ * N_);
      const bool has_a = static_cast<bool>(cf->coeff_a);
      if (has_a) a_field_.resize(P_);
      for (long f = 0; f < P_; ++f) {
        for (int a = 0; a < d_ * N_; ++a) ys[a] = grid_.coordinate(a)[f];
        v_field_[f] = cf->potential.eval_torus(ys);
        if (has_a) a_field_[f] = cf->coeff_a(problem_.x, ys);
      }
      theta_ = cf->theta;
      closed_ = true;
      return;
    }
    const auto& spec = std::get<ControlHamiltonianSpec>(problem_.ham);
    if (spec.physical_fast)
      throw InvalidInput("solve_cell: torus solver needs torus-periodic data");
    const int M = spec.controls.size();
    b_fields_.resize(M);
    g_fields_.resize(M);
    Eigen::VectorXd ys(d_ * N_);
    for (int k = 0; k < M; ++k) {
      b_fields_[k].assign(d_, Eigen::ArrayXd(P_));
      g_fields_[k].resize(P_);
    }
    for (long f = 0; f < P_; ++f) {
      for (int a = 0; a < d_ * N_; ++a) ys[a] = grid_.coordinate(a)[f];
      for (int k = 0; k < M; ++k) {
        const Eigen::VectorXd b = spec.drift(problem_.x, ys, spec.controls[k]);
        for (int i = 0; i < d_; ++i) b_fields_[k][i][f] = b[i];
        g_fields_[k][f] = spec.cost(problem_.x, ys, spec.controls[k]);
      }
    }
    closed_ = false;
  }

  void hamiltonian_field(Eigen::ArrayXd& H) {
    if (closed_) {
      if (d_ == 1) {
        scratch_ = q_[0].abs();
      } else {
        scratch_ = q_[0].square();
        for (int i = 1; i < d_; ++i) scratch_ += q_[i].square();
        scratch_ = scratch_.sqrt();
      }
      if (theta_ == 2) scratch_ = scratch_.square();
      if (a_field_.size() > 0)
        H = a_field_ * scratch_ - v_field_;
      else
        H = scratch_ - v_field_;
      return;
    }
    const int M = static_cast<int>(g_fields_.size());
    for (int k = 0; k < M; ++k) {
      scratch_ = -g_fields_[k];
      for (int i = 0; i < d_; ++i) scratch_ -= b_fields_[k][i] * q_[i];
      if (k == 0)
        H = scratch_;
      else
        H = H.max(scratch_);
    }
  }

  void check_momentum_range() const {
    for (int i = 0; i < d_; ++i) {
      double half = 0.0;
      Eigen::ArrayXd env = q_[i].abs();
      for (int n = 0; n < N_; ++n)
        env += 0.5 * std::abs(gamma_axis_[n * d_ + i]) * dd_[n * d_ + i].abs();
      const double hi = params_.p_box.hi[i];
      const double lo = params_.p_box.lo[i];
      const double bound = std::min(std::abs(lo), std::abs(hi));
      (void)half;
      if (env.maxCoeff() > bound + 1e-9)
        throw OutOfValidity(
            "solve_cell: corrector gradient left the certified p-box on axis " +
            std::to_string(i + 1) + " (|q| up to " + std::to_string(env.maxCoeff()) +
            ", box " + std::to_string(bound) + ")");
    }
  }

  const CellProblem& problem_;
  const TorusGrid& grid_;
  int d_ = 0, N_ = 0;
  long P_ = 0;
  double tau_ = 0.0;
  NumericalHamiltonianParams params_;
  std::vector<double> sigma_axis_;
  std::vector<double> gamma_axis_;

  bool closed_ = true;
  int theta_ = 1;
  Eigen::ArrayXd v_field_;
  Eigen::ArrayXd a_field_;
  std::vector<std::vector<Eigen::ArrayXd>> b_fields_;  // [control][dim]
  std::vector<Eigen::ArrayXd> g_fields_;

  std::vector<Eigen::ArrayXd> dc_;
  std::vector<Eigen::ArrayXd> dd_;
  std::vector<Eigen::ArrayXd> q_;
  Eigen::ArrayXd scratch_, scratch2_;
};

struct IterationResult {
  double residual = 0.0;
  int iterations = 0;
};

// Shared discounted fixed-point loop.  `apply` fills R = lambda w + H_num(w).
template <class ApplyFn>
IterationResult discounted_iterate(Eigen::ArrayXd& w, Eigen::ArrayXd& R, double lambda,
                                   double tau, double tol, int max_iter,
                                   bool accelerate, ApplyFn&& apply) {
  const double c1 = tau / (1.0 + lambda * tau);
  double best = std::numeric_limits<double>::infinity();
  bool shift_enabled = accelerate;
  for (int it = 0; it < max_iter; ++it) {
    apply(w, R);
    const double res = R.abs().maxCoeff();
    if (res <= tol) return {res, it};
    if (res < best) best = res;
    if (shift_enabled && res > 50.0 * best && it > 64) shift_enabled = false;
    if (shift_enabled) {
      const double rbar = R.mean();
      w -= c1 * (R - rbar) + (rbar / lambda);
    } else {
      w -= c1 * R;
    }
  }
  apply(w, R);
  const double res = R.abs().maxCoeff();
  if (res <= tol) return {res, max_iter};
  throw NonConvergence("cell solve: residual " + std::to_string(res) +
                           " above tol after max_iter sweeps",
                       res, max_iter);
}

CellSolution finish_solution(const Eigen::ArrayXd& w, double lambda, double residual,
                             int iterations) {
  CellSolution sol;
  sol.w = w;
  sol.lambda = lambda;
  sol.residual = residual;
  sol.lam_w_mean = lambda * w.mean();
  sol.lam_w_osc = lambda * (w.maxCoeff() - w.minCoeff());
  sol.iterations = iterations;
  return sol;
}

}  // namespace

CellSolution solve_cell(const CellProblem& problem, const TorusGrid& grid,
                        const CellSolveOptions& opts) {
  if (!(opts.tol > 0)) throw InvalidInput("solve_cell: tol must be positive");
  TorusCellOperator op(problem, grid, opts);
  Eigen::ArrayXd w =
      opts.warm_start ? *opts.warm_start : Eigen::ArrayXd::Zero(grid.points());
  if (w.size() != grid.points()) throw InvalidInput("solve_cell: warm start size mismatch");
  Eigen::ArrayXd R(grid.points());
  int counter = 0;
  auto apply = [&](const Eigen::ArrayXd& wi, Eigen::ArrayXd& Ri) {
    const bool check = (counter++ % opts.check_every) == 0;
    op.apply(wi, Ri, check);
  };
  const IterationResult res = discounted_iterate(w, R, problem.lambda, op.tau(),
                                                 opts.tol, opts.max_iter,
                                                 opts.accelerate, apply);
  return finish_solution(w, problem.lambda, res.residual, res.iterations);
}

Eigen::ArrayXd cell_residual(const CellProblem& problem, const TorusGrid& grid,
                             const Eigen::ArrayXd& w, const CellSolveOptions& opts) {
  TorusCellOperator op(problem, grid, opts);
  Eigen::ArrayXd R(grid.points());
  op.apply(w, R, false);
  return R;
}

Eigen::ArrayXd cell_sweep(const CellProblem& problem, const TorusGrid& grid,
                          const Eigen::ArrayXd& w, const CellSolveOptions& opts) {
  TorusCellOperator op(problem, grid, opts);
  Eigen::ArrayXd R(grid.points());
  op.apply(w, R, false);
  const double c1 = op.tau() / (1.0 + problem.lambda * op.tau());
  return w - c1 * R;
}

double cell_tau(const CellProblem& problem, const TorusGrid& grid,
                const CellSolveOptions& opts) {
  return TorusCellOperator(problem, grid, opts).tau();
}

std::vector<double> lambda_schedule(double lambda0, double factor, double lambda_min) {
  if (!(lambda0 > 0) || !(lambda_min > 0) || !(factor > 0 && factor < 1))
    throw InvalidInput("lambda_schedule: need lambda0, lambda_min > 0, 0 < factor < 1");
  if (lambda_min > lambda0) throw InvalidInput("lambda_schedule: lambda_min > lambda0");
  std::vector<double> schedule;
  double lam = lambda0;
  while (lam > lambda_min * (1.0 + 1e-12)) {
    schedule.push_back(lam);
    lam *= factor;
  }
  schedule.push_back(lambda_min);
  return schedule;
}

EffectiveValue effective_value(const Hamiltonian& ham, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& p, const ScaleSystem& scales,
                               const TorusGrid& grid,
                               const std::vector<double>& schedule,
                               const CellSolveOptions& opts) {
  if (schedule.empty()) throw InvalidInput("effective_value: empty schedule");
  for (size_t k = 1; k < schedule.size(); ++k)
    if (!(schedule[k] < schedule[k - 1]))
      throw InvalidInput("effective_value: schedule must be strictly decreasing");

  EffectiveValue out;
  out.schedule = schedule;
  CellProblem problem{ham, x, p, scales, schedule.front()};
  CellSolveOptions stage = opts;
  int total_iters = 0;
  Eigen::ArrayXd w;
  double prev_lambda = 0.0;
  CellSolution sol;
  for (size_t k = 0; k < schedule.size(); ++k) {
    problem.lambda = schedule[k];
    const bool last = (k + 1 == schedule.size());
    stage.tol = last ? opts.tol : std::max(opts.tol, 0.02 * problem.lambda);
    if (k > 0) {
      // constant-mode prediction: w_l' ~ w_l + mean(l w)(1/l' - 1/l)
      const double mean_lw = prev_lambda * w.mean();
      w += mean_lw * (1.0 / problem.lambda - 1.0 / prev_lambda);
      stage.warm_start = w;
    } else {
      stage.warm_start.reset();
    }
    sol = solve_cell(problem, grid, stage);
    w = sol.w;
    prev_lambda = problem.lambda;
    total_iters += sol.iterations;
  }
  sol.iterations = total_iters;
  out.hbar = -sol.lam_w_mean;
  out.flatness = sol.lam_w_osc;
  out.solution = std::move(sol);
  return out;
}

CorrectorSample restrict_diagonal(const CellSolution& sol, const TorusGrid& grid,
                                  const CellProblem& problem, double box_radius,
                                  int num_samples, double fd_step) {
  if (num_samples < 1) throw InvalidInput("restrict_diagonal: need samples");
  const int d = ham_dim(problem.ham);
  const int N = ham_num_scales(problem.ham);
  const Eigen::MatrixXd gv = problem.scales.gamma_values();
  double hmin = 1.0;
  for (int a = 0; a < grid.axes(); ++a) hmin = std::min(hmin, grid.spacing(a));
  const double step = fd_step > 0 ? fd_step : hmin;
  const double hbar = -sol.lam_w_mean;

  const auto diag_coords = [&](const Eigen::VectorXd& y1) {
    Eigen::VectorXd ys(d * N);
    for (int n = 0; n < N; ++n)
      for (int i = 0; i < d; ++i) ys[n * d + i] = gv(n, i) * y1[i];
    return ys;
  };
  const auto v_at = [&](const Eigen::VectorXd& y1) {
    return grid.interpolate(sol.w, diag_coords(y1));
  };

  CorrectorSample out;
  out.points.resize(num_samples, d);
  out.values.resize(num_samples);
  std::vector<double> residuals(num_samples);
  for (int s = 0; s < num_samples; ++s) {
    const Eigen::VectorXd y1 = box_radius * recurrence_point_unit(s, d);
    out.points.row(s) = y1.transpose();
    out.values[s] = v_at(y1);
    Eigen::VectorXd grad(d);
    for (int i = 0; i < d; ++i) {
      Eigen::VectorXd yp = y1, ym = y1;
      yp[i] += step;
      ym[i] -= step;
      grad[i] = (v_at(yp) - v_at(ym)) / (2.0 * step);
    }
    const Eigen::VectorXd qd = problem.p + grad;
    const double hval = eval_hamiltonian(problem.ham, problem.x, diag_coords(y1), qd);
    residuals[s] = std::abs(-hbar + hval);
  }
  std::vector<double> sorted = residuals;
  std::sort(sorted.begin(), sorted.end());
  out.residual_mean =
      std::accumulate(sorted.begin(), sorted.end(), 0.0) / sorted.size();
  out.residual_max = sorted.back();
  const size_t idx95 =
      std::min(sorted.size() - 1, static_cast<size_t>(std::ceil(0.95 * sorted.size())) - 1);
  out.residual_p95 = sorted[idx95];
  out.delta = out.residual_p95;
  return out;
}

namespace {

// Truncated-box analogue of the torus operator: physical coordinates on
// [-R, R]^d, one-sided difference closure at the boundary.
class BoxCellOperator {
 public:
  BoxCellOperator(const ClosedFormSpec& spec, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& p, double lambda, double radius,
                  int cells_per_unit, const BoxSolveOptions& opts)
      : spec_(spec), x_(x), p_(p), lambda_(lambda), radius_(radius) {
    d_ = spec.dim;
    if (spec.potential.kind() == PotentialSpec::Kind::TorusTrig)
      throw InvalidInput("box solver: potential must live in physical space");
    if (!(lambda > 0)) throw InvalidInput("box solver: lambda must be positive");
    if (!(radius > 0) || cells_per_unit < 1)
      throw InvalidInput("box solver: bad radius/grid");
    if (spec.potential.kind() == PotentialSpec::Kind::CompactDeformation &&
        radius < 4.0 * spec.potential.r_v())
      throw InvalidInput("box solver: need R >= 4 R_V");

    h_ = 1.0 / cells_per_unit;
    m_ = 2 * static_cast<int>(std::llround(radius * cells_per_unit)) + 1;
    P_ = 1;
    for (int i = 0; i < d_; ++i) P_ *= m_;
    strides_.assign(d_, 1);
    for (int a = d_ - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * m_;

    const double margin =
        opts.q_margin > 0 ? opts.q_margin : default_q_margin(Hamiltonian(spec), p);
    params_ = estimate_dissipation(Hamiltonian(spec), x,
                                   momentum_box_around(p, margin), 64, 33,
                                   opts.sigma_safety);
    double denom = 0.0;
    for (int i = 0; i < d_; ++i) denom += params_.sigma[i] / h_;
    tau_ = denom > 1e-300 ? opts.cfl_safety / denom : 1e3 / lambda;

    // node coordinates, potential/coefficient tables, boundary masks
    v_field_.resize(P_);
    const bool has_a = static_cast<bool>(spec.coeff_a);
    if (has_a) a_field_.resize(P_);
    coords_.resize(P_, d_);
    std::vector<int> idx(d_, 0);
    Eigen::VectorXd y(d_);
    for (long f = 0; f < P_; ++f) {
      for (int i = 0; i < d_; ++i) y[i] = -radius_ + h_ * idx[i];
      coords_.row(f) = y.transpose();
      v_field_[f] = spec.potential.eval_physical(y);
      if (has_a) a_field_[f] = spec.coeff_a(x, y);
      int a = d_ - 1;
      while (a >= 0 && ++idx[a] == m_) idx[a--] = 0;
    }
    shift_plus_.resize(d_);
    shift_minus_.resize(d_);
    lo_edge_.resize(d_);
    hi_edge_.resize(d_);
    for (int a = 0; a < d_; ++a) {
      shift_plus_[a].resize(P_);
      shift_minus_[a].resize(P_);
    }
    std::fill(idx.begin(), idx.end(), 0);
    for (long f = 0; f < P_; ++f) {
      for (int a = 0; a < d_; ++a) {
        const int j = idx[a];
        shift_plus_[a][f] = static_cast<int>(j + 1 == m_ ? f : f + strides_[a]);
        shift_minus_[a][f] = static_cast<int>(j == 0 ? f : f - strides_[a]);
        if (j + 1 == m_) hi_edge_[a].push_back(f);
        if (j == 0) lo_edge_[a].push_back(f);
      }
      int a = d_ - 1;
      while (a >= 0 && ++idx[a] == m_) idx[a--] = 0;
    }

    dm_.resize(d_, Eigen::ArrayXd(P_));
    dp_.resize(d_, Eigen::ArrayXd(P_));
    q_.resize(d_, Eigen::ArrayXd(P_));
    scratch_.resize(P_);
  }

  long points() const { return P_; }
  int nodes_per_axis() const { return m_; }
  double spacing() const { return h_; }
  double tau() const { return tau_; }
  long center_index() const {
    long f = 0;
    for (int a = 0; a < d_; ++a) f += strides_[a] * ((m_ - 1) / 2);
    return f;
  }
  const Eigen::MatrixXd& coords() const { return coords_; }

  void apply(const Eigen::ArrayXd& v, Eigen::ArrayXd& R) {
    for (int a = 0; a < d_; ++a) {
      scratch_ = v(shift_plus_[a]);
      dp_[a] = (scratch_ - v) * (1.0 / h_);
      scratch_ = v(shift_minus_[a]);
      dm_[a] = (v - scratch_) * (1.0 / h_);
      // one-sided closure: copy the interior difference across the edge (the
      // boundary Hamiltonian below never consumes the copied value)
      for (long f : hi_edge_[a]) dp_[a][f] = dm_[a][f];
      for (long f : lo_edge_[a]) dm_[a][f] = dp_[a][f];
    }
    for (int i = 0; i < d_; ++i) q_[i] = problem_p(i) + 0.5 * (dm_[i] + dp_[i]);

    if (d_ == 1) {
      scratch_ = q_[0].abs();
    } else {
      scratch_ = q_[0].square();
      for (int i = 1; i < d_; ++i) scratch_ += q_[i].square();
      scratch_ = scratch_.sqrt();
    }
    if (spec_.theta == 2) scratch_ = scratch_.square();
    // Upwind closure at the faces: the control sup keeps only branches whose
    // trajectories re-enter the box (their value propagates from the
    // interior), which clamps the face-axis magnitude.  Exiting strategies
    // would need exterior data; dropping them biases the face value high,
    // and a too-high boundary never leaks through the interior inf.
    for (int a = 0; a < d_; ++a) {
      for (long f : hi_edge_[a]) scratch_[f] = face_magnitude(f, a, true);
      for (long f : lo_edge_[a]) scratch_[f] = face_magnitude(f, a, false);
    }
    if (a_field_.size() > 0)
      R = a_field_ * scratch_ - v_field_;
    else
      R = scratch_ - v_field_;
    for (int i = 0; i < d_; ++i) R -= (0.5 * params_.sigma[i]) * (dp_[i] - dm_[i]);
    R += lambda_ * v;
  }

 private:
  double problem_p(int i) const { return p_[i]; }

  // |q|^theta replacement at a face node: per-axis magnitudes with the
  // face axis clamped to its outflow branch.
  double face_magnitude(long f, int face_axis, bool high_face) const {
    double norm2 = 0.0;
    for (int i = 0; i < d_; ++i) {
      double m;
      const bool on_high = std::binary_search(hi_edge_[i].begin(), hi_edge_[i].end(), f);
      const bool on_low = std::binary_search(lo_edge_[i].begin(), lo_edge_[i].end(), f);
      if (i == face_axis || on_high || on_low) {
        // only branches whose trajectories re-enter the box stay in the sup:
        // they consume the interior-side difference
        const bool hi = (i == face_axis) ? high_face : on_high;
        m = hi ? std::max(0.0, p_[i] + dm_[i][f])
               : std::max(0.0, -(p_[i] + dp_[i][f]));
      } else {
        m = std::abs(q_[i][f]);
      }
      norm2 += m * m;
    }
    const double norm = std::sqrt(norm2);
    return spec_.theta == 2 ? norm * norm : norm;
  }

  const ClosedFormSpec& spec_;
  Eigen::VectorXd x_, p_;
  double lambda_, radius_, h_, tau_ = 0.0;
  int d_ = 0, m_ = 0;
  long P_ = 0;
  std::vector<long> strides_;
  NumericalHamiltonianParams params_;
  Eigen::ArrayXd v_field_, a_field_;
  Eigen::MatrixXd coords_;
  std::vector<Eigen::ArrayXi> shift_plus_, shift_minus_;
  std::vector<std::vector<long>> lo_edge_, hi_edge_;
  std::vector<Eigen::ArrayXd> dm_, dp_, q_;
  Eigen::ArrayXd scratch_;
};

}  // namespace

BoxCellSolution solve_cell_unbounded(const ClosedFormSpec& spec,
                                     const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& p, double lambda,
                                     double radius, int cells_per_unit,
                                     const BoxSolveOptions& opts) {
  BoxCellOperator op(spec, x, p, lambda, radius, cells_per_unit, opts);
  Eigen::ArrayXd v =
      opts.warm_start ? *opts.warm_start : Eigen::ArrayXd::Zero(op.points());
  if (v.size() != op.points())
    throw InvalidInput("box solver: warm start size mismatch");
  Eigen::ArrayXd R(op.points());
  auto apply = [&](const Eigen::ArrayXd& vi, Eigen::ArrayXd& Ri) { op.apply(vi, Ri); };
  const IterationResult res = discounted_iterate(v, R, lambda, op.tau(), opts.tol,
                                                 opts.max_iter, true, apply);

  BoxCellSolution out;
  out.radius = radius;
  out.spacing = op.spacing();
  out.lambda = lambda;
  out.residual = res.residual;
  out.iterations = res.iterations;

  const Eigen::ArrayXd r2 = op.coords().rowwise().squaredNorm().array();
  BoxReadout readout = opts.readout;
  if (readout == BoxReadout::Auto)
    readout = spec.potential.kind() == PotentialSpec::Kind::CompactDeformation
                  ? BoxReadout::FarShell
                  : BoxReadout::CentralWindow;
  double inner = 0.0, outer = 0.25 * radius;
  if (readout == BoxReadout::FarShell) {
    inner = 0.6 * radius;
    outer = 0.8 * radius;
  }
  double acc = 0.0;
  long count = 0;
  for (long f = 0; f < op.points(); ++f) {
    const double r = std::sqrt(r2[f]);
    if (r >= inner && r <= outer) {
      acc += -lambda * v[f];
      ++count;
    }
  }
  out.effective_value = count > 0 ? acc / count : 0.0;
  out.readout_inner = inner;
  out.readout_outer = outer;

  const long center = op.center_index();
  const double v0 = v[center];
  out.v = v - v0;

  out.shell_radii.resize(opts.shells);
  out.shell_slopes.resize(opts.shells);
  Eigen::VectorXd best = Eigen::VectorXd::Zero(opts.shells);
  for (long f = 0; f < op.points(); ++f) {
    const double r = std::sqrt(r2[f]);
    if (r < op.spacing()) continue;
    int shell = std::min(opts.shells - 1,
                         static_cast<int>(r / (radius * std::sqrt(double(spec.dim)) /
                                               opts.shells)));
    best[shell] = std::max(best[shell], std::abs(out.v[f]) / r);
  }
  for (int s = 0; s < opts.shells; ++s) {
    out.shell_radii[s] =
        (s + 1) * radius * std::sqrt(double(spec.dim)) / opts.shells;
    out.shell_slopes[s] = best[s];
  }
  return out;
}

ConsistencyReport quasi_torus_consistency(const ClosedFormSpec& spec,
                                          const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& p,
                                          const ConsistencyOptions& opts) {
  LiftResult lift = lift_quasi_periodic(spec);
  ConsistencyReport report;
  {
    const ResonanceReport res = check_condition_a(lift.scales, 10'000, 1e-8);
    report.resonant = res.any_resonant();
  }
  const TorusGrid grid =
      TorusGrid::uniform(spec.dim, spec.num_scales, opts.torus_cells);
  const std::vector<double> schedule = lambda_schedule(1.0, 0.5, opts.lambda_min);
  CellSolveOptions copts;
  copts.tol = opts.tol;
  const EffectiveValue torus = effective_value(Hamiltonian(lift.lifted), x, p,
                                               lift.scales, grid, schedule, copts);
  report.torus_value = torus.hbar;
  report.torus_flatness = torus.flatness;
  report.torus_error_estimate =
      torus.flatness + 10.0 / opts.torus_cells + 2.0 * opts.lambda_min;

  BoxSolveOptions bopts;
  bopts.tol = opts.tol;
  bopts.readout = BoxReadout::CentralWindow;
  const BoxCellSolution full = solve_cell_unbounded(
      spec, x, p, opts.box_lambda, opts.box_radius, opts.box_cells_per_unit, bopts);
  const BoxCellSolution half =
      solve_cell_unbounded(spec, x, p, 0.5 * opts.box_lambda, opts.box_radius,
                           opts.box_cells_per_unit, bopts);
  // first-order lambda extrapolation of -lambda v
  report.box_value = 2.0 * half.effective_value - full.effective_value;
  report.box_error_estimate =
      std::abs(half.effective_value - full.effective_value) +
      10.0 / opts.box_cells_per_unit;
  report.difference = std::abs(report.box_value - report.torus_value);
  return report;
}

}  // namespace mshj
