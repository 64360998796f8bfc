#include "mshj/homogenize.hpp"

#include <algorithm>
#include <cmath>

namespace mshj {

SpatialGrid SpatialGrid::dirichlet(int dim, int cells) {
  if (dim < 1 || cells < 2) throw InvalidInput("spatial grid: bad parameters");
  SpatialGrid g;
  g.domain = Domain::DirichletUnitBox;
  g.dim = dim;
  g.cells.assign(dim, cells);
  return g;
}

SpatialGrid SpatialGrid::periodic(int dim, int cells) {
  if (dim < 1 || cells < 2) throw InvalidInput("spatial grid: bad parameters");
  SpatialGrid g;
  g.domain = Domain::PeriodicUnitBox;
  g.dim = dim;
  g.cells.assign(dim, cells);
  return g;
}

int SpatialGrid::nodes_per_axis() const {
  return domain == Domain::DirichletUnitBox ? cells.front() + 1 : cells.front();
}

long SpatialGrid::points() const {
  long p = 1;
  for (int i = 0; i < dim; ++i) p *= nodes_per_axis();
  return p;
}

Eigen::VectorXd SpatialGrid::node(long flat) const {
  const int m = nodes_per_axis();
  Eigen::VectorXd x(dim);
  long rem = flat;
  for (int i = dim - 1; i >= 0; --i) {
    x[i] = spacing() * static_cast<double>(rem % m);
    rem /= m;
  }
  return x;
}

namespace {

double wrap01(double v) {
  v = std::fmod(v, 1.0);
  return v < 0 ? v + 1.0 : v;
}

// Smallest spatial feature of the fast data at this epsilon.
double fast_feature_scale(const Hamiltonian& ham, const ScaleSystem& scales,
                          double eps1) {
  const auto* cf = std::get_if<ClosedFormSpec>(&ham);
  if (cf && cf->potential.kind() == PotentialSpec::Kind::QuasiPeriodic) {
    double tmin = std::numeric_limits<double>::infinity();
    for (const auto& row : cf->potential.periods())
      for (const auto& t : row) tmin = std::min(tmin, t.value());
    return eps1 * tmin;
  }
  if (cf && cf->potential.kind() == PotentialSpec::Kind::CompactDeformation) {
    return cf->potential.r_v() > 0 ? eps1 * cf->potential.r_v()
                                   : std::numeric_limits<double>::infinity();
  }
  const Eigen::MatrixXd eps = realize_epsilon(scales, eps1);
  return eps.cwiseAbs().minCoeff();
}

// Shared upwind stencil machinery for the spatial solvers.  The Hamiltonian
// value at a node comes from a per-node table (closed form) or a per-control
// table (control form) or the effective-table interpolation.
class SpatialOperator {
 public:
  enum class Kind { Oscillatory, Effective };

  SpatialOperator(const SpatialGrid& grid, const HomogenizerOptions& opts)
      : grid_(grid), opts_(opts) {
    d_ = grid.dim;
    m_ = grid.nodes_per_axis();
    P_ = grid.points();
    h_ = grid.spacing();
    strides_.assign(d_, 1);
    for (int a = d_ - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * m_;

    const bool periodic = grid.domain == SpatialGrid::Domain::PeriodicUnitBox;
    shift_plus_.resize(d_);
    shift_minus_.resize(d_);
    for (int a = 0; a < d_; ++a) {
      shift_plus_[a].resize(P_);
      shift_minus_[a].resize(P_);
    }
    boundary_.assign(P_, 0);
    std::vector<int> idx(d_, 0);
    for (long f = 0; f < P_; ++f) {
      for (int a = 0; a < d_; ++a) {
        const int j = idx[a];
        if (periodic) {
          shift_plus_[a][f] =
              static_cast<int>(j + 1 == m_ ? f + strides_[a] * (1 - m_) : f + strides_[a]);
          shift_minus_[a][f] =
              static_cast<int>(j == 0 ? f - strides_[a] * (1 - m_) : f - strides_[a]);
        } else {
          shift_plus_[a][f] = static_cast<int>(j + 1 == m_ ? f : f + strides_[a]);
          shift_minus_[a][f] = static_cast<int>(j == 0 ? f : f - strides_[a]);
          if (j == 0 || j + 1 == m_) boundary_[f] = 1;
        }
      }
      int a = d_ - 1;
      while (a >= 0 && ++idx[a] == m_) idx[a--] = 0;
    }
    dm_.resize(d_, Eigen::ArrayXd(P_));
    dp_.resize(d_, Eigen::ArrayXd(P_));
    q_.resize(d_, Eigen::ArrayXd(P_));
    scratch_.resize(P_);
  }

  void attach_oscillatory(const OscillatoryProblem& prob) {
    kind_ = Kind::Oscillatory;
    const Hamiltonian& ham = prob.ham;
    const int d = d_;

    const double feature = fast_feature_scale(ham, prob.scales, prob.eps1);
    if (h_ > feature / opts_.resolution_rule + 1e-12)
      throw InvalidInput("oscillatory solve: resolution rule violated (h > feature/" +
                         std::to_string(opts_.resolution_rule) + ")");

    const auto* cf = std::get_if<ClosedFormSpec>(&ham);
    const bool physical =
        cf && cf->potential.kind() != PotentialSpec::Kind::TorusTrig;
    const Eigen::MatrixXd eps = realize_epsilon(prob.scales, prob.eps1);
    const int N = ham_num_scales(ham);

    const auto fast_at = [&](const Eigen::VectorXd& x) {
      if (physical) return Eigen::VectorXd((x / prob.eps1).eval());
      Eigen::VectorXd ys(d * N);
      for (int n = 0; n < N; ++n)
        for (int i = 0; i < d; ++i) ys[n * d + i] = wrap01(x[i] / eps(n, i));
      return ys;
    };

    Eigen::VectorXd xnode(d);
    if (cf) {
      closed_ = true;
      theta_ = cf->theta;
      v_field_.resize(P_);
      const bool has_a = static_cast<bool>(cf->coeff_a);
      if (has_a) a_field_.resize(P_);
      for (long f = 0; f < P_; ++f) {
        xnode = grid_.node(f);
        const Eigen::VectorXd ys = fast_at(xnode);
        v_field_[f] = physical ? cf->potential.eval_physical(ys)
                               : cf->potential.eval_torus(ys);
        if (has_a) a_field_[f] = cf->coeff_a(xnode, ys);
      }
    } else {
      closed_ = false;
      const auto& spec = std::get<ControlHamiltonianSpec>(ham);
      const int M = spec.controls.size();
      b_fields_.resize(M);
      g_fields_.resize(M);
      for (int k = 0; k < M; ++k) {
        b_fields_[k].assign(d, Eigen::ArrayXd(P_));
        g_fields_[k].resize(P_);
      }
      for (long f = 0; f < P_; ++f) {
        xnode = grid_.node(f);
        const Eigen::VectorXd ys = fast_at(xnode);
        for (int k = 0; k < M; ++k) {
          const Eigen::VectorXd b = spec.drift(xnode, ys, spec.controls[k]);
          for (int i = 0; i < d; ++i) b_fields_[k][i][f] = b[i];
          g_fields_[k][f] = spec.cost(xnode, ys, spec.controls[k]);
        }
      }
    }

    const double margin = opts_.q_margin > 0 ? opts_.q_margin : default_margin(ham);
    MomentumBox box;
    box.lo = Eigen::VectorXd::Constant(d, -margin);
    box.hi = Eigen::VectorXd::Constant(d, margin);
    Eigen::VectorXd x0 = Eigen::VectorXd::Constant(d, 0.5);
    params_ = estimate_dissipation(ham, x0, box, 64, 33, opts_.sigma_safety);
    finish_sigma();
  }

  void attach_effective(const EffectiveTable& table) {
    kind_ = Kind::Effective;
    table_ = &table;
    const int d = d_;
    // sigma from the table's own Lipschitz slopes, axis by axis
    Eigen::VectorXd sigma(d);
    const MomentumGrid& g = table.grid;
    std::vector<long> tstr(d, 1);
    for (int i = d - 2; i >= 0; --i) tstr[i] = tstr[i + 1] * g.counts[i + 1];
    for (int i = 0; i < d; ++i) {
      double lip = 0.0;
      for (long f = 0; f < g.points(); ++f) {
        long rem = f;
        for (int j = d - 1; j >= 0; --j) {
          const int jj = static_cast<int>(rem % g.counts[j]);
          rem /= g.counts[j];
          if (j == i && jj + 1 < g.counts[i])
            lip = std::max(lip,
                           std::abs(table.values[f + tstr[i]] - table.values[f]) /
                               g.step(i));
        }
      }
      sigma[i] = lip;
    }
    params_.sigma = opts_.sigma_safety * sigma;
    params_.p_box.lo = g.lo;
    params_.p_box.hi = g.hi;
    finish_sigma();
  }

  double tau() const { return tau_; }
  double max_dt() const { return tau_; }
  long points() const { return P_; }
  const std::vector<std::uint8_t>& boundary() const { return boundary_; }

  // R = H_num(u); when mu > 0 the caller adds mu*u.
  void apply(const Eigen::ArrayXd& u, Eigen::ArrayXd& R) {
    for (int a = 0; a < d_; ++a) {
      scratch_ = u(shift_plus_[a]);
      dp_[a] = (scratch_ - u) * (1.0 / h_);
      scratch_ = u(shift_minus_[a]);
      dm_[a] = (u - scratch_) * (1.0 / h_);
      if (grid_.domain == SpatialGrid::Domain::DirichletUnitBox) {
        // one-sided at the box faces (values there are pinned anyway)
        for (long f = 0; f < P_; ++f) {
          if (shift_plus_[a][f] == f) dp_[a][f] = dm_[a][f];
          if (shift_minus_[a][f] == f) dm_[a][f] = dp_[a][f];
        }
      }
    }
    for (int i = 0; i < d_; ++i) q_[i] = 0.5 * (dm_[i] + dp_[i]);

    if (kind_ == Kind::Oscillatory) {
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
          R = a_field_ * scratch_ - v_field_;
        else
          R = scratch_ - v_field_;
      } else {
        const int M = static_cast<int>(g_fields_.size());
        for (int k = 0; k < M; ++k) {
          scratch_ = -g_fields_[k];
          for (int i = 0; i < d_; ++i) scratch_ -= b_fields_[k][i] * q_[i];
          if (k == 0)
            R = scratch_;
          else
            R = R.max(scratch_);
        }
      }
    } else {
      Eigen::VectorXd qv(d_);
      for (long f = 0; f < P_; ++f) {
        for (int i = 0; i < d_; ++i) qv[i] = q_[i][f];
        if (!params_.p_box.contains(qv)) {
          // pinned Dirichlet nodes carry a width-zero boundary layer and a
          // masked residual; clamp them instead of failing the solve
          if (!boundary_[f])
            throw OutOfValidity(
                "effective solve: gradient left the table box at node " +
                std::to_string(f) + " (q = " + std::to_string(qv[0]) + ")");
          for (int i = 0; i < d_; ++i)
            qv[i] = std::clamp(qv[i], params_.p_box.lo[i], params_.p_box.hi[i]);
        }
        R[f] = interpolate(*table_, qv);
      }
    }
    for (int i = 0; i < d_; ++i) R -= (0.5 * params_.sigma[i]) * (dp_[i] - dm_[i]);
  }

 private:
  static double default_margin(const Hamiltonian& ham) {
    if (const auto* cf = std::get_if<ClosedFormSpec>(&ham)) {
      const double g = 2.0 * cf->potential.sup_abs() + 1.0;
      return std::pow(g / cf->a0, 1.0 / cf->theta) + 2.0;
    }
    const auto& spec = std::get<ControlHamiltonianSpec>(ham);
    return 4.0 + spec.sup_cost;
  }

  void finish_sigma() {
    double denom = 0.0;
    for (int i = 0; i < d_; ++i) denom += params_.sigma[i] / h_;
    tau_ = denom > 1e-300 ? opts_.cfl_safety / denom : 1e6;
  }

  const SpatialGrid& grid_;
  HomogenizerOptions opts_;
  Kind kind_ = Kind::Oscillatory;
  int d_ = 0, m_ = 0;
  long P_ = 0;
  double h_ = 0.0, tau_ = 0.0;
  std::vector<long> strides_;
  std::vector<Eigen::ArrayXi> shift_plus_, shift_minus_;
  std::vector<std::uint8_t> boundary_;
  NumericalHamiltonianParams params_;

  bool closed_ = true;
  int theta_ = 1;
  Eigen::ArrayXd v_field_, a_field_;
  std::vector<std::vector<Eigen::ArrayXd>> b_fields_;
  std::vector<Eigen::ArrayXd> g_fields_;
  const EffectiveTable* table_ = nullptr;

  std::vector<Eigen::ArrayXd> dm_, dp_, q_;
  Eigen::ArrayXd scratch_;
};

Eigen::ArrayXd stationary_iterate(SpatialOperator& op, double mu,
                                  const HomogenizerOptions& opts) {
  if (!(mu > 0)) throw InvalidInput("stationary solve: mu must be positive");
  const long P = op.points();
  Eigen::ArrayXd u = Eigen::ArrayXd::Zero(P);
  Eigen::ArrayXd R(P);
  const double tau = op.tau();
  const double c1 = tau / (1.0 + mu * tau);
  const auto& boundary = op.boundary();
  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iter; ++it) {
    op.apply(u, R);
    R += mu * u;
    for (long f = 0; f < P; ++f)
      if (boundary[f]) R[f] = 0.0;  // Dirichlet nodes pinned
    res = R.abs().maxCoeff();
    if (res <= opts.tol) return u;
    u -= c1 * R;
  }
  throw NonConvergence("stationary solve: residual " + std::to_string(res) +
                           " above tol after max_iter sweeps",
                       res, opts.max_iter);
}

Eigen::ArrayXd evolution_iterate(SpatialOperator& op, const SpatialGrid& grid,
                                 const std::function<double(const Eigen::VectorXd&)>& u0,
                                 double horizon, double dt,
                                 const HomogenizerOptions& opts) {
  if (!u0) throw InvalidInput("evolution solve: missing initial datum");
  if (!(horizon > 0) || !(dt > 0))
    throw InvalidInput("evolution solve: horizon and dt must be positive");
  if (dt > op.max_dt() * (1.0 + 1e-12))
    throw InvalidInput("evolution solve: dt violates the CFL bound " +
                       std::to_string(op.max_dt()));
  (void)opts;
  const long P = op.points();
  Eigen::ArrayXd u(P);
  for (long f = 0; f < P; ++f) u[f] = u0(grid.node(f));
  Eigen::ArrayXd R(P);
  const long steps = static_cast<long>(std::ceil(horizon / dt - 1e-12));
  const double step = horizon / steps;
  for (long k = 0; k < steps; ++k) {
    op.apply(u, R);
    u -= step * R;
  }
  return u;
}

}  // namespace

Eigen::ArrayXd solve_oscillatory_stationary(const OscillatoryProblem& prob,
                                            const SpatialGrid& grid,
                                            const HomogenizerOptions& opts) {
  if (grid.domain != SpatialGrid::Domain::DirichletUnitBox)
    throw InvalidInput("stationary solve: needs the Dirichlet grid");
  SpatialOperator op(grid, opts);
  op.attach_oscillatory(prob);
  return stationary_iterate(op, prob.mu, opts);
}

Eigen::ArrayXd solve_oscillatory_evolution(const OscillatoryProblem& prob,
                                           const SpatialGrid& grid, double dt,
                                           const HomogenizerOptions& opts) {
  if (grid.domain != SpatialGrid::Domain::PeriodicUnitBox)
    throw InvalidInput("evolution solve: needs the periodic grid");
  SpatialOperator op(grid, opts);
  op.attach_oscillatory(prob);
  return evolution_iterate(op, grid, prob.u0, prob.horizon, dt, opts);
}

Eigen::ArrayXd solve_effective_stationary(const EffectiveTable& table, double mu,
                                          const SpatialGrid& grid,
                                          const HomogenizerOptions& opts) {
  if (grid.domain != SpatialGrid::Domain::DirichletUnitBox)
    throw InvalidInput("stationary solve: needs the Dirichlet grid");
  SpatialOperator op(grid, opts);
  op.attach_effective(table);
  return stationary_iterate(op, mu, opts);
}

Eigen::ArrayXd solve_effective_evolution(
    const EffectiveTable& table, const std::function<double(const Eigen::VectorXd&)>& u0,
    double horizon, const SpatialGrid& grid, double dt,
    const HomogenizerOptions& opts) {
  if (grid.domain != SpatialGrid::Domain::PeriodicUnitBox)
    throw InvalidInput("evolution solve: needs the periodic grid");
  SpatialOperator op(grid, opts);
  op.attach_effective(table);
  return evolution_iterate(op, grid, u0, horizon, dt, opts);
}

ConvergenceReport convergence_study(const Hamiltonian& ham, const ScaleSystem& scales,
                                    const std::vector<double>& eps_schedule,
                                    double mu,
                                    const std::function<double(const Eigen::VectorXd&)>& u0,
                                    double horizon, const StudyOptions& opts) {
  if (eps_schedule.empty()) throw InvalidInput("convergence study: empty schedule");
  for (size_t k = 1; k < eps_schedule.size(); ++k)
    if (!(eps_schedule[k] < eps_schedule[k - 1]))
      throw InvalidInput("convergence study: schedule must be strictly decreasing");
  const bool stationary = mu > 0;
  const int d = ham_dim(ham);

  ConvergenceReport report;
  report.eps = eps_schedule;

  // effective table, built once
  const TorusGrid torus = TorusGrid::uniform(d, ham_num_scales(ham), opts.torus_cells);
  const MomentumGrid pgrid = MomentumGrid::symmetric(d, opts.p_radius, opts.p_nodes);
  const std::vector<double> schedule = lambda_schedule(1.0, 0.5, opts.lambda_min);
  CellSolveOptions copts;
  copts.tol = opts.cell_tol;

  // Physical-space potentials pass through a torus lift for the cell solves.
  const auto* cf = std::get_if<ClosedFormSpec>(&ham);
  if (cf && cf->potential.kind() == PotentialSpec::Kind::QuasiPeriodic) {
    const LiftResult lift = lift_quasi_periodic(*cf);
    report.table = build_table(Hamiltonian(lift.lifted), Eigen::VectorXd::Zero(d),
                               lift.scales, pgrid, schedule, torus, copts);
  } else if (cf && cf->potential.kind() == PotentialSpec::Kind::CompactDeformation) {
    // Constant-plateau far field: the effective Hamiltonian of the box
    // problem at the readout shell, sampled directly.
    EffectiveTable table;
    table.x = Eigen::VectorXd::Zero(d);
    table.grid = pgrid;
    table.values.resize(pgrid.points());
    table.flatness.setZero(pgrid.points());
    table.failed.assign(pgrid.points(), 0);
    table.schedule = schedule;
    table.tol = opts.cell_tol;
    BoxSolveOptions bopts;
    bopts.tol = 1e-4;
    for (long f = 0; f < pgrid.points(); ++f) {
      const BoxCellSolution sol = solve_cell_unbounded(
          *cf, table.x, pgrid.node(f), 0.05, 200.0, 16, bopts);
      table.values[f] = sol.effective_value;
    }
    report.table = std::move(table);
  } else {
    report.table =
        build_table(ham, Eigen::VectorXd::Zero(d), scales, pgrid, schedule, torus, copts);
  }

  std::vector<Eigen::ArrayXd> u_eps, u_bar;
  std::vector<SpatialGrid> grids;
  for (const double eps : eps_schedule) {
    const int cells = static_cast<int>(std::llround(opts.cells_per_eps / eps));
    const SpatialGrid grid = stationary ? SpatialGrid::dirichlet(d, cells)
                                        : SpatialGrid::periodic(d, cells);
    grids.push_back(grid);
    OscillatoryProblem prob;
    prob.ham = ham;
    prob.scales = scales;
    prob.eps1 = eps;
    prob.mu = mu;
    prob.u0 = u0;
    prob.horizon = horizon;
    if (stationary) {
      u_eps.push_back(solve_oscillatory_stationary(prob, grid, opts.solver));
      u_bar.push_back(solve_effective_stationary(report.table, mu, grid, opts.solver));
    } else {
      SpatialOperator probe(grid, opts.solver);
      probe.attach_oscillatory(prob);
      const double dt = opts.evolution_dt_factor * probe.max_dt();
      u_eps.push_back(solve_oscillatory_evolution(prob, grid, dt, opts.solver));
      SpatialOperator probe2(grid, opts.solver);
      probe2.attach_effective(report.table);
      const double dte = opts.evolution_dt_factor * probe2.max_dt();
      u_bar.push_back(
          solve_effective_evolution(report.table, u0, horizon, grid, dte, opts.solver));
    }
  }

  // errors on each eps-grid's nodes; boundary band = within 0.1 of the faces
  for (size_t k = 0; k < eps_schedule.size(); ++k) {
    const SpatialGrid& grid = grids[k];
    double sup = 0.0, interior = 0.0, boundary = 0.0;
    for (long f = 0; f < grid.points(); ++f) {
      const Eigen::VectorXd x = grid.node(f);
      const double err = std::abs(u_eps[k][f] - u_bar[k][f]);
      sup = std::max(sup, err);
      bool near = false;
      for (int i = 0; i < d; ++i)
        if (x[i] < 0.1 || x[i] > 0.9) near = true;
      (near ? boundary : interior) = std::max(near ? boundary : interior, err);
    }
    report.sup_errors.push_back(sup);
    report.interior_errors.push_back(interior);
    report.boundary_errors.push_back(boundary);
  }
  for (size_t k = 0; k + 1 < report.sup_errors.size(); ++k)
    report.observed_orders.push_back(
        std::log2(report.sup_errors[k] / report.sup_errors[k + 1]));

  // h-floor: refine the effective solve once per grid
  for (size_t k = 0; k < eps_schedule.size(); ++k) {
    const SpatialGrid& grid = grids[k];
    const int cells = grid.cells.front();
    const SpatialGrid fine = stationary ? SpatialGrid::dirichlet(d, 2 * cells)
                                        : SpatialGrid::periodic(d, 2 * cells);
    Eigen::ArrayXd u_fine;
    if (stationary) {
      u_fine = solve_effective_stationary(report.table, mu, fine, opts.solver);
    } else {
      SpatialOperator probe(fine, opts.solver);
      probe.attach_effective(report.table);
      u_fine = solve_effective_evolution(report.table, u0, horizon, fine,
                                         opts.evolution_dt_factor * probe.max_dt(),
                                         opts.solver);
    }
    // coarse nodes sit at even fine indices
    double diff = 0.0;
    const int mc = grid.nodes_per_axis();
    const int mf = fine.nodes_per_axis();
    std::vector<long> cstr(d, 1), fstr(d, 1);
    for (int i = d - 2; i >= 0; --i) {
      cstr[i] = cstr[i + 1] * mc;
      fstr[i] = fstr[i + 1] * mf;
    }
    for (long f = 0; f < grid.points(); ++f) {
      long rem = f, ff = 0;
      for (int i = d - 1; i >= 0; --i) {
        const long j = rem % mc;
        rem /= mc;
        ff += fstr[i] * (2 * j);
      }
      diff = std::max(diff, std::abs(u_bar[k][f] - u_fine[ff]));
    }
    report.scheme_errors.push_back(diff);
    report.hfloor_flags.push_back(report.sup_errors[k] <= 3.0 * diff);
  }
  return report;
}

}  // namespace mshj
