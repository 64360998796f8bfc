#include "mshj/effective.hpp"

#include <algorithm>
#include <cmath>

namespace mshj {

MomentumGrid MomentumGrid::symmetric(int dim, double radius, int nodes_per_axis) {
  if (dim < 1 || nodes_per_axis < 2 || !(radius > 0))
    throw InvalidInput("momentum grid: bad parameters");
  MomentumGrid g;
  g.lo = Eigen::VectorXd::Constant(dim, -radius);
  g.hi = Eigen::VectorXd::Constant(dim, radius);
  g.counts.assign(dim, nodes_per_axis);
  return g;
}

long MomentumGrid::points() const {
  long p = 1;
  for (int c : counts) p *= c;
  return p;
}

Eigen::VectorXd MomentumGrid::node(long flat) const {
  const int d = dim();
  Eigen::VectorXd p(d);
  long rem = flat;
  for (int i = d - 1; i >= 0; --i) {
    const int j = static_cast<int>(rem % counts[i]);
    rem /= counts[i];
    p[i] = lo[i] + step(i) * j;
  }
  return p;
}

bool EffectiveTable::any_failed() const {
  for (auto f : failed)
    if (f) return true;
  return false;
}

EffectiveTable build_table(const Hamiltonian& ham, const Eigen::VectorXd& x,
                           const ScaleSystem& scales, const MomentumGrid& p_grid,
                           const std::vector<double>& schedule, const TorusGrid& grid,
                           const CellSolveOptions& opts) {
  EffectiveTable table;
  table.x = x;
  table.grid = p_grid;
  const long P = p_grid.points();
  table.values.setZero(P);
  table.flatness.setZero(P);
  table.failed.assign(P, 0);
  table.schedule = schedule;
  table.torus_cells.resize(grid.axes());
  for (int a = 0; a < grid.axes(); ++a) table.torus_cells[a] = grid.cells(a);
  table.tol = opts.tol;

  const int last_axis = p_grid.dim() - 1;
  const int line_len = p_grid.counts[last_axis];
  long failures = 0;
  Eigen::ArrayXd line_start;
  for (long f = 0; f < P; ++f) {
    const Eigen::VectorXd p = p_grid.node(f);
    CellSolveOptions entry_opts = opts;
    const bool line_head = (f % line_len) == 0;
    if (!line_head && line_start.size() > 0) entry_opts.warm_start = line_start;
    try {
      const EffectiveValue ev =
          effective_value(ham, x, p, scales, grid, schedule, entry_opts);
      table.values[f] = ev.hbar;
      table.flatness[f] = ev.flatness;
      line_start = ev.solution.w;
    } catch (const NonConvergence&) {
      table.failed[f] = 1;
      ++failures;
      line_start.resize(0);
    }
  }
  if (failures == P)
    throw NonConvergence("build_table: every entry failed to converge", 0.0, 0);
  return table;
}

double interpolate(const EffectiveTable& table, const Eigen::VectorXd& p) {
  const MomentumGrid& g = table.grid;
  const int d = g.dim();
  if (p.size() != d) throw InvalidInput("table interpolation: wrong dimension");
  std::vector<int> base(d);
  std::vector<double> frac(d);
  std::vector<long> strides(d, 1);
  for (int i = d - 2; i >= 0; --i) strides[i] = strides[i + 1] * g.counts[i + 1];
  for (int i = 0; i < d; ++i) {
    if (p[i] < g.lo[i] - 1e-12 || p[i] > g.hi[i] + 1e-12)
      throw OutOfValidity("table interpolation: p outside the table box");
    double s = (p[i] - g.lo[i]) / g.step(i);
    int j = static_cast<int>(s);
    j = std::clamp(j, 0, g.counts[i] - 2);
    base[i] = j;
    frac[i] = std::clamp(s - j, 0.0, 1.0);
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double weight = 1.0;
    long flat = 0;
    for (int i = 0; i < d; ++i) {
      const bool up = (corner >> i) & 1;
      weight *= up ? frac[i] : 1.0 - frac[i];
      flat += strides[i] * (base[i] + (up ? 1 : 0));
    }
    acc += weight * table.values[flat];
  }
  return acc;
}

namespace {

double coercivity_fit(const EffectiveTable& table) {
  // Offset-robust growth exponent: for each axis direction, compare the
  // dyadic increments H(P) - H(P/2) and H(P/2) - H(P/4) at the largest
  // radius the box affords; additive constants in H cancel.
  const MomentumGrid& g = table.grid;
  const int d = g.dim();
  double acc = 0.0;
  int used = 0;
  for (int i = 0; i < d; ++i) {
    for (int sgn = -1; sgn <= 1; sgn += 2) {
      const double P = sgn > 0 ? g.hi[i] : -g.lo[i];
      if (!(P > 0)) continue;
      Eigen::VectorXd p1 = Eigen::VectorXd::Zero(d);
      Eigen::VectorXd p2 = p1, p4 = p1;
      p1[i] = sgn * P;
      p2[i] = sgn * P / 2.0;
      p4[i] = sgn * P / 4.0;
      const double t1 = interpolate(table, p1);
      const double t2 = interpolate(table, p2);
      const double t4 = interpolate(table, p4);
      const double inc_hi = t1 - t2;
      const double inc_lo = t2 - t4;
      if (inc_hi <= 0 || inc_lo <= 0) continue;
      acc += std::log2(inc_hi / inc_lo);
      ++used;
    }
  }
  return used > 0 ? acc / used : 0.0;
}

}  // namespace

bool PropertyReport::pass(double theta, double theta_tol) const {
  return convexity_violations.empty() && std::isfinite(lipschitz_estimate) &&
         std::abs(coercivity_fit - theta) <= theta_tol;
}

PropertyReport check_properties(const EffectiveTable& table, double tol) {
  if (table.any_failed())
    throw InvalidInput("check_properties: table must be complete on its box");
  PropertyReport report;
  const MomentumGrid& g = table.grid;
  const int d = g.dim();
  std::vector<long> strides(d, 1);
  for (int i = d - 2; i >= 0; --i) strides[i] = strides[i + 1] * g.counts[i + 1];

  // adjacent-node Lipschitz estimate
  double lip = 0.0;
  const long P = g.points();
  for (long f = 0; f < P; ++f) {
    long rem = f;
    for (int i = d - 1; i >= 0; --i) {
      const int j = static_cast<int>(rem % g.counts[i]);
      rem /= g.counts[i];
      if (j + 1 < g.counts[i])
        lip = std::max(lip, std::abs(table.values[f + strides[i]] - table.values[f]) /
                                g.step(i));
    }
  }
  report.lipschitz_estimate = lip;

  // midpoint convexity over axis-aligned pairs with on-grid midpoints
  for (long f = 0; f < P; ++f) {
    long rem = f;
    for (int i = d - 1; i >= 0; --i) {
      const int j = static_cast<int>(rem % g.counts[i]);
      rem /= g.counts[i];
      for (int k = 1; j + 2 * k < g.counts[i]; ++k) {
        const long mid = f + strides[i] * k;
        const long far = f + strides[i] * 2 * k;
        const double margin =
            table.values[mid] - 0.5 * (table.values[f] + table.values[far]);
        if (margin > tol)
          report.convexity_violations.push_back({f, far, margin - tol});
      }
    }
  }

  report.coercivity_fit = coercivity_fit(table);
  return report;
}

B0LimitResult b0_limit_table(const std::vector<Hamiltonian>& specs,
                             const std::vector<ScaleSystem>& scales,
                             const Eigen::VectorXd& x, const MomentumGrid& p_grid,
                             const std::vector<double>& schedule,
                             const TorusGrid& grid, const CellSolveOptions& opts) {
  if (specs.empty()) throw InvalidInput("b0_limit_table: empty sequence");
  if (specs.size() != scales.size())
    throw InvalidInput("b0_limit_table: one scale system per spec");
  B0LimitResult out;
  EffectiveTable prev;
  for (size_t k = 0; k < specs.size(); ++k) {
    EffectiveTable cur =
        build_table(specs[k], x, scales[k], p_grid, schedule, grid, opts);
    if (k > 0)
      out.cauchy_gaps.push_back((cur.values - prev.values).abs().maxCoeff());
    prev = std::move(cur);
  }
  out.table = std::move(prev);
  return out;
}

}  // namespace mshj
