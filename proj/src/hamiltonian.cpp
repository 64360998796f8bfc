#include "mshj/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

namespace mshj {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;

// Deterministic low-discrepancy sequence (additive recurrence on the
// plastic-constant powers); used for probe sampling.
Eigen::VectorXd recurrence_point(int k, int dim) {
  // generalized golden ratio for `dim` dimensions
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
}  // namespace

ControlSet ControlSet::enumerated(std::vector<Eigen::VectorXd> samples) {
  if (samples.empty()) throw InvalidInput("control set: must be non-empty");
  const int dim = static_cast<int>(samples.front().size());
  for (const auto& a : samples)
    if (a.size() != dim) throw InvalidInput("control set: mixed sample dimensions");
  ControlSet s;
  s.tag_ = Tag::Enumerated;
  s.dim_ = dim;
  s.samples_ = std::move(samples);
  return s;
}

ControlSet ControlSet::unit_ball_directions(int dim, int count) {
  if (dim < 1) throw InvalidInput("control set: dim must be positive");
  std::vector<Eigen::VectorXd> samples;
  if (dim == 1) {
    samples.push_back(Eigen::VectorXd::Constant(1, -1.0));
    samples.push_back(Eigen::VectorXd::Constant(1, +1.0));
  } else if (dim == 2) {
    if (count < 3) throw InvalidInput("control set: need >= 3 directions in 2D");
    for (int j = 0; j < count; ++j) {
      const double th = 2.0 * kPi * j / count;
      Eigen::VectorXd a(2);
      a << std::cos(th), std::sin(th);
      samples.push_back(a);
    }
  } else {
    if (count < dim + 1) throw InvalidInput("control set: too few directions");
    // Fibonacci-style deterministic directions on the sphere.
    for (int j = 0; j < count; ++j) {
      Eigen::VectorXd u = recurrence_point(j, dim);
      Eigen::VectorXd a(dim);
      for (int i = 0; i < dim; ++i) a[i] = std::cos(2.0 * kPi * u[i]);
      const double n = a.norm();
      if (n < 1e-12) continue;
      samples.push_back(a / n);
    }
  }
  ControlSet s;
  s.tag_ = Tag::UnitBallDirections;
  s.dim_ = dim;
  s.samples_ = std::move(samples);
  for (const auto& a : s.samples_)
    if (a.norm() > 1.0 + 1e-12)
      throw InvalidInput("control set: direction sample outside the unit ball");
  return s;
}

ControlSet ControlSet::box_grid(int dim, double radius, int per_axis) {
  if (dim < 1 || per_axis < 2 || !(radius > 0))
    throw InvalidInput("control set: bad box grid parameters");
  const double step = 2.0 * radius / (per_axis - 1);
  std::vector<Eigen::VectorXd> samples;
  std::vector<int> idx(dim, 0);
  while (true) {
    Eigen::VectorXd a(dim);
    for (int j = 0; j < dim; ++j) a[j] = -radius + step * idx[j];
    samples.push_back(a);
    int pos = dim - 1;
    while (pos >= 0 && ++idx[pos] == per_axis) idx[pos--] = 0;
    if (pos < 0) break;
  }
  ControlSet s;
  s.tag_ = Tag::BoxGrid;
  s.dim_ = dim;
  s.grid_step_ = step;
  s.samples_ = std::move(samples);
  return s;
}

int ham_dim(const Hamiltonian& ham) {
  return std::visit([](const auto& h) { return h.dim; }, ham);
}

int ham_num_scales(const Hamiltonian& ham) {
  return std::visit([](const auto& h) { return h.num_scales; }, ham);
}

double ham_value_bound(const Hamiltonian& ham, const Eigen::VectorXd& p) {
  if (const auto* c = std::get_if<ControlHamiltonianSpec>(&ham))
    return c->sup_cost + p.norm() * c->sup_drift;
  const auto& cf = std::get<ClosedFormSpec>(ham);
  return cf.a_sup * std::pow(p.norm(), cf.theta) + cf.potential.sup_abs();
}

namespace {

void check_fast_sizes(int dim, int num_scales, bool physical,
                      const Eigen::VectorXd& ys) {
  const Eigen::Index want = physical ? dim : static_cast<Eigen::Index>(dim) * num_scales;
  if (ys.size() != want)
    throw InvalidInput("hamiltonian: fast variable has wrong length");
}

double closed_value(const ClosedFormSpec& spec, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& ys, const Eigen::VectorXd& p) {
  const bool physical = spec.potential.kind() != PotentialSpec::Kind::TorusTrig;
  check_fast_sizes(spec.dim, spec.num_scales, physical, ys);
  if (p.size() != spec.dim) throw InvalidInput("hamiltonian: p has wrong length");
  const double v = physical ? spec.potential.eval_physical(ys) : spec.potential.eval_torus(ys);
  const double a = spec.coeff(x, ys);
  const double pn = p.norm();
  return a * (spec.theta == 1 ? pn : pn * pn) - v;
}

}  // namespace

double eval_hamiltonian(const Hamiltonian& ham, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& ys, const Eigen::VectorXd& p) {
  if (const auto* cf = std::get_if<ClosedFormSpec>(&ham))
    return closed_value(*cf, x, ys, p);
  const auto& spec = std::get<ControlHamiltonianSpec>(ham);
  check_fast_sizes(spec.dim, spec.num_scales, spec.physical_fast, ys);
  if (p.size() != spec.dim) throw InvalidInput("hamiltonian: p has wrong length");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& a : spec.controls.samples()) {
    const double val = -spec.drift(x, ys, a).dot(p) - spec.cost(x, ys, a);
    if (val > best) best = val;  // strict: first maximizer wins ties
  }
  return best;
}

int argmax_control(const ControlHamiltonianSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& ys, const Eigen::VectorXd& p) {
  double best = -std::numeric_limits<double>::infinity();
  int arg = 0;
  for (int k = 0; k < spec.controls.size(); ++k) {
    const auto& a = spec.controls[k];
    const double val = -spec.drift(x, ys, a).dot(p) - spec.cost(x, ys, a);
    if (val > best) {
      best = val;
      arg = k;
    }
  }
  return arg;
}

MomentumBox MomentumBox::cube(int dim, double radius) {
  MomentumBox b;
  b.lo = Eigen::VectorXd::Constant(dim, -radius);
  b.hi = Eigen::VectorXd::Constant(dim, radius);
  return b;
}

bool MomentumBox::contains(const Eigen::VectorXd& p) const {
  constexpr double slack = 1e-12;
  return (p.array() >= lo.array() - slack).all() && (p.array() <= hi.array() + slack).all();
}

double MomentumBox::sup_norm2() const {
  return lo.array().square().max(hi.array().square()).sum() > 0
             ? std::sqrt(lo.array().square().max(hi.array().square()).sum())
             : 0.0;
}

ClosedToControlResult closed_to_control(const ClosedFormSpec& spec,
                                        const MomentumBox& p_box, int directions,
                                        int grid_per_axis) {
  if (p_box.lo.size() != spec.dim || p_box.hi.size() != spec.dim)
    throw InvalidInput("closed_to_control: p_box dimension mismatch");
  if (!p_box.lo.allFinite() || !p_box.hi.allFinite())
    throw InvalidInput("closed_to_control: p_box must be bounded");
  const double pmax = p_box.sup_norm2();
  const bool physical = spec.potential.kind() != PotentialSpec::Kind::TorusTrig;
  const PotentialSpec pot = spec.potential;
  const auto coeff = spec.coeff_a;

  ClosedToControlResult out;
  out.spec.dim = spec.dim;
  out.spec.num_scales = spec.num_scales;
  out.spec.physical_fast = physical;

  const auto pot_value = [pot, physical](const Eigen::VectorXd& ys) {
    return physical ? pot.eval_physical(ys) : pot.eval_torus(ys);
  };

  if (spec.theta == 1) {
    out.spec.controls = ControlSet::unit_ball_directions(spec.dim, directions);
    out.spec.drift = [coeff](const Eigen::VectorXd& x, const Eigen::VectorXd& ys,
                             const Eigen::VectorXd& a) -> Eigen::VectorXd {
      return (coeff ? coeff(x, ys) : 1.0) * a;
    };
    out.spec.cost = [pot_value](const Eigen::VectorXd&, const Eigen::VectorXd& ys,
                                const Eigen::VectorXd&) { return pot_value(ys); };
    out.spec.sup_drift = spec.a_sup;
    out.spec.sup_cost = spec.potential.sup_abs();
    if (spec.dim == 1) {
      out.error_bound = 0.0;  // sup over {-1,+1} equals |p| exactly
    } else {
      // covering angle of the direction sample, probed deterministically
      double worst = 0.0;
      for (int k = 0; k < 512; ++k) {
        Eigen::VectorXd u = recurrence_point(k, spec.dim);
        Eigen::VectorXd dir(spec.dim);
        for (int i = 0; i < spec.dim; ++i) dir[i] = std::cos(2.0 * kPi * u[i]);
        if (dir.norm() < 1e-12) continue;
        dir.normalize();
        double best = -1.0;
        for (const auto& a : out.spec.controls.samples())
          best = std::max(best, a.dot(dir));
        worst = std::max(worst, 1.0 - best);
      }
      if (spec.dim == 2) worst = 1.0 - std::cos(kPi / out.spec.controls.size());
      out.error_bound = spec.a_sup * pmax * worst;
    }
  } else {
    const double radius = 2.0 * spec.a_sup * pmax + 1e-9;
    out.spec.controls = ControlSet::box_grid(spec.dim, radius, grid_per_axis);
    const double a0 = spec.a0;
    out.spec.drift = [](const Eigen::VectorXd&, const Eigen::VectorXd&,
                        const Eigen::VectorXd& a) -> Eigen::VectorXd { return a; };
    out.spec.cost = [pot_value, coeff, a0](const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& ys,
                                           const Eigen::VectorXd& a) {
      const double av = coeff ? coeff(x, ys) : 1.0;
      return a.squaredNorm() / (4.0 * av) + pot_value(ys);
    };
    const double step = out.spec.controls.grid_step();
    out.error_bound = spec.dim * step * step / (16.0 * spec.a0);
    out.spec.sup_drift = radius * std::sqrt(double(spec.dim));
    out.spec.sup_cost =
        spec.potential.sup_abs() + radius * radius * spec.dim / (4.0 * spec.a0);
  }
  // Fast-variable Lipschitz bound from the potential coefficients.
  double pot_lip = 0.0;
  for (const auto& c : spec.potential.components()) {
    double period = 1.0;
    if (spec.potential.kind() == PotentialSpec::Kind::QuasiPeriodic)
      period = spec.potential.period_value(c.scale, c.axis);
    pot_lip += std::abs(c.amplitude) * 2.0 * kPi * c.frequency / period;
  }
  if (spec.potential.kind() == PotentialSpec::Kind::CompactDeformation &&
      spec.potential.r_v() > 0)
    pot_lip += std::abs(spec.potential.plateau()) / spec.potential.r_v();
  out.spec.lipschitz = [pot_lip](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return std::max(pot_lip, 1e-12);
  };
  return out;
}

NumericalHamiltonianParams estimate_dissipation(const Hamiltonian& ham,
                                                const Eigen::VectorXd& x,
                                                const MomentumBox& p_box,
                                                int y_samples, int p_samples,
                                                double safety) {
  const int d = ham_dim(ham);
  const int N = ham_num_scales(ham);
  if (p_box.lo.size() != d) throw InvalidInput("estimate_dissipation: box dim mismatch");

  bool physical = false;
  if (const auto* cf = std::get_if<ClosedFormSpec>(&ham))
    physical = cf->potential.kind() != PotentialSpec::Kind::TorusTrig;
  const int fast_dim = physical ? d : d * N;

  // fast-variable probe points
  std::vector<Eigen::VectorXd> ys_probes;
  for (int k = 0; k < y_samples; ++k) {
    Eigen::VectorXd u = recurrence_point(k, fast_dim);
    if (physical) u = 8.0 * (u.array() - 0.5).matrix();  // cover [-4,4]^d
    ys_probes.push_back(u);
  }

  // momentum probe points: box corners, axis lines, recurrence fill
  std::vector<Eigen::VectorXd> p_probes;
  const Eigen::VectorXd mid = 0.5 * (p_box.lo + p_box.hi);
  if (d <= 8) {
    for (int mask = 0; mask < (1 << d); ++mask) {
      Eigen::VectorXd c(d);
      for (int i = 0; i < d; ++i) c[i] = (mask >> i) & 1 ? p_box.hi[i] : p_box.lo[i];
      p_probes.push_back(c);
    }
  }
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < p_samples; ++k) {
      Eigen::VectorXd c = mid;
      c[i] = p_box.lo[i] + (p_box.hi[i] - p_box.lo[i]) * k / std::max(1, p_samples - 1);
      p_probes.push_back(c);
    }
  }
  for (int k = 0; k < p_samples; ++k) {
    Eigen::VectorXd u = recurrence_point(k, d);
    p_probes.push_back(p_box.lo + (p_box.hi - p_box.lo).cwiseProduct(u));
  }

  Eigen::VectorXd sigma = Eigen::VectorXd::Zero(d);
  const Eigen::VectorXd width = p_box.hi - p_box.lo;
  for (const auto& ys : ys_probes) {
    for (const auto& p : p_probes) {
      for (int i = 0; i < d; ++i) {
        const double step = std::max(1e-6, 1e-4 * width[i]);
        Eigen::VectorXd pp = p, pm = p;
        pp[i] += step;
        pm[i] -= step;
        const double der = (eval_hamiltonian(ham, x, ys, pp) -
                            eval_hamiltonian(ham, x, ys, pm)) /
                           (2.0 * step);
        sigma[i] = std::max(sigma[i], std::abs(der));
      }
    }
  }

  // analytic floors where the form gives them outright
  if (const auto* cf = std::get_if<ClosedFormSpec>(&ham)) {
    double amax = cf->a_sup;
    for (const auto& ys : ys_probes) amax = std::max(amax, cf->coeff(x, ys));
    if (cf->theta == 1) {
      sigma = sigma.cwiseMax(amax);
    } else {
      const double qmax = p_box.lo.cwiseAbs().cwiseMax(p_box.hi.cwiseAbs()).maxCoeff();
      sigma = sigma.cwiseMax(2.0 * amax * qmax);
    }
  } else {
    const auto& spec = std::get<ControlHamiltonianSpec>(ham);
    Eigen::VectorXd bmax = Eigen::VectorXd::Zero(d);
    for (const auto& ys : ys_probes)
      for (const auto& a : spec.controls.samples())
        bmax = bmax.cwiseMax(spec.drift(x, ys, a).cwiseAbs());
    sigma = sigma.cwiseMax(bmax);
  }

  NumericalHamiltonianParams params;
  params.sigma = safety * sigma;
  params.p_box = p_box;
  return params;
}

double lf_numerical_hamiltonian(const Hamiltonian& ham,
                                const NumericalHamiltonianParams& params,
                                const Eigen::VectorXd& x, const Eigen::VectorXd& ys,
                                const Eigen::VectorXd& p_minus,
                                const Eigen::VectorXd& p_plus) {
  if (!params.p_box.contains(p_minus) || !params.p_box.contains(p_plus))
    throw OutOfValidity("lf flux: one-sided argument outside the certified p-box");
  const Eigen::VectorXd mid = 0.5 * (p_minus + p_plus);
  double value = eval_hamiltonian(ham, x, ys, mid);
  value -= 0.5 * params.sigma.dot(p_plus - p_minus);
  return value;
}

LiftResult lift_quasi_periodic(const ClosedFormSpec& spec) {
  if (spec.potential.kind() != PotentialSpec::Kind::QuasiPeriodic)
    throw InvalidInput("lift: spec must carry a quasi-periodic potential");
  const int d = spec.dim;
  const int N = spec.num_scales;
  const auto& periods = spec.potential.periods();
  for (int i = 0; i < d; ++i)
    if (std::abs(periods[0][i].value() - 1.0) > 1e-14)
      throw InvalidInput("lift: first-component periods must be normalized to 1");

  std::vector<std::vector<ScaleRatio>> gamma(N, std::vector<ScaleRatio>(d, ScaleRatio::one()));
  for (int n = 0; n < N; ++n)
    for (int i = 0; i < d; ++i) {
      const ScaleRatio& t = periods[n][i];
      gamma[n][i] = t.exact() ? ScaleRatio::rational(t.den(), t.num())
                              : ScaleRatio::irrational(1.0 / t.value());
    }
  // ensure exact ones on the first row
  for (int i = 0; i < d; ++i) gamma[0][i] = ScaleRatio::one();

  LiftResult out{spec, ScaleSystem(d, N, std::move(gamma))};
  // components keep (scale, axis, frequency, amplitude, phase): rescaling each
  // factor by its own period makes every term exactly 1-periodic.
  out.lifted.potential = PotentialSpec::torus_trig(d, N, spec.potential.constant(),
                                                   spec.potential.components());
  if (spec.coeff_a) {
    auto base = spec.coeff_a;
    const int dd = d;
    // a may depend on the fast variable only through the 1-periodic first
    // factor, which the lift leaves untouched.
    out.lifted.coeff_a = [base, dd](const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& ys) {
      return base(x, ys.head(dd));
    };
  }
  return out;
}

void spot_check_spec(const ControlHamiltonianSpec& spec, const Eigen::VectorXd& x,
                     int samples) {
  const int fast_dim = spec.physical_fast ? spec.dim : spec.dim * spec.num_scales;
  for (int k = 0; k < samples; ++k) {
    Eigen::VectorXd ys = recurrence_point(k, fast_dim);
    const auto& a = spec.controls[k % spec.controls.size()];
    const Eigen::VectorXd b0 = spec.drift(x, ys, a);
    const double g0 = spec.cost(x, ys, a);
    for (int axis = 0; axis < fast_dim && !spec.physical_fast; ++axis) {
      Eigen::VectorXd shifted = ys;
      shifted[axis] += 1.0;
      if ((spec.drift(x, shifted, a) - b0).norm() > 1e-9 ||
          std::abs(spec.cost(x, shifted, a) - g0) > 1e-9)
        throw InvalidInput("spec contract: drift/cost not 1-periodic in the fast variable");
    }
    if (spec.lipschitz) {
      const double L = spec.lipschitz(x, a);
      Eigen::VectorXd other = recurrence_point(k + samples, fast_dim);
      const double lhs = std::abs(spec.cost(x, other, a) - g0);
      if (lhs > L * (other - ys).norm() + 1e-9)
        throw InvalidInput("spec contract: sampled Lipschitz bound violated");
    }
  }
}

}  // namespace mshj
