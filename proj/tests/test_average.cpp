#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mshj/average.hpp"

using namespace mshj;
using Eigen::VectorXd;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

VectorXd vec1(double v) { return VectorXd::Constant(1, v); }

ControlHamiltonianSpec drift_only_1d(std::vector<double> alphas, double cost_const) {
  ControlHamiltonianSpec spec;
  spec.dim = 1;
  spec.num_scales = 1;
  std::vector<VectorXd> samples;
  for (double a : alphas) samples.push_back(vec1(a));
  spec.controls = ControlSet::enumerated(samples);
  spec.drift = [](const VectorXd&, const VectorXd&, const VectorXd& a) { return a; };
  spec.cost = [cost_const](const VectorXd&, const VectorXd&, const VectorXd&) {
    return cost_const;
  };
  spec.sup_drift = 1.0;
  spec.sup_cost = std::abs(cost_const);
  return spec;
}
}  // namespace

TEST_CASE("constant-control optimum: b = alpha, g = 0, p = 1 gives -1") {
  const auto spec = drift_only_1d({-1.0, 1.0}, 0.0);
  const double value =
      discounted_value(spec, vec1(0.0), vec1(1.0), vec1(0.0),
                       ScaleSystem::identity(1), 0.01, PolicySource::ConstantControls,
                       0.005, 1600.0);
  CHECK(value == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("constant cost: every policy returns c0") {
  const auto spec = drift_only_1d({-1.0, 0.0, 1.0}, 0.9);
  const double value =
      discounted_value(spec, vec1(0.0), vec1(0.0), vec1(0.3),
                       ScaleSystem::identity(1), 0.01, PolicySource::ConstantControls,
                       0.005, 1600.0);
  CHECK(value == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("rest-at-minimum matches the cell value for the 1D eikonal") {
  ControlHamiltonianSpec spec;
  spec.dim = 1;
  spec.num_scales = 1;
  spec.controls = ControlSet::enumerated({vec1(0.0)});
  spec.drift = [](const VectorXd&, const VectorXd&, const VectorXd& a) { return a; };
  spec.cost = [](const VectorXd&, const VectorXd& ys, const VectorXd&) {
    return 2.0 + std::sin(kTwoPi * ys[0]);
  };
  spec.sup_drift = 1.0;
  spec.sup_cost = 3.0;
  // rest trajectory at y0: discounted average of V(y0); minimum sits at 3/4
  const double at_min =
      discounted_value(spec, vec1(0.0), vec1(0.0), vec1(0.75),
                       ScaleSystem::identity(1), 0.01, PolicySource::ConstantControls,
                       0.005, 1000.0);
  CHECK(at_min == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("stability precondition and discount-tail precondition are enforced") {
  const auto spec = drift_only_1d({1.0}, 0.0);
  CHECK_THROWS_AS(
      discounted_value(spec, vec1(0.0), vec1(0.0), vec1(0.0),
                       ScaleSystem::identity(1), 0.01, PolicySource::ConstantControls,
                       0.005, 10.0),
      InvalidInput);  // lambda T < 5
  CHECK_THROWS_AS(
      discounted_value(spec, vec1(0.0), vec1(0.0), vec1(0.0),
                       ScaleSystem::identity(1), 0.01, PolicySource::ConstantControls,
                       5.0, 1600.0),
      InvalidInput);  // unstable dt
}

TEST_CASE("payoff bound |value| <= sup|g| + |p| sup|b| for every policy") {
  const auto spec = drift_only_1d({-1.0, 0.3, 1.0}, 0.7);
  for (int k = 0; k < spec.controls.size(); ++k) {
    const TrajectoryRun run =
        run_constant_policy(spec, vec1(0.0), vec1(2.0), vec1(0.1),
                            ScaleSystem::identity(1), 0.02, k, 0.01, 400.0);
    CHECK(std::abs(run.discounted_payoff) <= 0.7 + 2.0 * 1.0 + 1e-9);
  }
}

TEST_CASE("ray averages: constants, the compact well, and a full period") {
  const PotentialSpec one = PotentialSpec::compact_deformation(1, 0.0, 1.0, 0.0);
  CHECK(ray_average(one, vec1(0.0), vec1(0.0), vec1(1.0), 10.0, 0.01) ==
        doctest::Approx(1.0));

  const PotentialSpec well = PotentialSpec::compact_deformation(1, 0.0, 1.0, 1.0);
  CHECK(ray_average(well, vec1(0.0), vec1(0.0), vec1(1.0), 100.0, 1e-3) ==
        doctest::Approx(0.995).epsilon(1e-5));

  const PotentialSpec trig = PotentialSpec::quasi_periodic(
      1, 1, 2.0, {{0, 0, 1, 1.0, 0.0}}, {{ScaleRatio::one()}});
  CHECK(std::abs(ray_average(trig, vec1(0.0), vec1(0.2), vec1(1.0), 1000.0, 1e-3) -
                 2.0) <= 1e-3);
}

TEST_CASE("ray_average requires a unit direction") {
  const PotentialSpec one = PotentialSpec::compact_deformation(1, 0.0, 1.0, 0.0);
  CHECK_THROWS_AS(ray_average(one, vec1(0.0), vec1(0.0), vec1(2.0), 1.0, 0.01),
                  InvalidInput);
}

TEST_CASE("ray_average is linear in the potential") {
  const PotentialSpec a = PotentialSpec::quasi_periodic(
      1, 1, 0.3, {{0, 0, 1, 0.7, 0.1}}, {{ScaleRatio::one()}});
  const PotentialSpec b = PotentialSpec::quasi_periodic(
      1, 1, -0.2, {{0, 0, 2, 0.4, 0.9}}, {{ScaleRatio::one()}});
  const PotentialSpec sum = PotentialSpec::quasi_periodic(
      1, 1, 0.1, {{0, 0, 1, 0.7, 0.1}, {0, 0, 2, 0.4, 0.9}}, {{ScaleRatio::one()}});
  const double ra = ray_average(a, vec1(0.0), vec1(0.4), vec1(1.0), 37.0, 1e-3);
  const double rb = ray_average(b, vec1(0.0), vec1(0.4), vec1(1.0), 37.0, 1e-3);
  const double rs = ray_average(sum, vec1(0.0), vec1(0.4), vec1(1.0), 37.0, 1e-3);
  CHECK(rs == doctest::Approx(ra + rb).epsilon(1e-12));
}

TEST_CASE("b1 certificate: constants, the compact well, and a periodic failure") {
  // constant potential: zero deviation
  const PotentialSpec c0 = PotentialSpec::compact_deformation(1, 0.0, 0.8, 0.0);
  const RayAverageReport rc = b1_certificate(
      c0, vec1(0.0), {vec1(0.0), vec1(3.0)}, {vec1(1.0), vec1(-1.0)},
      {100.0, 1000.0}, 0.01, vec1(0.0));
  CHECK(rc.c_estimate == doctest::Approx(0.8));
  CHECK(rc.max_deviation <= 1e-12);
  CHECK(rc.margin <= 1e-12);

  // compact well: common limit 1 with deficit at most ~1/T
  const PotentialSpec well = PotentialSpec::compact_deformation(1, 0.0, 1.0, 1.0);
  const RayAverageReport rw = b1_certificate(
      well, vec1(0.0), {vec1(0.0), vec1(2.0)}, {vec1(1.0), vec1(-1.0)},
      {100.0, 1000.0}, 0.01, vec1(0.0));
  CHECK(std::abs(rw.c_estimate - 1.0) <= 2.0 / 1000.0);
  CHECK(rw.max_deviation <= 2.0 / 1000.0);

  // genuinely periodic potential: rays along and across the oscillation
  // disagree, so the deviation stays bounded away from zero
  const PotentialSpec per = PotentialSpec::quasi_periodic(
      2, 1, 0.0, {{0, 0, 1, 1.0, 0.0}},
      {{ScaleRatio::one(), ScaleRatio::one()}});
  Eigen::VectorXd y0(2), z_axis(2), z_perp(2), z_mix(2);
  y0 << 0.25, 0.0;
  z_axis << 1.0, 0.0;
  z_perp << 0.0, 1.0;
  z_mix << 1.0 / std::sqrt(3.0), std::sqrt(2.0 / 3.0);
  const RayAverageReport rp =
      b1_certificate(per, Eigen::VectorXd::Zero(2), {y0}, {z_axis, z_perp, z_mix},
                     {200.0, 2000.0}, 1e-3, Eigen::VectorXd::Zero(2));
  CHECK(rp.max_deviation >= 0.3);
}
