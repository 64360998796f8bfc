#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mshj/scales.hpp"

using namespace mshj;

namespace {
ScaleSystem make_1d(std::vector<ScaleRatio> tail) {
  std::vector<std::vector<ScaleRatio>> gamma;
  gamma.push_back({ScaleRatio::one()});
  for (auto& r : tail) gamma.push_back({r});
  const int n = static_cast<int>(gamma.size());
  return ScaleSystem(1, n, std::move(gamma));
}
}  // namespace

TEST_CASE("scale ratios parse and normalize") {
  const ScaleRatio half = ScaleRatio::parse("2/4");
  CHECK(half.exact());
  CHECK(half.num() == 1);
  CHECK(half.den() == 2);
  CHECK(half.value() == doctest::Approx(0.5));
  const ScaleRatio f = ScaleRatio::parse("1.5");
  CHECK(!f.exact());
  CHECK_THROWS_AS(ScaleRatio::rational(1, 0), InvalidInput);
  CHECK_THROWS_AS(ScaleRatio::rational(0, 3), InvalidInput);
  CHECK_THROWS_AS(ScaleRatio::irrational(0.0), InvalidInput);
}

TEST_CASE("scale system enforces the gamma^1 = 1 normalization") {
  std::vector<std::vector<ScaleRatio>> bad;
  bad.push_back({ScaleRatio::rational(2, 1)});
  CHECK_THROWS_AS(ScaleSystem(1, 1, bad), InvalidInput);
}

TEST_CASE("condition A: rational ratio is resonant with its denominator witness") {
  const auto sys = make_1d({ScaleRatio::rational(1, 2)});
  const ResonanceReport report = check_condition_a(sys, 100, 0.0);
  REQUIRE(report.axes.size() == 1);
  CHECK(report.axes[0].resonant);
  CHECK(report.axes[0].decided_exactly);
  REQUIRE(report.axes[0].witness.has_value());
  CHECK(report.axes[0].witness->z[0] == 2);
  CHECK(report.axes[0].witness->m == 1);
}

TEST_CASE("condition A: sqrt(2) finds no relation up to 10^4") {
  const auto sys = make_1d({ScaleRatio::irrational(std::sqrt(2.0))});
  const ResonanceReport report = check_condition_a(sys, 10'000, 1e-8);
  CHECK(!report.any_resonant());

  // independent exhaustive re-check at the same bound
  const double g = std::sqrt(2.0);
  bool found = false;
  for (int z = 1; z <= 10'000; ++z) {
    const double s = g * z;
    if (std::abs(s - std::round(s)) <= 1e-8) found = true;
  }
  CHECK(!found);
}

TEST_CASE("condition A: constructed three-scale relation gamma^2 - gamma^3 = -3") {
  const auto sys = make_1d({ScaleRatio::irrational(std::sqrt(2.0)),
                            ScaleRatio::irrational(std::sqrt(2.0) + 3.0)});
  const ResonanceReport report = check_condition_a(sys, 50, 1e-8);
  REQUIRE(report.axes.size() == 1);
  CHECK(report.axes[0].resonant);
  REQUIRE(report.axes[0].witness.has_value());
  const auto& w = *report.axes[0].witness;
  CHECK(w.z[0] == 1);
  CHECK(w.z[1] == -1);
  CHECK(w.m == -3);
  // every witness re-verifies
  const double s = std::sqrt(2.0) * w.z[0] + (std::sqrt(2.0) + 3.0) * w.z[1];
  CHECK(std::abs(s - double(w.m)) <= 1e-8);
}

TEST_CASE("condition A: exact and floating paths agree on rational input") {
  const auto sys = make_1d({ScaleRatio::rational(3, 7)});
  const auto exact = check_condition_a(sys, 100, 0.0);
  const auto sys_f = make_1d({ScaleRatio::irrational(3.0 / 7.0)});
  const auto floating = check_condition_a(sys_f, 100, 1.0 / 28.0);
  CHECK(exact.any_resonant() == floating.any_resonant());
}

TEST_CASE("condition A: budget guard throws with a budget-exceeded error") {
  const auto sys = make_1d({ScaleRatio::irrational(std::sqrt(2.0)),
                            ScaleRatio::irrational(std::sqrt(3.0))});
  CHECK_THROWS_AS(check_condition_a(sys, 100'000, 1e-12, 1000), BudgetExceeded);
}

TEST_CASE("orbit gap: two-point rational orbit") {
  Eigen::VectorXd omega(1);
  omega << 0.5;
  const OrbitStats stats = orbit_gap(omega, 100);
  CHECK(stats.max_gap == doctest::Approx(0.5));
  CHECK(stats.covering_radius == doctest::Approx(0.25));
}

TEST_CASE("orbit gap: golden-ratio orbit equidistributes") {
  Eigen::VectorXd omega(1);
  omega << 0.6180339887498949;
  const OrbitStats stats = orbit_gap(omega, 1000);
  CHECK(stats.covering_radius <= 3.0 / 1000);
}

TEST_CASE("orbit gap: covering radius weakly decreases in K (1D)") {
  Eigen::VectorXd omega(1);
  omega << 0.6180339887498949;
  double prev = 1.0;
  for (int K : {10, 20, 40, 80, 160, 320}) {
    const OrbitStats stats = orbit_gap(omega, K);
    CHECK(stats.covering_radius <= prev + 1e-15);
    prev = stats.covering_radius;
  }
}

TEST_CASE("orbit gap: resonant 1-axis orbit has exactly q points") {
  // gamma = p/q in lowest terms: covering radius exactly 1/(2q)
  Eigen::VectorXd omega(1);
  omega << 3.0 / 8.0;
  const OrbitStats stats = orbit_gap(omega, 1000);
  CHECK(stats.covering_radius == doctest::Approx(1.0 / 16).epsilon(1e-9));
}

TEST_CASE("orbit gap: rational axis in 2D keeps a wide covering radius") {
  Eigen::VectorXd omega(2);
  omega << 1.0 / 3.0, 0.7548776662466927;
  const OrbitStats stats = orbit_gap(omega, 300);
  CHECK(stats.covering_radius >= 1.0 / 6.0);
}

TEST_CASE("realize_epsilon is the constant-ratio realization") {
  const auto sys = make_1d({ScaleRatio::rational(2, 1)});
  const Eigen::MatrixXd eps = realize_epsilon(sys, 0.1);
  CHECK(eps(0, 0) == doctest::Approx(0.1));
  CHECK(eps(1, 0) == doctest::Approx(0.05));

  const auto sys2 = make_1d({ScaleRatio::irrational(std::sqrt(2.0))});
  const Eigen::MatrixXd eps2 = realize_epsilon(sys2, 1.0 / 16.0);
  CHECK(eps2(1, 0) == doctest::Approx(0.04419417382415922).epsilon(1e-12));
}
