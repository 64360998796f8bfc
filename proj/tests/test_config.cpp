#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mshj/config.hpp"

using namespace mshj;

namespace {
const char* kTwoScale = R"(
# two-scale eikonal
[hamiltonian]
family = eikonal
dim = 1
scales = 2

[potential]
kind = torus-trig
constant = 2.0
component = 1 1 1 0.5 0.0
component = 2 1 1 0.5 0.0

[scales]
gamma = 2 1 1.4142135623730951

[cell]
p = 0.0
grid = 128
lambda_min = 1e-3
tol = 1e-6

[resonance]
bound = 10000
tol = 1e-8

[output]
seed = 77
)";
}  // namespace

TEST_CASE("config: two-scale example parses into the right objects") {
  const RunConfig cfg = RunConfig::from_config(ConfigFile::parse_string(kTwoScale));
  CHECK(cfg.ham.dim == 1);
  CHECK(cfg.ham.num_scales == 2);
  CHECK(cfg.ham.theta == 1);
  CHECK(cfg.scales.gamma_values()(1, 0) == doctest::Approx(1.4142135623730951));
  CHECK(cfg.cell_grid == 128);
  CHECK(cfg.lambda_min == doctest::Approx(1e-3));
  CHECK(cfg.seed == 77);
  Eigen::VectorXd ys(2);
  ys << 0.25, 0.25;
  CHECK(cfg.ham.potential.eval_torus(ys) == doctest::Approx(3.0));
}

TEST_CASE("config: rational tokens parse as exact ratios") {
  const char* text = R"(
[hamiltonian]
dim = 1
scales = 2
[scales]
gamma = 2 1 1/2
)";
  const RunConfig cfg = RunConfig::from_config(ConfigFile::parse_string(text));
  CHECK(cfg.scales.gamma(1, 0).exact());
  CHECK(cfg.scales.gamma(1, 0).den() == 2);
}

TEST_CASE("config: unknown keys and sections are rejected with a pointer") {
  CHECK_THROWS_WITH_AS(
      RunConfig::from_config(ConfigFile::parse_string("[cell]\nlambda = 1\n")),
      doctest::Contains("lambda"), ConfigError);
  CHECK_THROWS_WITH_AS(
      RunConfig::from_config(ConfigFile::parse_string("[nonsense]\nx = 1\n")),
      doctest::Contains("nonsense"), ConfigError);
}

TEST_CASE("config: invalid numbers point at the offending key") {
  CHECK_THROWS_WITH_AS(
      RunConfig::from_config(
          ConfigFile::parse_string("[cell]\nlambda_min = -0.5\n")),
      doctest::Contains("lambda_min"), ConfigError);
  CHECK_THROWS_AS(
      RunConfig::from_config(ConfigFile::parse_string("[cell]\ntol = banana\n")),
      ConfigError);
}

TEST_CASE("config: quasi-periodic problems derive scales from the periods") {
  const char* text = R"(
[hamiltonian]
dim = 1
scales = 2
[potential]
kind = quasi-periodic
constant = 2.0
component = 1 1 1 0.5 0.0
component = 2 1 1 0.5 0.0
period = 1 1 1
period = 2 1 1.4142135623730951
)";
  const RunConfig cfg = RunConfig::from_config(ConfigFile::parse_string(text));
  CHECK(cfg.scales.gamma_values()(1, 0) ==
        doctest::Approx(1.0 / 1.4142135623730951));

  const std::string with_scales = std::string(text) + "[scales]\ngamma = 2 1 0.5\n";
  CHECK_THROWS_AS(RunConfig::from_config(ConfigFile::parse_string(with_scales)),
                  ConfigError);
}

TEST_CASE("config: compact potential and named initial data") {
  const char* text = R"(
[potential]
kind = compact
plateau = 1.0
r_v = 1.0
[homogenize]
mu = 0
horizon = 0.5
u0 = cone
eps = 1/4 1/8
)";
  const RunConfig cfg = RunConfig::from_config(ConfigFile::parse_string(text));
  CHECK(cfg.ham.potential.kind() == PotentialSpec::Kind::CompactDeformation);
  CHECK(cfg.eps_schedule.size() == 2);
  CHECK(cfg.eps_schedule[1] == doctest::Approx(0.125));
  const auto u0 = cfg.initial_datum();
  CHECK(u0(Eigen::VectorXd::Constant(1, 0.5)) == doctest::Approx(0.0));
  CHECK(u0(Eigen::VectorXd::Constant(1, 0.0)) == doctest::Approx(-0.5));
}

TEST_CASE("config: malformed lines carry the line number") {
  CHECK_THROWS_WITH_AS(ConfigFile::parse_string("[cell\n"),
                       doctest::Contains("line 1"), ConfigError);
  CHECK_THROWS_WITH_AS(ConfigFile::parse_string("[a]\nno_equals_here\n"),
                       doctest::Contains("line 2"), ConfigError);
}
