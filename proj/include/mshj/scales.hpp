#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mshj/errors.hpp"

namespace mshj {

/// One scale ratio gamma^n_i: either an exact rational p/q or a floating
/// value tagged as an irrational candidate.
class ScaleRatio {
 public:
  static ScaleRatio rational(std::int64_t num, std::int64_t den);
  static ScaleRatio irrational(double value);
  static ScaleRatio one() { return rational(1, 1); }

  bool exact() const { return exact_; }
  double value() const { return value_; }
  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  /// Parses "p/q" as an exact rational, anything else as a decimal float.
  static ScaleRatio parse(const std::string& text);
  std::string str() const;

 private:
  ScaleRatio() = default;
  bool exact_ = false;
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  double value_ = 0.0;
};

/// The N x d family of diagonal scale matrices Gamma^n = diag(gamma^n_i).
/// Row 0 is the reference scale and is pinned to 1 on every axis.
class ScaleSystem {
 public:
  /// `gamma` is indexed [scale n][axis i], n = 0..N-1, i = 0..d-1.
  ScaleSystem(int dim, int num_scales, std::vector<std::vector<ScaleRatio>> gamma);

  /// Single-scale system (N = 1, all ratios 1).
  static ScaleSystem identity(int dim);

  int dim() const { return dim_; }
  int num_scales() const { return num_scales_; }
  const ScaleRatio& gamma(int scale, int axis) const { return gamma_[scale][axis]; }

  /// All ratios as a dense N x d matrix.
  const Eigen::MatrixXd& gamma_values() const { return values_; }

 private:
  int dim_;
  int num_scales_;
  std::vector<std::vector<ScaleRatio>> gamma_;
  Eigen::MatrixXd values_;
};

struct ResonanceWitness {
  Eigen::VectorXi z;  // (z^2, ..., z^N), not all zero
  std::int64_t m = 0;
};

struct AxisResonance {
  bool resonant = false;
  bool decided_exactly = false;
  std::optional<ResonanceWitness> witness;
};

struct ResonanceReport {
  std::vector<AxisResonance> axes;
  std::int64_t search_bound = 0;
  double tol = 0.0;
  std::string interpretation_note;

  bool any_resonant() const {
    for (const auto& a : axes)
      if (a.resonant) return true;
    return false;
  }
};

/// Searches, per axis i, for a nonzero integer tuple (z^2..z^N) with
/// sum_n gamma^n_i z^n within `tol` of an integer.  Axes carrying an exact
/// rational ratio are decided exactly regardless of the bound.  The trivial
/// family (z^1 arbitrary, z^n = 0 for n >= 2) is excluded: the operative
/// condition is rational independence of {1} and {gamma^n_i : n >= 2}.
ResonanceReport check_condition_a(const ScaleSystem& scales, std::int64_t bound,
                                  double tol,
                                  std::int64_t tuple_budget = 50'000'000);

struct OrbitStats {
  int iterations = 0;
  double covering_radius = 0.0;
  double max_gap = 0.0;  // meaningful in 1D only
};

/// Statistics of the rotation orbit {k*omega mod 1 : 0 <= k < K} on T^M.
/// In 1D the covering radius is exact (half the largest circular gap); in
/// higher dimensions it is estimated from bucket occupancy on a grid of
/// side ceil(K^(1/M)).
OrbitStats orbit_gap(const Eigen::VectorXd& omega, int iterations);

/// Constant-ratio realization eps^n_i = eps1 / gamma^n_i of the scale limit.
Eigen::MatrixXd realize_epsilon(const ScaleSystem& scales, double eps1);

}  // namespace mshj
