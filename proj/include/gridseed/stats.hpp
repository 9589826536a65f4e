#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gridseed/error.hpp"

namespace gridseed {

// ---------------------------------------------------------------------------
// Scaling laws
// ---------------------------------------------------------------------------

/// log10(total) = a (log10 N)^2 + b log10 N + c.
template <typename Scalar = double>
struct ScalingLaw {
  Scalar a{};
  Scalar b{};
  Scalar c{};

  template <typename Other>
  ScalingLaw<Other> cast() const {
    return {static_cast<Other>(a), static_cast<Other>(b), static_cast<Other>(c)};
  }

  friend bool operator==(const ScalingLaw&, const ScalingLaw&) = default;
};

/// Aggregate installed generation capacity vs. network size (MW).
inline constexpr ScalingLaw<double> kGenerationScalingLaw{-0.21, 2.06, 0.66};
/// Aggregate demand vs. network size (MW).
inline constexpr ScalingLaw<double> kLoadScalingLaw{-0.20, 1.98, 0.58};

/// log10 of the law's total at network size n.
template <typename Scalar>
Scalar scaling_law_log10(const ScalingLaw<Scalar>& law, Scalar n) {
  if (!(n >= Scalar(2))) {
    throw Error(ErrorCode::InvalidNetworkSize, "scaling law requires network size >= 2");
  }
  using std::log10;
  const Scalar x = log10(n);
  return (law.a * x + law.b) * x + law.c;
}

/// Aggregate MW total predicted for a network of n buses.
template <typename Scalar>
Scalar evaluate_scaling_law(const ScalingLaw<Scalar>& law, Scalar n) {
  using std::pow;
  return pow(Scalar(10), scaling_law_log10(law, n));
}

// ---------------------------------------------------------------------------
// Exponential-with-heavy-tail value model
// ---------------------------------------------------------------------------

/// Mean value of static loads in the reference system (MW).
inline constexpr double kDefaultLoadBeta = 42.51;

struct TailedExponentialModel {
  double beta = kDefaultLoadBeta;  // exponential mean, MW
  double tail_fraction = 0.01;
  std::array<double, 2> tail_multiplier{2.0, 3.0};

  /// Throws InvalidModel unless beta > 0, 0 <= tail_fraction < 1, 1 < lo <= hi.
  void validate() const;

  /// Tail cardinality for a sample of n values: max(1, round(f n)), or 0 if f = 0.
  Eigen::Index tail_count(Eigen::Index n) const;
};

struct ValueSample {
  Eigen::VectorXd values;             // MW, all positive
  std::vector<Eigen::Index> tail_indices;  // ascending
  std::uint64_t seed = 0;
  TailedExponentialModel model;
};

/// Draws n values: n - t i.i.d. Exponential(beta), plus t tail values each
/// equal to the non-tail maximum times Uniform[lo, hi]. Tail positions are
/// random. Deterministic in (n, model, seed).
///
/// When every value is a tail value (e.g. n = 1) the reference maximum is a
/// single extra exponential draw.
ValueSample sample_tailed_exponential(Eigen::Index n, const TailedExponentialModel& model,
                                      std::uint64_t seed);

/// Divides by the maximum entry; the result attains exactly 1.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> normalize_values(
    const Eigen::MatrixBase<Derived>& values) {
  if (values.size() == 0) {
    throw Error(ErrorCode::EmptyInput, "normalize_values: empty input");
  }
  const auto vmax = values.maxCoeff();
  if (!(vmax > 0)) {
    throw Error(ErrorCode::NonPositiveMax, "normalize_values: maximum is not positive");
  }
  return values.derived() / vmax;
}

// ---------------------------------------------------------------------------
// Joint probability tables
// ---------------------------------------------------------------------------

inline constexpr int kTableBins = 13;

using BinEdges = Eigen::Matrix<double, kTableBins + 1, 1>;
/// Rows index value bins, columns index degree bins, both ascending.
using JointMatrix = Eigen::Matrix<double, kTableBins, kTableBins>;
using BinVector = Eigen::Matrix<double, kTableBins, 1>;
using CountMatrix = Eigen::Matrix<int, kTableBins, kTableBins>;

/// Bin edges of the reference degree/value tables.
BinEdges default_bin_edges();

enum class ValueAxis { GenerationCapacity, Load };

std::string to_string(ValueAxis axis);

/// 13 x 13 joint PDF over (normalized value, normalized degree).
///
/// Cells always sum to 1; non-default instances come from validate_table().
class ProbabilityTable {
 public:
  /// Uniform table over the default edges.
  ProbabilityTable()
      : edges_(default_bin_edges()),
        joint_(JointMatrix::Constant(1.0 / (kTableBins * kTableBins))),
        axis_(ValueAxis::GenerationCapacity) {}

  const BinEdges& edges() const { return edges_; }
  const JointMatrix& joint() const { return joint_; }
  ValueAxis axis() const { return axis_; }

  /// P(degree bin), column sums.
  BinVector degree_marginal() const { return joint_.colwise().sum().transpose(); }
  /// P(value bin), row sums.
  BinVector value_marginal() const { return joint_.rowwise().sum(); }

 private:
  friend ProbabilityTable validate_table(const JointMatrix&, const BinEdges&, ValueAxis);
  ProbabilityTable(const JointMatrix& joint, const BinEdges& edges, ValueAxis axis)
      : edges_(edges), joint_(joint), axis_(axis) {}

  BinEdges edges_;
  JointMatrix joint_;
  ValueAxis axis_;
};

/// Accepts nonnegative cells whose sum lies in [0.98, 1.02] and rescales them
/// to sum to 1. Edges must ascend strictly from 0 to 1.
ProbabilityTable validate_table(const JointMatrix& raw, const BinEdges& edges = default_bin_edges(),
                                ValueAxis axis = ValueAxis::GenerationCapacity);

/// Bin of x in [0, 1]: half-open [e_i, e_{i+1}), last bin closed.
int bin_index(double x, const BinEdges& edges = default_bin_edges());

/// P(value bin | degree bin). Empty columns fall back to the nearest column
/// with mass, preferring the lower-degree side on ties.
BinVector conditional_value_distribution(const ProbabilityTable& table, int degree_bin);

}  // namespace gridseed
