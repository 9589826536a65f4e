#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gridseed/grid.hpp"
#include "gridseed/stats.hpp"

namespace gridseed {

/// A grid together with its installed capacities and static loads (MW).
struct CaseSnapshot {
  Grid grid;
  std::map<BusId, double> gen_capacity;  // keys: exactly the Generation buses
  std::map<BusId, double> load;          // keys: exactly the Load buses

  /// Throws SchemaError when keys and bus types disagree or a value is negative.
  void validate() const;
};

struct Histogram {
  Eigen::VectorXd edges;      // bin_count + 1 ascending edges over [0, max]
  Eigen::VectorXd densities;  // integrate to 1 over the edges
};

struct ExponentialFit {
  double beta = 0.0;
  std::vector<Eigen::Index> tail_indices;  // ascending
};

struct EmpiricalReport {
  ValueAxis axis = ValueAxis::GenerationCapacity;
  Histogram pdf;
  double fitted_beta = 0.0;
  std::optional<double> pearson_rho;  // unset when fewer than 2 points or a constant vector
  ProbabilityTable joint_table;
  double tail_share = 0.0;  // MW share of the flagged tail values
  Eigen::Index sample_size = 0;
};

/// Sample Pearson correlation coefficient.
template <typename DerivedX, typename DerivedY>
double pearson_correlation(const Eigen::MatrixBase<DerivedX>& x,
                           const Eigen::MatrixBase<DerivedY>& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "pearson_correlation: length mismatch");
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::InsufficientPoints, "pearson_correlation: need at least 2 points");
  }
  const Eigen::ArrayXd xc = x.template cast<double>().array() - x.template cast<double>().mean();
  const Eigen::ArrayXd yc = y.template cast<double>().array() - y.template cast<double>().mean();
  const double sxx = xc.square().sum();
  const double syy = yc.square().sum();
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::ConstantVector, "pearson_correlation: constant input vector");
  }
  const double r = (xc * yc).sum() / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

/// Normalizes values and degrees by their maxima, bins each pair and returns
/// cell frequencies.
ProbabilityTable extract_joint_table(const Eigen::Ref<const Eigen::VectorXd>& values,
                                     const Eigen::Ref<const Eigen::VectorXi>& degrees,
                                     const BinEdges& edges = default_bin_edges(),
                                     ValueAxis axis = ValueAxis::GenerationCapacity);

/// Cell counts behind extract_joint_table().
CountMatrix joint_counts(const Eigen::Ref<const Eigen::VectorXd>& normalized_values,
                         const Eigen::Ref<const Eigen::VectorXd>& normalized_degrees,
                         const BinEdges& edges = default_bin_edges());

/// Flags the round(f n) largest values as tail; beta is the mean of the rest.
ExponentialFit fit_exponential_with_tail(const Eigen::Ref<const Eigen::VectorXd>& values,
                                         double tail_fraction);

/// Least-squares quadratic fit of log10(total) on log10(N).
ScalingLaw<double> fit_scaling_law(const std::vector<std::pair<double, double>>& points);

/// Equal-width histogram over [0, max] normalized to unit area.
Histogram empirical_pdf(const Eigen::Ref<const Eigen::VectorXd>& values, int bin_count = 50);

/// Full per-axis statistics of a reference case.
EmpiricalReport analyze_case(const CaseSnapshot& snapshot, ValueAxis axis,
                             double tail_fraction = 0.01, int bin_count = 50,
                             const BinEdges& edges = default_bin_edges());

}  // namespace gridseed
