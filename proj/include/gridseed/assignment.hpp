#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gridseed/grid.hpp"
#include "gridseed/stats.hpp"

namespace gridseed {

using BinCounts = Eigen::Matrix<int, kTableBins, 1>;

struct AssignmentOptions {
  std::uint64_t seed = 0;
  ScalingLaw<double> scaling_law = kGenerationScalingLaw;
  std::optional<double> beta;  // unset: derived from the scaling-law target
  double tail_fraction = 0.01;
  std::array<double, 2> tail_multiplier{2.0, 3.0};
  ProbabilityTable table;
  double rescale_trigger = 1.05;
  double balance_cap = 1.0;

  /// Reference generation setup: generation law, first reference table, derived beta.
  static AssignmentOptions generation_defaults(std::uint64_t seed);
  /// Reference load setup: load law, second reference table, beta = 42.51 MW.
  static AssignmentOptions load_defaults(std::uint64_t seed);

  /// Throws InvalidOptions on trigger < 1, cap outside (0, 1] or a bad value model.
  void validate() const;
};

/// Values placed on the buses of one axis.
struct Assignment {
  ValueAxis axis = ValueAxis::GenerationCapacity;
  std::vector<BusId> buses;  // ascending bus ids of the axis type
  Eigen::VectorXd mw;        // mw(i) belongs to buses[i]
  double total = 0.0;
  double law_total = 0.0;    // scaling law evaluated at N
  double target_total = 0.0; // after balance reconciliation (loads) or law_total (generation)
  bool rescaled = false;
  double beta = 0.0;
  std::vector<BusId> tail_buses;  // buses holding tail values, ascending
  CountMatrix target_counts = CountMatrix::Zero();  // value bin x degree bin slot counts
  ProbabilityTable realized_table;                  // binned actual normalized values
  std::optional<double> pearson_rho;
  std::uint64_t seed = 0;

  std::optional<double> value_at(BusId bus) const;
};

struct MatchResult {
  Eigen::VectorXd assigned;         // assigned(i) is the value placed on bus i
  std::vector<Eigen::Index> source; // source[i]: index of that value in the input
  Eigen::VectorXi degree_bin;       // per bus
  Eigen::VectorXi value_bin;        // rank bin of the slot each bus received
  CountMatrix target_counts = CountMatrix::Zero();
};

/// Multiplies every value by target/sum when sum > trigger * target.
Eigen::VectorXd rescale_if_exceeds(const Eigen::Ref<const Eigen::VectorXd>& values,
                                   double target_total, double trigger = 1.05);

/// Hamilton apportionment of n seats over probabilities p. Leftover seats go
/// to the largest fractional parts, lower bin first on ties.
BinCounts largest_remainder(int n, const BinVector& p);

/// Per-degree-bin value-bin slot counts demanded by `table`.
CountMatrix target_slot_counts(const Eigen::Ref<const Eigen::VectorXi>& degree_bin,
                               const ProbabilityTable& table);

/// Places `values` on buses with the given normalized degrees.
///
/// Each degree bin receives value-bin slots in the largest-remainder rounding
/// of its conditional distribution; the seed decides which bus of a degree
/// bin gets which slot. Slots are then filled in quantile order: values sorted
/// ascending go to slots sorted by (value bin, degree, bus index).
MatchResult match_values_to_buses(const Eigen::Ref<const Eigen::VectorXd>& values,
                                  const Eigen::Ref<const Eigen::VectorXd>& normalized_degrees,
                                  const ProbabilityTable& table, std::uint64_t seed);

/// Quantile rank bins of `values` given the global per-value-bin slot totals,
/// tabulated against degree bins. Equals target_counts for an unmodified match.
CountMatrix realized_rank_counts(const Eigen::Ref<const Eigen::VectorXd>& values,
                                 const Eigen::Ref<const Eigen::VectorXi>& degree_bin,
                                 const BinCounts& value_bin_totals);

/// min(load_target, cap * gen_total).
double reconcile_balance(double load_target, double gen_total, double cap = 1.0);

Assignment assign_generation(const Grid& grid, const AssignmentOptions& options);

/// Same pipeline as assign_generation with the target passed through
/// reconcile_balance; the final total never exceeds cap * gen_total.
Assignment assign_loads(const Grid& grid, const AssignmentOptions& options, double gen_total);

}  // namespace gridseed
