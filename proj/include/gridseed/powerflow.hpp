#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gridseed/assignment.hpp"
#include "gridseed/empirical.hpp"
#include "gridseed/grid.hpp"
#include "gridseed/stats.hpp"

namespace gridseed {

/// Net real-power injection per bus (MW). Connection buses inject exactly 0.
struct InjectionVector {
  Eigen::VectorXd p;
};

/// Builds injections from per-bus generation dispatch and load (both keyed by bus).
/// Throws SchemaError if a Connection bus would carry a nonzero injection.
InjectionVector make_injections(const Grid& grid, const std::map<BusId, double>& generation,
                                const std::map<BusId, double>& load);

struct FlowSolution {
  Eigen::VectorXd theta;  // rad, theta(slack) == 0
  Eigen::VectorXd flows;  // MW per branch, positive from -> to
  BusId slack_bus = 0;
  double slack_injection = 0.0;  // injection used at the slack after absorbing the residual
  double relative_residual = 0.0;
};

/// Solves B' theta = P on the slack-reduced system and F = diag(1/x) A theta.
///
/// The slack injection is replaced by minus the sum of all other injections.
/// Branches without reactance use `default_reactance` (1.0 p.u. by default).
FlowSolution dc_power_flow(const Grid& grid, const InjectionVector& injections, BusId slack,
                           std::optional<double> default_reactance = 1.0);

/// Largest |A^T F - P| entry, with P taken after slack absorption.
double nodal_imbalance(const Grid& grid, const InjectionVector& injections,
                       const FlowSolution& solution);

/// Generation bus with the largest capacity, lowest id on ties.
BusId default_slack(const Assignment& generation);

/// Proportional-to-capacity dispatch meeting the given total demand.
std::map<BusId, double> proportional_dispatch(const Assignment& generation, double total_load);

struct OperatingLimits {
  double pg_min = 0.0;  // applies to every generation bus
  double pl_min = 0.0;  // applies to every load bus
  /// Symmetric branch limits |F| <= f_max; unset means transmission is unchecked.
  std::optional<Eigen::VectorXd> f_max;
};

struct Violation {
  enum class Kind { GenerationBelowMin, GenerationAboveMax, LoadBelowMin, LoadAboveMax, FlowBelowMin, FlowAboveMax, MissingEntry };
  Kind kind;
  int element = 0;  // bus id or branch index
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

std::string to_string(Violation::Kind kind);

struct ConstraintReport {
  std::vector<Violation> violations;
  bool flows_checked = false;

  bool feasible() const { return violations.empty(); }
};

/// Dispatch state checked against the snapshot's capacities and loads.
struct Dispatch {
  std::map<BusId, double> generation;  // P_g per generation bus
  std::map<BusId, double> load;        // P_L per load bus
  std::optional<Eigen::VectorXd> flows;
};

/// Lists every violation of pg_min <= P_g <= P_g^Max, pl_min <= P_L <= P_L^Max
/// and, when limits are given, -F^Max <= F <= F^Max.
ConstraintReport check_constraints(const CaseSnapshot& snapshot, const Dispatch& dispatch,
                                   const OperatingLimits& limits = {});

struct StatReport {
  Eigen::Index sample_size = 0;
  bool degenerate = false;             // fewer than two buses: no correlation or structure
  ProbabilityTable realized_table;     // binned actual normalized values
  CountMatrix target_counts = CountMatrix::Zero();
  CountMatrix realized_counts = CountMatrix::Zero();
  double count_tvd = 0.0;              // realized rank-bin counts vs. target slot counts
  double conditional_tvd = 0.0;        // degree-weighted TVD of realized vs. table conditionals
  std::optional<double> pearson_rho;
  double tail_share = 0.0;             // MW share of the buses flagged as tail
  double total = 0.0;
  double law_total = 0.0;
};

/// Scores an assignment against the table it should follow.
StatReport statistical_report(const Assignment& assignment, const Grid& grid,
                              const ProbabilityTable& target);

}  // namespace gridseed
