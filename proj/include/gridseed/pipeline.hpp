#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gridseed/assignment.hpp"
#include "gridseed/io.hpp"
#include "gridseed/powerflow.hpp"

namespace gridseed {

struct CaseAssignment {
  Assignment generation;
  Assignment load;
};

/// Generation first, then loads balanced against the generation total.
CaseAssignment assign_case(const Grid& grid, const io::StatsSpec& gen_stats,
                           const io::StatsSpec& load_stats, std::uint64_t seed);

struct ValidationReport {
  std::vector<std::string> failures;
  std::optional<StatReport> generation_stats;
  std::optional<StatReport> load_stats;
  std::optional<ConstraintReport> constraints;
  std::optional<FlowSolution> flow;
  double max_imbalance = 0.0;

  bool ok() const { return failures.empty(); }
};

/// Checks totals, bus coverage, balance, the statistical structure and a DC
/// power flow with proportional dispatch.
ValidationReport validate_case(const io::Topology& topology, const io::AssignmentDocument& gen,
                               const io::AssignmentDocument& load);

io::Json to_json(const ValidationReport& report, const io::Topology& topology);

/// Statistics file derived from a reference case on one axis.
io::StatsSpec stats_from_report(const EmpiricalReport& report);

}  // namespace gridseed
