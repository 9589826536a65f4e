#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "gridseed/assignment.hpp"
#include "gridseed/empirical.hpp"
#include "gridseed/grid.hpp"
#include "gridseed/stats.hpp"

namespace gridseed::io {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Topology CSV pair: buses.csv (id,type) and branches.csv (from,to[,x])
// ---------------------------------------------------------------------------

/// A grid plus the external bus labels, indexed by dense id.
struct Topology {
  Grid grid;
  std::vector<std::string> labels;

  /// Dense id of an external label.
  std::optional<BusId> find(const std::string& label) const;

  /// Appends a label as the next dense id; false if it already exists.
  bool add_label(const std::string& label);

 private:
  std::unordered_map<std::string, BusId> index_;
};

Topology read_topology(std::istream& buses, std::istream& branches,
                       const std::string& bus_name = "buses.csv",
                       const std::string& branch_name = "branches.csv");

/// Reads <dir>/buses.csv and <dir>/branches.csv.
Topology parse_topology(const std::filesystem::path& dir);

void write_topology(const Topology& topology, std::ostream& buses, std::ostream& branches);
void write_topology(const Topology& topology, const std::filesystem::path& dir);

/// Case directory: the topology pair plus gen.csv and load.csv (bus,mw).
struct CaseFiles {
  Topology topology;
  CaseSnapshot snapshot;
};

CaseFiles parse_case(const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Statistics file
// ---------------------------------------------------------------------------

struct PublishedMarginals {
  BinVector value;
  BinVector degree;
  double total = 1.0;
};

/// Everything needed to synthesize one axis: scaling law, value model, table.
struct StatsSpec {
  ValueAxis axis = ValueAxis::GenerationCapacity;
  ScalingLaw<double> scaling_law = kGenerationScalingLaw;
  std::optional<double> beta;
  double tail_fraction = 0.01;
  std::array<double, 2> tail_multiplier{2.0, 3.0};
  BinEdges bin_edges = default_bin_edges();
  JointMatrix joint = JointMatrix::Constant(1.0 / (kTableBins * kTableBins));
  /// Rescale cells by their sum before validation (published tables lose mass to rounding).
  bool renormalize = false;
  std::optional<PublishedMarginals> marginals;

  /// Validated table; throws as validate_table does.
  ProbabilityTable table() const;
  AssignmentOptions options(std::uint64_t seed) const;
};

/// Embedded reference statistics for an axis.
StatsSpec default_stats(ValueAxis axis);

Json to_json(const StatsSpec& spec);
/// Throws SchemaError on a malformed document, or the validate_table error.
StatsSpec stats_from_json(const Json& doc);

// ---------------------------------------------------------------------------
// Assignment and report documents
// ---------------------------------------------------------------------------

struct AssignmentDocument {
  Assignment assignment;
  StatsSpec stats;
};

Json to_json(const Assignment& assignment, const StatsSpec& stats, const Topology& topology);
AssignmentDocument assignment_from_json(const Json& doc, const Topology& topology);

Json to_json(const EmpiricalReport& report);

Json count_matrix_json(const CountMatrix& m);
Json joint_matrix_json(const JointMatrix& m);

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

std::string read_text(const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

/// Writes via a temporary sibling and rename, so readers never see partial files.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_json_atomic(const std::filesystem::path& path, const Json& doc);

/// Shortest decimal representation that round-trips.
std::string format_double(double value);

}  // namespace gridseed::io
