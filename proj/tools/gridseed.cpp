// Command-line front end: extract, assign, validate, scaling, tables.
//
// Exit codes: 0 success, 1 validation failure, 2 I/O or parse error,
// 3 internal invariant breach.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "gridseed/empirical.hpp"
#include "gridseed/io.hpp"
#include "gridseed/pipeline.hpp"

namespace fs = std::filesystem;
using namespace gridseed;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::IoError:
    case ErrorCode::SchemaError:
    case ErrorCode::DuplicateBusId:
    case ErrorCode::NonContiguousBusIds:
    case ErrorCode::DanglingBranchEndpoint:
    case ErrorCode::SelfLoop:
    case ErrorCode::BadReactance:
    case ErrorCode::NotADistribution:
    case ErrorCode::NegativeEntry:
    case ErrorCode::BadEdges:
    case ErrorCode::InvalidOptions:
    case ErrorCode::InvalidModel:
      return kExitInput;
    default:
      return kExitValidation;
  }
}

void report_error(std::string_view code, const std::string& message) {
  io::Json err;
  err["error"] = std::string(code);
  err["message"] = message;
  std::cerr << err.dump() << '\n';
}

io::StatsSpec load_stats(const std::string& path, ValueAxis axis) {
  if (path.empty()) return io::default_stats(axis);
  io::StatsSpec spec = io::stats_from_json(io::read_json(path));
  if (spec.axis != axis) {
    throw Error(ErrorCode::SchemaError, path + ": statistics file is for the " +
                                            to_string(spec.axis) + " axis");
  }
  return spec;
}

int run_extract(const std::string& case_dir, const std::string& axis_name, const std::string& out,
                std::string report_path) {
  const ValueAxis axis = axis_name == "gen" ? ValueAxis::GenerationCapacity : ValueAxis::Load;
  const io::CaseFiles files = io::parse_case(case_dir);
  const EmpiricalReport report = analyze_case(files.snapshot, axis);
  io::write_json_atomic(out, io::to_json(stats_from_report(report)));
  if (report_path.empty()) {
    report_path = fs::path(out).replace_extension(".report.json").string();
  }
  io::write_json_atomic(report_path, io::to_json(report));
  return 0;
}

int run_assign(const std::string& topology_dir, const std::string& gen_stats_path,
               const std::string& load_stats_path, std::uint64_t seed, const std::string& out_dir) {
  const io::Topology topology = io::parse_topology(topology_dir);
  const io::StatsSpec gen_stats = load_stats(gen_stats_path, ValueAxis::GenerationCapacity);
  const io::StatsSpec load_stats_spec = load_stats(load_stats_path, ValueAxis::Load);
  const CaseAssignment result = assign_case(topology.grid, gen_stats, load_stats_spec, seed);

  fs::create_directories(out_dir);
  io::write_json_atomic(fs::path(out_dir) / "gen.json",
                        io::to_json(result.generation, gen_stats, topology));
  io::write_json_atomic(fs::path(out_dir) / "load.json",
                        io::to_json(result.load, load_stats_spec, topology));
  return 0;
}

int run_validate(const std::string& topology_dir, const std::string& assignment_dir,
                 const std::string& report_path) {
  const io::Topology topology = io::parse_topology(topology_dir);
  const auto gen = io::assignment_from_json(io::read_json(fs::path(assignment_dir) / "gen.json"), topology);
  const auto load = io::assignment_from_json(io::read_json(fs::path(assignment_dir) / "load.json"), topology);
  const ValidationReport report = validate_case(topology, gen, load);
  const io::Json doc = to_json(report, topology);
  if (!report_path.empty()) io::write_json_atomic(report_path, doc);
  std::cout << doc.dump(2) << '\n';
  return report.ok() ? 0 : kExitValidation;
}

int run_scaling(double n) {
  io::Json doc;
  doc["n"] = n;
  doc["generation_mw"] = evaluate_scaling_law(kGenerationScalingLaw, n);
  doc["load_mw"] = evaluate_scaling_law(kLoadScalingLaw, n);
  std::cout << doc.dump(2) << '\n';
  return 0;
}

int run_tables(int which, const std::string& out) {
  const ValueAxis axis = which == 1 ? ValueAxis::GenerationCapacity : ValueAxis::Load;
  const io::Json doc = io::to_json(io::default_stats(axis));
  if (out.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    io::write_json_atomic(out, doc);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical generation and load settings for synthetic grid topologies"};
  app.require_subcommand(1);

  std::string case_dir, axis_name = "gen", extract_out, extract_report;
  auto* extract = app.add_subcommand("extract", "Measure statistics of a reference case");
  extract->add_option("--case", case_dir, "Case directory (buses.csv, branches.csv, gen.csv, load.csv)")
      ->required();
  extract->add_option("--axis", axis_name, "gen or load")->check(CLI::IsMember({"gen", "load"}));
  extract->add_option("--out", extract_out, "Statistics file to write")->required();
  extract->add_option("--report", extract_report, "Empirical report (default: <out>.report.json)");

  std::string topology_dir, gen_stats, load_stats_path, assign_out;
  std::uint64_t seed = 0;
  auto* assign = app.add_subcommand("assign", "Assign generation capacities and loads");
  assign->add_option("--topology", topology_dir, "Topology directory (buses.csv, branches.csv)")
      ->required();
  assign->add_option("--gen-stats", gen_stats, "Generation statistics file (default: embedded)");
  assign->add_option("--load-stats", load_stats_path, "Load statistics file (default: embedded)");
  assign->add_option("--seed", seed, "Random seed")->required();
  assign->add_option("--out", assign_out, "Output directory for gen.json and load.json")->required();

  std::string validate_topology, assignment_dir, validate_report;
  auto* validate = app.add_subcommand("validate", "Validate an assigned case");
  validate->add_option("--topology", validate_topology, "Topology directory")->required();
  validate->add_option("--assignment", assignment_dir, "Directory holding gen.json and load.json")
      ->required();
  validate->add_option("--report", validate_report, "Write the validation report here");

  double n = 0.0;
  auto* scaling = app.add_subcommand("scaling", "Evaluate the aggregate scaling laws");
  scaling->add_option("--n", n, "Network size (buses)")->required();

  int which = 1;
  std::string tables_out;
  auto* tables = app.add_subcommand("tables", "Dump an embedded reference statistics file");
  tables->add_option("--which", which, "1: generation, 2: load")->check(CLI::IsMember({1, 2}));
  tables->add_option("--out", tables_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("UsageError", e.what());
    return kExitInput;
  }

  try {
    if (*extract) return run_extract(case_dir, axis_name, extract_out, extract_report);
    if (*assign) return run_assign(topology_dir, gen_stats, load_stats_path, seed, assign_out);
    if (*validate) return run_validate(validate_topology, assignment_dir, validate_report);
    if (*scaling) return run_scaling(n);
    if (*tables) return run_tables(which, tables_out);
  } catch (const Error& e) {
    report_error(to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    report_error("IoError", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    report_error("InternalError", e.what());
    return kExitInternal;
  }
  return kExitInternal;
}
