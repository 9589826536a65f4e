#include "gridseed/pipeline.hpp"

#include <cmath>

namespace gridseed {

namespace {

bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1.0});
}

void check_document(const io::Topology& topology, const io::AssignmentDocument& doc,
                    ValueAxis axis, std::vector<std::string>& failures) {
  const Assignment& a = doc.assignment;
  const std::string name = to_string(axis);
  if (a.axis != axis) failures.push_back(name + ": document axis is " + to_string(a.axis));
  if (doc.stats.axis != axis) failures.push_back(name + ": statistics axis is " + to_string(doc.stats.axis));

  const BusType type = axis == ValueAxis::GenerationCapacity ? BusType::Generation : BusType::Load;
  if (a.buses != topology.grid.buses_of_type(type)) {
    failures.push_back(name + ": values do not cover exactly the " + name + " buses");
  }
  if (!a.mw.allFinite() || (a.mw.array() <= 0.0).any()) {
    failures.push_back(name + ": values must be finite and positive");
  }
  if (!close_rel(a.total, a.mw.sum(), 1e-9)) {
    failures.push_back(name + ": recorded total " + io::format_double(a.total) +
                       " differs from the sum of values " + io::format_double(a.mw.sum()));
  }
  const double law = evaluate_scaling_law(doc.stats.scaling_law,
                                          static_cast<double>(topology.grid.bus_count()));
  if (!close_rel(a.law_total, law, 1e-9)) {
    failures.push_back(name + ": recorded scaling-law total does not match the statistics file");
  }
}

}  // namespace

CaseAssignment assign_case(const Grid& grid, const io::StatsSpec& gen_stats,
                           const io::StatsSpec& load_stats, std::uint64_t seed) {
  CaseAssignment out;
  out.generation = assign_generation(grid, gen_stats.options(seed));
  out.load = assign_loads(grid, load_stats.options(seed), out.generation.total);
  return out;
}

ValidationReport validate_case(const io::Topology& topology, const io::AssignmentDocument& gen,
                               const io::AssignmentDocument& load) {
  ValidationReport report;
  const Grid& grid = topology.grid;
  check_document(topology, gen, ValueAxis::GenerationCapacity, report.failures);
  check_document(topology, load, ValueAxis::Load, report.failures);
  if (!report.ok()) return report;

  const Assignment& g = gen.assignment;
  const Assignment& l = load.assignment;
  const double trigger = gen.stats.options(g.seed).rescale_trigger;

  if (g.total > trigger * g.law_total * (1.0 + 1e-9)) {
    report.failures.push_back("generation: total exceeds " + io::format_double(trigger) +
                              " x scaling-law total");
  }
  const double load_bound = std::min(trigger * l.law_total, g.total);
  if (l.total > load_bound * (1.0 + 1e-9)) {
    report.failures.push_back("load: total exceeds min(" + io::format_double(trigger) +
                              " x scaling-law total, generation total)");
  }

  for (const auto* doc : {&gen, &load}) {
    const std::string name = to_string(doc->assignment.axis);
    StatReport stats = statistical_report(doc->assignment, grid, doc->stats.table());
    if (stats.target_counts != doc->assignment.target_counts) {
      report.failures.push_back(name + ": recorded slot counts differ from the table's targets");
    }
    if (stats.count_tvd != 0.0) {
      report.failures.push_back(name + ": degree-conditional structure deviates from the table (TVD " +
                                io::format_double(stats.count_tvd) + ")");
    }
    (doc == &gen ? report.generation_stats : report.load_stats) = std::move(stats);
  }

  std::map<BusId, double> capacity;
  std::map<BusId, double> demand;
  for (std::size_t i = 0; i < g.buses.size(); ++i) capacity[g.buses[i]] = g.mw(static_cast<Eigen::Index>(i));
  for (std::size_t i = 0; i < l.buses.size(); ++i) demand[l.buses[i]] = l.mw(static_cast<Eigen::Index>(i));

  Dispatch dispatch;
  dispatch.generation = proportional_dispatch(g, l.total);
  dispatch.load = demand;
  try {
    const InjectionVector inj = make_injections(grid, dispatch.generation, dispatch.load);
    FlowSolution flow = dc_power_flow(grid, inj, default_slack(g));
    report.max_imbalance = nodal_imbalance(grid, inj, flow);
    const double tolerance = 1e-8 * std::max(1.0, inj.p.cwiseAbs().maxCoeff());
    if (report.max_imbalance > tolerance) {
      report.failures.push_back("power flow: nodal imbalance " +
                                io::format_double(report.max_imbalance) + " MW");
    }
    dispatch.flows = flow.flows;
    report.flow = std::move(flow);
  } catch (const Error& e) {
    report.failures.push_back(std::string("power flow: ") + std::string(to_string(e.code())) + ": " +
                              e.what());
  }

  CaseSnapshot snapshot{grid, capacity, demand};
  report.constraints = check_constraints(snapshot, dispatch);
  for (const auto& v : report.constraints->violations) {
    report.failures.push_back("constraint: " + to_string(v.kind) + " at " + std::to_string(v.element));
  }
  return report;
}

io::Json to_json(const ValidationReport& report, const io::Topology& topology) {
  io::Json doc;
  doc["ok"] = report.ok();
  doc["failures"] = report.failures;
  auto stats_json = [](const StatReport& s) {
    io::Json j;
    j["sample_size"] = s.sample_size;
    j["degenerate"] = s.degenerate;
    j["total"] = s.total;
    j["law_total"] = s.law_total;
    j["pearson_rho"] = s.pearson_rho ? io::Json(*s.pearson_rho) : io::Json(nullptr);
    j["tail_share"] = s.tail_share;
    j["count_tvd"] = s.count_tvd;
    j["conditional_tvd"] = s.conditional_tvd;
    j["target_counts"] = io::count_matrix_json(s.target_counts);
    j["realized_counts"] = io::count_matrix_json(s.realized_counts);
    j["realized_joint"] = io::joint_matrix_json(s.realized_table.joint());
    return j;
  };
  if (report.generation_stats) doc["generation"] = stats_json(*report.generation_stats);
  if (report.load_stats) doc["load"] = stats_json(*report.load_stats);
  if (report.flow) {
    const auto& f = *report.flow;
    doc["power_flow"] = {
        {"slack_bus", topology.labels.at(static_cast<std::size_t>(f.slack_bus))},
        {"slack_injection", f.slack_injection},
        {"relative_residual", f.relative_residual},
        {"max_nodal_imbalance", report.max_imbalance},
        {"max_abs_flow", f.flows.size() ? f.flows.cwiseAbs().maxCoeff() : 0.0},
    };
  }
  if (report.constraints) {
    io::Json c;
    c["feasible"] = report.constraints->feasible();
    c["flows"] = report.constraints->flows_checked ? "checked" : "unchecked";
    io::Json list = io::Json::array();
    for (const auto& v : report.constraints->violations) {
      list.push_back({{"kind", to_string(v.kind)}, {"element", v.element}, {"value", v.value},
                      {"lower", v.lower}, {"upper", v.upper}});
    }
    c["violations"] = std::move(list);
    doc["constraints"] = std::move(c);
  }
  return doc;
}

io::StatsSpec stats_from_report(const EmpiricalReport& report) {
  io::StatsSpec spec;
  spec.axis = report.axis;
  spec.scaling_law =
      report.axis == ValueAxis::GenerationCapacity ? kGenerationScalingLaw : kLoadScalingLaw;
  spec.beta = report.fitted_beta;
  spec.bin_edges = report.joint_table.edges();
  spec.joint = report.joint_table.joint();
  return spec;
}

}  // namespace gridseed
