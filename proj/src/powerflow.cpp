#include "gridseed/powerflow.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>

namespace gridseed {

InjectionVector make_injections(const Grid& grid, const std::map<BusId, double>& generation,
                                const std::map<BusId, double>& load) {
  InjectionVector inj{Eigen::VectorXd::Zero(grid.bus_count())};
  auto add = [&](const std::map<BusId, double>& source, double sign) {
    for (const auto& [id, mw] : source) {
      if (id < 0 || id >= grid.bus_count()) {
        throw Error(ErrorCode::SchemaError, "injection references unknown bus " + std::to_string(id));
      }
      if (grid.type(id) == BusType::Connection && mw != 0.0) {
        throw Error(ErrorCode::SchemaError,
                    "connection bus " + std::to_string(id) + " cannot inject power");
      }
      inj.p(id) += sign * mw;
    }
  };
  add(generation, 1.0);
  add(load, -1.0);
  return inj;
}

FlowSolution dc_power_flow(const Grid& grid, const InjectionVector& injections, BusId slack,
                           std::optional<double> default_reactance) {
  const Eigen::Index n = grid.bus_count();
  if (injections.p.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "dc_power_flow: injection vector length differs from N");
  }
  if (slack < 0 || slack >= n) {
    throw Error(ErrorCode::OutOfRange, "dc_power_flow: slack bus does not exist");
  }
  if (!is_connected(grid)) {
    throw Error(ErrorCode::DisconnectedGrid, "dc_power_flow: grid is not connected");
  }

  Eigen::VectorXd p = injections.p;
  p(slack) = 0.0;
  p(slack) = -p.sum();

  FlowSolution sol;
  sol.slack_bus = slack;
  sol.slack_injection = p(slack);
  sol.theta = Eigen::VectorXd::Zero(n);

  if (n > 1) {
    // Reduced susceptance matrix: drop the slack row and column.
    const Eigen::SparseMatrix<double> y = admittance_matrix(grid, default_reactance);
    auto reduced_index = [slack](Eigen::Index i) { return i < slack ? i : i - 1; };
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(y.nonZeros()));
    for (Eigen::Index col = 0; col < y.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(y, col); it; ++it) {
        if (it.row() == slack || it.col() == slack) continue;
        triplets.emplace_back(reduced_index(it.row()), reduced_index(it.col()), it.value());
      }
    }
    Eigen::SparseMatrix<double> b(n - 1, n - 1);
    b.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::VectorXd rhs(n - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != slack) rhs(reduced_index(i)) = p(i);
    }

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(b);
    if (ldlt.info() != Eigen::Success) {
      throw Error(ErrorCode::SingularSystem, "dc_power_flow: factorization failed");
    }
    Eigen::VectorXd x = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !x.allFinite()) {
      throw Error(ErrorCode::SingularSystem, "dc_power_flow: solve failed");
    }
    // One step of iterative refinement keeps badly scaled reactances within tolerance.
    x += ldlt.solve(rhs - b * x);

    const double scale = std::max(rhs.norm(), 1.0);
    sol.relative_residual = (b * x - rhs).norm() / scale;
    if (sol.relative_residual > 1e-10) {
      throw Error(ErrorCode::SingularSystem, "dc_power_flow: residual above 1e-10");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != slack) sol.theta(i) = x(reduced_index(i));
    }
  }

  sol.flows.resize(grid.branch_count());
  Eigen::Index l = 0;
  for (const auto& br : grid.branches()) {
    sol.flows(l++) = (sol.theta(br.from) - sol.theta(br.to)) / branch_reactance(br, default_reactance);
  }
  return sol;
}

double nodal_imbalance(const Grid& grid, const InjectionVector& injections,
                       const FlowSolution& solution) {
  Eigen::VectorXd p = injections.p;
  p(solution.slack_bus) = solution.slack_injection;
  const Eigen::VectorXd net = incidence_matrix(grid).transpose() * solution.flows;
  return (net - p).cwiseAbs().maxCoeff();
}

BusId default_slack(const Assignment& generation) {
  if (generation.buses.empty()) {
    throw Error(ErrorCode::NoGenerationBuses, "default_slack: no generation buses");
  }
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < generation.mw.size(); ++i) {
    if (generation.mw(i) > generation.mw(best)) best = i;
  }
  return generation.buses[static_cast<std::size_t>(best)];
}

std::map<BusId, double> proportional_dispatch(const Assignment& generation, double total_load) {
  std::map<BusId, double> dispatch;
  const double ratio = generation.total > 0.0 ? total_load / generation.total : 0.0;
  for (std::size_t i = 0; i < generation.buses.size(); ++i) {
    dispatch[generation.buses[i]] = generation.mw(static_cast<Eigen::Index>(i)) * ratio;
  }
  return dispatch;
}

std::string to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::GenerationBelowMin: return "generation_below_min";
    case Violation::Kind::GenerationAboveMax: return "generation_above_max";
    case Violation::Kind::LoadBelowMin: return "load_below_min";
    case Violation::Kind::LoadAboveMax: return "load_above_max";
    case Violation::Kind::FlowBelowMin: return "flow_below_min";
    case Violation::Kind::FlowAboveMax: return "flow_above_max";
    case Violation::Kind::MissingEntry: return "missing_entry";
  }
  return "unknown";
}

ConstraintReport check_constraints(const CaseSnapshot& snapshot, const Dispatch& dispatch,
                                   const OperatingLimits& limits) {
  ConstraintReport report;
  auto check_bounds = [&](const std::map<BusId, double>& caps, const std::map<BusId, double>& actual,
                          double lower, Violation::Kind below, Violation::Kind above) {
    for (const auto& [bus, cap] : caps) {
      const auto it = actual.find(bus);
      if (it == actual.end()) {
        report.violations.push_back({Violation::Kind::MissingEntry, bus, 0.0, lower, cap});
        continue;
      }
      if (it->second < lower) report.violations.push_back({below, bus, it->second, lower, cap});
      if (it->second > cap) report.violations.push_back({above, bus, it->second, lower, cap});
    }
  };
  check_bounds(snapshot.gen_capacity, dispatch.generation, limits.pg_min,
               Violation::Kind::GenerationBelowMin, Violation::Kind::GenerationAboveMax);
  check_bounds(snapshot.load, dispatch.load, limits.pl_min, Violation::Kind::LoadBelowMin,
               Violation::Kind::LoadAboveMax);

  if (limits.f_max && dispatch.flows) {
    report.flows_checked = true;
    const Eigen::VectorXd& f = *dispatch.flows;
    const Eigen::VectorXd& fmax = *limits.f_max;
    if (f.size() != fmax.size()) {
      throw Error(ErrorCode::LengthMismatch, "check_constraints: flow limit length mismatch");
    }
    for (Eigen::Index l = 0; l < f.size(); ++l) {
      const auto idx = static_cast<int>(l);
      if (f(l) > fmax(l)) report.violations.push_back({Violation::Kind::FlowAboveMax, idx, f(l), -fmax(l), fmax(l)});
      if (f(l) < -fmax(l)) report.violations.push_back({Violation::Kind::FlowBelowMin, idx, f(l), -fmax(l), fmax(l)});
    }
  }
  return report;
}

StatReport statistical_report(const Assignment& assignment, const Grid& grid,
                              const ProbabilityTable& target) {
  StatReport report;
  const auto n = static_cast<Eigen::Index>(assignment.buses.size());
  if (assignment.mw.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "statistical_report: assignment is inconsistent");
  }
  report.sample_size = n;
  report.total = assignment.mw.sum();
  report.law_total = assignment.law_total;

  double tail_mw = 0.0;
  for (BusId b : assignment.tail_buses) tail_mw += assignment.value_at(b).value_or(0.0);
  report.tail_share = report.total > 0.0 ? tail_mw / report.total : 0.0;

  if (n == 0) {
    report.degenerate = true;
    return report;
  }

  const Eigen::VectorXi all_degrees = node_degrees(grid);
  Eigen::VectorXi degrees(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    degrees(i) = all_degrees(assignment.buses[static_cast<std::size_t>(i)]);
  }
  if (degrees.maxCoeff() <= 0 || !(assignment.mw.maxCoeff() > 0.0)) {
    report.degenerate = true;
    return report;
  }
  const Eigen::VectorXd k = normalize_values(degrees.cast<double>());
  const Eigen::VectorXd pv = normalize_values(assignment.mw);

  Eigen::VectorXi degree_bin(n);
  for (Eigen::Index i = 0; i < n; ++i) degree_bin(i) = bin_index(k(i), target.edges());

  report.realized_table = extract_joint_table(assignment.mw, degrees, target.edges(), assignment.axis);
  report.target_counts = target_slot_counts(degree_bin, target);
  report.realized_counts =
      realized_rank_counts(assignment.mw, degree_bin, report.target_counts.rowwise().sum());
  report.count_tvd = (report.realized_counts - report.target_counts).cwiseAbs().sum() /
                     (2.0 * static_cast<double>(n));

  const CountMatrix binned = joint_counts(pv, k, target.edges());
  for (int j = 0; j < kTableBins; ++j) {
    const int nj = binned.col(j).sum();
    if (nj == 0) continue;
    const BinVector realized = binned.col(j).cast<double>() / nj;
    const BinVector expected = conditional_value_distribution(target, j);
    report.conditional_tvd += 0.5 * (realized - expected).cwiseAbs().sum() * nj / static_cast<double>(n);
  }

  if (n < 2) {
    report.degenerate = true;
    return report;
  }
  try {
    report.pearson_rho = pearson_correlation(pv, k);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConstantVector) throw;
  }
  return report;
}

}  // namespace gridseed
