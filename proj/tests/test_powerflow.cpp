#include "doctest.h"

#include <algorithm>

#include "gridseed/powerflow.hpp"
#include "gridseed/rng.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace gridseed;
using doctest::Approx;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

Grid triangle() {
  return build_grid({{0, BusType::Generation}, {1, BusType::Load}, {2, BusType::Connection}},
                    {{0, 1}, {0, 2}, {2, 1}});
}

}  // namespace

TEST_CASE("dc_power_flow: single branch") {
  const Grid g = test::path_grid({BusType::Generation, BusType::Load});
  const FlowSolution s = dc_power_flow(g, {Eigen::Vector2d(1, -1)}, 0);
  CHECK(s.theta(0) == 0.0);
  CHECK(s.theta(1) == Approx(-1.0).epsilon(1e-15));
  CHECK(s.flows(0) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("dc_power_flow: zero injections") {
  const Grid g = triangle();
  const FlowSolution s = dc_power_flow(g, {Eigen::Vector3d::Zero()}, 1);
  CHECK(s.theta == Eigen::Vector3d::Zero());
  CHECK(s.flows == Eigen::Vector3d::Zero());
}

TEST_CASE("dc_power_flow: triangle") {
  const FlowSolution s = dc_power_flow(triangle(), {Eigen::Vector3d(3, -3, 0)}, 0);
  CHECK(s.theta == Eigen::Vector3d(0, -2, -1));
  CHECK(s.flows == Eigen::Vector3d(2, 1, 1));
  CHECK(s.slack_injection == 3.0);
}

TEST_CASE("dc_power_flow: slack absorbs the residual") {
  const FlowSolution s = dc_power_flow(triangle(), {Eigen::Vector3d(100, -3, 0)}, 0);
  CHECK(s.slack_injection == 3.0);
  CHECK(s.flows == Eigen::Vector3d(2, 1, 1));
}

TEST_CASE("dc_power_flow: errors") {
  const Grid split = build_grid({{0, BusType::Generation}, {1, BusType::Load}, {2, BusType::Load}}, {{0, 1}});
  CHECK(code_of([&] { dc_power_flow(split, {Eigen::Vector3d(1, -1, 0)}, 0); }) == ErrorCode::DisconnectedGrid);
  CHECK(code_of([&] { dc_power_flow(triangle(), {Eigen::Vector3d::Zero()}, 3); }) == ErrorCode::OutOfRange);
  CHECK(code_of([&] { dc_power_flow(triangle(), {Eigen::Vector2d::Zero()}, 0); }) == ErrorCode::LengthMismatch);
  CHECK(code_of([&] { dc_power_flow(triangle(), {Eigen::Vector3d::Zero()}, 0, std::nullopt); }) ==
        ErrorCode::MissingImpedance);
}

TEST_CASE("dc_power_flow: single bus") {
  const Grid one = build_grid({{0, BusType::Generation}}, {});
  const FlowSolution s = dc_power_flow(one, {Eigen::VectorXd::Constant(1, 5.0)}, 0);
  CHECK(s.slack_injection == 0.0);
  CHECK(s.flows.size() == 0);
}

TEST_CASE("property: dense oracle agreement and conservation") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    test::SyntheticSpec spec;
    spec.buses = 2 + static_cast<int>(rng.below(49));
    spec.generation = 1 + spec.buses / 4;
    spec.loads = spec.buses / 3;
    spec.extra_edge_ratio = 0.5;
    spec.random_reactance = trial % 2 == 0;
    const Grid g = test::synthetic_grid(spec, static_cast<std::uint64_t>(trial));
    Eigen::VectorXd p = Eigen::VectorXd::Zero(g.bus_count());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (g.type(static_cast<BusId>(i)) != BusType::Connection) p(i) = rng.uniform(-500, 500);
    }
    const auto slack = static_cast<BusId>(rng.below(static_cast<std::uint64_t>(g.bus_count())));
    const InjectionVector inj{p};
    const FlowSolution s = dc_power_flow(g, inj, slack);
    Eigen::VectorXd balanced = p;
    balanced(slack) = 0.0;
    balanced(slack) = -balanced.sum();
    const Eigen::VectorXd want = oracle::dense_dc_flows(g, balanced, slack);
    const double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
    CHECK((s.flows - want).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    CHECK(nodal_imbalance(g, inj, s) <= 1e-8);
    CHECK(s.theta(slack) == 0.0);
  }
}

TEST_CASE("slack invariance on a symmetric ring") {
  // A 6-ring with opposite injections at buses 0 and 3 has the swap symmetry 0<->3.
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  for (int i = 0; i < 6; ++i) {
    buses.push_back({i, i == 0 ? BusType::Generation : (i == 3 ? BusType::Load : BusType::Connection)});
    branches.push_back({i, (i + 1) % 6});
  }
  const Grid ring = build_grid(buses, branches);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(6);
  p(0) = 10.0;
  p(3) = -10.0;
  auto sorted_abs = [](Eigen::VectorXd f) {
    std::vector<double> v;
    for (double x : f) v.push_back(std::abs(x));
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto a = sorted_abs(dc_power_flow(ring, {p}, 0).flows);
  const auto b = sorted_abs(dc_power_flow(ring, {p}, 3).flows);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("make_injections") {
  const Grid g = triangle();
  const InjectionVector inj = make_injections(g, {{0, 5.0}}, {{1, 2.0}});
  CHECK(inj.p == Eigen::Vector3d(5, -2, 0));
  CHECK(code_of([&] { make_injections(g, {{2, 1.0}}, {}); }) == ErrorCode::SchemaError);
  CHECK(make_injections(g, {{2, 0.0}}, {}).p(2) == 0.0);
}

TEST_CASE("check_constraints") {
  CaseSnapshot snap;
  snap.grid = triangle();
  snap.gen_capacity = {{0, 100.0}};
  snap.load = {{1, 40.0}};

  const ConstraintReport ok = check_constraints(snap, {snap.gen_capacity, snap.load, std::nullopt});
  CHECK(ok.feasible());
  CHECK_FALSE(ok.flows_checked);

  const ConstraintReport over = check_constraints(snap, {{{0, 110.0}}, snap.load, std::nullopt});
  REQUIRE(over.violations.size() == 1);
  CHECK(over.violations[0].kind == Violation::Kind::GenerationAboveMax);
  CHECK(over.violations[0].element == 0);

  OperatingLimits limits;
  limits.f_max = Eigen::Vector3d(1.5, 5, 5);
  const ConstraintReport flows =
      check_constraints(snap, {snap.gen_capacity, snap.load, Eigen::Vector3d(2, 1, -1)}, limits);
  CHECK(flows.flows_checked);
  REQUIRE(flows.violations.size() == 1);
  CHECK(flows.violations[0].kind == Violation::Kind::FlowAboveMax);

  const ConstraintReport missing = check_constraints(snap, {{}, snap.load, std::nullopt});
  REQUIRE(missing.violations.size() == 1);
  CHECK(missing.violations[0].kind == Violation::Kind::MissingEntry);
  CHECK(to_string(Violation::Kind::LoadBelowMin) == "load_below_min");
}

TEST_CASE("default_slack and proportional_dispatch") {
  Assignment a;
  a.buses = {2, 5, 7};
  a.mw = Eigen::Vector3d(10, 30, 30);
  a.total = 70;
  CHECK(default_slack(a) == 5);
  const auto d = proportional_dispatch(a, 35.0);
  CHECK(d.at(2) == 5.0);
  CHECK(d.at(5) == 15.0);
  CHECK(d.at(7) == 15.0);
}

TEST_CASE("statistical_report") {
  const Grid g = test::synthetic_grid({}, 42);
  const Assignment a = assign_generation(g, AssignmentOptions::generation_defaults(5));
  const StatReport r = statistical_report(a, g, AssignmentOptions::generation_defaults(5).table);
  CHECK(r.count_tvd == 0.0);
  CHECK(r.realized_counts == r.target_counts);
  CHECK(r.realized_counts == a.target_counts);
  CHECK(r.pearson_rho == a.pearson_rho);
  CHECK_FALSE(r.degenerate);
  CHECK(r.sample_size == 400);

  // Shuffling values across buses destroys the degree correlation.
  double sum = 0.0;
  const int trials = 50;
  Rng rng(1);
  for (int t = 0; t < trials; ++t) {
    Assignment shuffled = a;
    for (Eigen::Index i = shuffled.mw.size(); i > 1; --i) {
      std::swap(shuffled.mw(i - 1), shuffled.mw(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(i)))));
    }
    sum += *statistical_report(shuffled, g, a.realized_table).pearson_rho;
  }
  // Mean of 50 draws with standard error about 1/sqrt(400 * 50).
  CHECK(std::abs(sum / trials) < 4.0 / std::sqrt(400.0 * trials));
}

TEST_CASE("statistical_report: single bus is degenerate") {
  const Grid g = test::path_grid({BusType::Generation, BusType::Load});
  const Assignment a = assign_generation(g, AssignmentOptions::generation_defaults(1));
  const StatReport r = statistical_report(a, g, ProbabilityTable{});
  CHECK(r.degenerate);
  CHECK_FALSE(r.pearson_rho.has_value());
  CHECK(r.sample_size == 1);
}
