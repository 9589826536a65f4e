#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gridseed/empirical.hpp"
#include "gridseed/rng.hpp"
#include "gridseed/tables.hpp"
#include "support/fixtures.hpp"
#include "support/table_sampling.hpp"

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

}  // namespace

TEST_CASE("extract_joint_table: single pair and duplicates") {
  const ProbabilityTable one = extract_joint_table(Eigen::VectorXd::Constant(1, 12.0),
                                                   Eigen::VectorXi::Constant(1, 3));
  CHECK(one.joint()(12, 12) == 1.0);
  CHECK(one.joint().sum() == 1.0);
  const ProbabilityTable two = extract_joint_table(Eigen::Vector2d(5.0, 5.0), Eigen::Vector2i(2, 2));
  CHECK(two.joint() == one.joint());
}

TEST_CASE("extract_joint_table: errors") {
  CHECK(code_of([] { extract_joint_table(Eigen::Vector2d(1, 2), Eigen::Vector3i(1, 2, 3)); }) ==
        ErrorCode::LengthMismatch);
  CHECK(code_of([] { extract_joint_table(Eigen::VectorXd(), Eigen::VectorXi()); }) ==
        ErrorCode::DegenerateInput);
  CHECK(code_of([] { extract_joint_table(Eigen::Vector2d(0, 0), Eigen::Vector2i(1, 2)); }) ==
        ErrorCode::DegenerateInput);
}

TEST_CASE("extract_joint_table: 1000 pairs from a three-cell mixture") {
  JointMatrix m = JointMatrix::Zero();
  m(1, 0) = 0.5;
  m(4, 3) = 0.3;
  m(12, 12) = 0.2;
  const ProbabilityTable planted = validate_table(m);
  const test::TableDraw draw = test::draw_from_table(planted, 1000, 11);
  const ProbabilityTable got = extract_joint_table(draw.values, draw.degrees);
  CHECK(test::tvd(got.joint(), planted.joint()) <= 0.05);
}

TEST_CASE("property: round trip through the reference tables") {
  // Extraction normalizes by the maxima, so only tables with mass in the top
  // value and degree bins can round-trip. The load table has none.
  Rng rng(2);
  JointMatrix random_cells;
  for (Eigen::Index i = 0; i < random_cells.size(); ++i) random_cells(i) = rng.uniform_open();
  const ProbabilityTable random_table = validate_table(random_cells / random_cells.sum());
  for (const ProbabilityTable& t : {default_generation_table(), random_table}) {
    const test::TableDraw draw = test::draw_from_table(t, 10000, 5);
    const ProbabilityTable got = extract_joint_table(draw.values, draw.degrees);
    const double d = test::tvd(got.joint(), t.joint());
    MESSAGE("round-trip TVD " << d);
    CHECK(d <= 0.05);
  }
}

TEST_CASE("pearson_correlation") {
  CHECK(pearson_correlation(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(2, 4, 6)) == Approx(1.0));
  CHECK(pearson_correlation(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(3, 2, 1)) == Approx(-1.0));
  CHECK(code_of([] { pearson_correlation(Eigen::Vector3d(1, 1, 1), Eigen::Vector3d(1, 5, 2)); }) ==
        ErrorCode::ConstantVector);
  CHECK(code_of([] { pearson_correlation(Eigen::Vector2d(1, 2), Eigen::Vector3d(1, 5, 2)); }) ==
        ErrorCode::LengthMismatch);
  CHECK(code_of([] { pearson_correlation(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)); }) ==
        ErrorCode::InsufficientPoints);
  // Integer vectors go through the same template.
  CHECK(pearson_correlation(Eigen::Vector3i(1, 2, 3), Eigen::Vector3d(1, 2, 3)) == Approx(1.0));
}

TEST_CASE("property: pearson is invariant under positive affine maps") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(200));
    Eigen::VectorXd x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x(i) = rng.uniform(-5, 5);
      y(i) = 0.3 * x(i) + rng.uniform(-5, 5);
    }
    const double a = rng.uniform(0.01, 100.0);
    const double b = rng.uniform(-100.0, 100.0);
    const double base = pearson_correlation(x, y);
    const Eigen::VectorXd xa = (a * x.array() + b).matrix();
    const Eigen::VectorXd ya = (a * y.array() + b).matrix();
    CHECK(std::abs(pearson_correlation(xa, y) - base) < 1e-12);
    CHECK(std::abs(pearson_correlation(x, ya) - base) < 1e-12);
  }
}

TEST_CASE("fit_exponential_with_tail: examples") {
  const ExponentialFit constant = fit_exponential_with_tail(Eigen::VectorXd::Constant(10, 5.0), 0.0);
  CHECK(constant.beta == 5.0);
  CHECK(constant.tail_indices.empty());

  const ExponentialFit small = fit_exponential_with_tail(Eigen::Vector3d(1, 2, 100), 0.34);
  CHECK(small.tail_indices == std::vector<Eigen::Index>{2});
  CHECK(small.beta == 1.5);

  CHECK(code_of([] { fit_exponential_with_tail(Eigen::VectorXd(), 0.01); }) == ErrorCode::EmptyInput);
  CHECK(code_of([] { fit_exponential_with_tail(Eigen::VectorXd::Ones(1), 0.9); }) ==
        ErrorCode::DegenerateInput);
}

TEST_CASE("fit_exponential_with_tail: regenerated samples recover beta") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ValueSample s = sample_tailed_exponential(10000, {}, seed);
    const ExponentialFit fit = fit_exponential_with_tail(s.values, 0.01);
    CHECK(std::abs(fit.beta - 42.51) <= 1.5);
    CHECK(fit.tail_indices == s.tail_indices);
  }
}

TEST_CASE("property: fitted beta is permutation invariant") {
  const ValueSample s = sample_tailed_exponential(3001, {}, 4);
  const ExponentialFit base = fit_exponential_with_tail(s.values, 0.01);
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(s.values.begin(), s.values.end());
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
    const Eigen::VectorXd shuffled = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    CHECK(fit_exponential_with_tail(shuffled, 0.01).beta == base.beta);
  }
}

TEST_CASE("fit_scaling_law") {
  std::vector<std::pair<double, double>> pts;
  for (double n : {10.0, 100.0, 1000.0, 10000.0}) pts.emplace_back(n, evaluate_scaling_law(kGenerationScalingLaw, n));
  const ScalingLaw<double> law = fit_scaling_law(pts);
  CHECK(std::abs(law.a - -0.21) < 1e-9);
  CHECK(std::abs(law.b - 2.06) < 1e-9);
  CHECK(std::abs(law.c - 0.66) < 1e-9);

  // log10 total = log10 N + 2 is a straight line: a = 0.
  const ScalingLaw<double> line = fit_scaling_law({{10.0, 1000.0}, {100.0, 10000.0}, {1000.0, 100000.0}});
  CHECK(std::abs(line.a) < 1e-9);
  CHECK(line.b == Approx(1.0));

  CHECK(code_of([] { fit_scaling_law({{10.0, 5.0}, {100.0, 50.0}}); }) == ErrorCode::InsufficientPoints);
  CHECK(code_of([] { fit_scaling_law({{10.0, 5.0}, {10.0, 6.0}, {100.0, 50.0}}); }) == ErrorCode::CollinearSizes);
  CHECK(code_of([] { fit_scaling_law({{1.0, 5.0}, {10.0, 6.0}, {100.0, 50.0}}); }) == ErrorCode::InvalidNetworkSize);
}

TEST_CASE("property: fit_scaling_law exact for random coefficients") {
  Rng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const ScalingLaw<double> planted{rng.uniform(-0.5, 0.5), rng.uniform(-3, 3), rng.uniform(-2, 2)};
    std::vector<std::pair<double, double>> pts;
    for (int k = 0; k < 6; ++k) {
      const double n = std::pow(10.0, rng.uniform(0.5, 5.0));
      pts.emplace_back(n, evaluate_scaling_law(planted, n));
    }
    const ScalingLaw<double> fit = fit_scaling_law(pts);
    double residual = 0.0;
    for (const auto& [n, total] : pts) {
      residual = std::max(residual, std::abs(scaling_law_log10(fit, n) - std::log10(total)));
    }
    CHECK(residual < 1e-9);
  }
}

TEST_CASE("empirical_pdf") {
  const Histogram single = empirical_pdf(Eigen::Vector3d(1, 1, 1), 1);
  REQUIRE(single.densities.size() == 1);
  CHECK(single.densities(0) * (single.edges(1) - single.edges(0)) == Approx(1.0));

  Eigen::VectorXd grid(1000);
  for (int i = 0; i < 1000; ++i) grid(i) = (i + 0.5) / 1000.0;
  const Histogram flat = empirical_pdf(grid, 10);
  CHECK(flat.densities.maxCoeff() - flat.densities.minCoeff() < 0.02);

  CHECK(code_of([] { empirical_pdf(Eigen::VectorXd(), 5); }) == ErrorCode::EmptyInput);
  const Histogram zeros = empirical_pdf(Eigen::Vector2d(0, 0), 4);
  CHECK(zeros.densities.sum() * 0.25 == Approx(1.0));
}

TEST_CASE("empirical_pdf: exponential log-density slope") {
  TailedExponentialModel m;
  m.tail_fraction = 0.0;
  const ValueSample s = sample_tailed_exponential(100000, m, 8);
  const Histogram h = empirical_pdf(s.values, 50);
  const double width = h.edges(1) - h.edges(0);
  CHECK((h.densities.sum() * width) == Approx(1.0).epsilon(1e-12));
  // Regress log density on bin centre over bins with a solid count.
  std::vector<double> xs, ys;
  for (Eigen::Index b = 0; b < h.densities.size(); ++b) {
    if (h.densities(b) * width * 100000.0 < 100.0) break;
    xs.push_back(0.5 * (h.edges(b) + h.edges(b + 1)));
    ys.push_back(std::log(h.densities(b)));
  }
  REQUIRE(xs.size() >= 5);
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  CHECK(slope < 0.0);
  CHECK(slope == Approx(-1.0 / 42.51).epsilon(0.05));
}

TEST_CASE("analyze_case") {
  test::SyntheticSpec spec;
  spec.buses = 300;
  spec.generation = 60;
  spec.loads = 120;
  CaseSnapshot snap;
  snap.grid = test::synthetic_grid(spec, 3);
  const ValueSample g = sample_tailed_exponential(60, {}, 1);
  const ValueSample l = sample_tailed_exponential(120, {}, 2);
  Eigen::Index i = 0;
  for (BusId b : snap.grid.buses_of_type(BusType::Generation)) snap.gen_capacity[b] = g.values(i++);
  i = 0;
  for (BusId b : snap.grid.buses_of_type(BusType::Load)) snap.load[b] = l.values(i++);

  const EmpiricalReport rep = analyze_case(snap, ValueAxis::Load);
  CHECK(rep.axis == ValueAxis::Load);
  CHECK(rep.sample_size == 120);
  CHECK(rep.pearson_rho.has_value());
  CHECK(rep.joint_table.joint().sum() == Approx(1.0));
  CHECK(rep.fitted_beta == fit_exponential_with_tail(l.values, 0.01).beta);
  CHECK(rep.tail_share > 0.0);
  CHECK(rep.tail_share < 1.0);

  CaseSnapshot broken = snap;
  broken.load.erase(broken.load.begin());
  CHECK(code_of([&] { analyze_case(broken, ValueAxis::Load); }) == ErrorCode::SchemaError);
  broken = snap;
  broken.gen_capacity.begin()->second = -1.0;
  CHECK(code_of([&] { broken.validate(); }) == ErrorCode::SchemaError);
}
