#include "doctest.h"

#include <set>

#include <Eigen/Dense>

#include "gridseed/grid.hpp"
#include "support/fixtures.hpp"

using namespace gridseed;

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

Grid star4() {
  return build_grid({{0, BusType::Generation}, {1, BusType::Load}, {2, BusType::Load}, {3, BusType::Load}},
                    {{0, 1, {}}, {0, 2, {}}, {0, 3, {}}});
}

}  // namespace

TEST_CASE("build_grid: minimal path") {
  const Grid g = build_grid({{0, BusType::Generation}, {1, BusType::Load}, {2, BusType::Connection}},
                            {{0, 1, {}}, {1, 2, {}}});
  CHECK(g.bus_count() == 3);
  CHECK(g.branch_count() == 2);
  CHECK(g.type(2) == BusType::Connection);
  CHECK(g.buses_of_type(BusType::Load) == std::vector<BusId>{1});
}

TEST_CASE("build_grid: buses in any order are stored by id") {
  const Grid g = build_grid({{2, BusType::Load}, {0, BusType::Generation}, {1, BusType::Connection}}, {});
  CHECK(g.buses()[0].id == 0);
  CHECK(g.type(0) == BusType::Generation);
  CHECK(g.type(2) == BusType::Load);
}

TEST_CASE("build_grid: errors") {
  const std::vector<Bus> three{{0, BusType::Generation}, {1, BusType::Load}, {2, BusType::Connection}};
  CHECK(code_of([&] { build_grid(three, {{0, 5, {}}}); }) == ErrorCode::DanglingBranchEndpoint);
  CHECK(code_of([&] { build_grid(three, {{1, 1, {}}}); }) == ErrorCode::SelfLoop);
  CHECK(code_of([&] { build_grid(three, {{0, 1, 0.0}}); }) == ErrorCode::BadReactance);
  CHECK(code_of([&] { build_grid(three, {{0, 1, -0.2}}); }) == ErrorCode::BadReactance);
  CHECK(code_of([] {
          build_grid({{0, BusType::Load}, {0, BusType::Load}}, {});
        }) == ErrorCode::DuplicateBusId);
  CHECK(code_of([] {
          build_grid({{0, BusType::Load}, {2, BusType::Load}}, {});
        }) == ErrorCode::NonContiguousBusIds);
}

TEST_CASE("node_degrees") {
  const Grid path = test::path_grid({BusType::Generation, BusType::Load, BusType::Load});
  CHECK(node_degrees(path) == Eigen::Vector3i(1, 2, 1));
  CHECK(node_degrees(star4()) == Eigen::Vector4i(3, 1, 1, 1));

  const Grid isolated = build_grid({{0, BusType::Load}, {1, BusType::Load}}, {});
  CHECK(node_degrees(isolated) == Eigen::Vector2i::Zero());

  const Grid parallel = build_grid({{0, BusType::Load}, {1, BusType::Load}}, {{0, 1, {}}, {1, 0, 0.3}});
  CHECK(node_degrees(parallel) == Eigen::Vector2i(1, 1));
}

TEST_CASE("property: handshake degree sum") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    test::SyntheticSpec spec;
    spec.buses = 20 + static_cast<int>(seed * 7 % 200);
    spec.generation = spec.buses / 5;
    spec.loads = spec.buses / 3;
    const Grid g = test::synthetic_grid(spec, seed);
    std::set<std::pair<int, int>> edges;
    for (const auto& br : g.branches()) edges.insert(std::minmax(br.from, br.to));
    CHECK(node_degrees(g).sum() == 2 * static_cast<int>(edges.size()));
  }
}

TEST_CASE("normalized_degrees") {
  // Degrees [1,2,4]: a hub of 4 with a path hanging off one spoke.
  const Grid g = build_grid({{0, BusType::Generation}, {1, BusType::Generation}, {2, BusType::Generation},
                             {3, BusType::Connection}, {4, BusType::Connection}, {5, BusType::Connection}},
                            {{2, 1}, {2, 3}, {2, 4}, {2, 5}, {1, 0}});
  const std::vector<BusId> subset{0, 1, 2};
  const Eigen::VectorXd nd = normalized_degrees(g, subset);
  CHECK(nd(0) == 0.25);
  CHECK(nd(1) == 0.5);
  CHECK(nd(2) == 1.0);

  const Grid tri = build_grid({{0, BusType::Load}, {1, BusType::Load}, {2, BusType::Load}, {3, BusType::Load}},
                              {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const std::vector<BusId> all{0, 1, 2, 3};
  CHECK(normalized_degrees(tri, all) == Eigen::Vector4d::Ones());

  const Grid isolated = build_grid({{0, BusType::Load}, {1, BusType::Load}}, {});
  const std::vector<BusId> both{0, 1};
  CHECK(code_of([&] { normalized_degrees(isolated, both); }) == ErrorCode::AllZeroDegrees);
  CHECK(code_of([&] { normalized_degrees(isolated, {}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("incidence_matrix signs") {
  const Grid path = test::path_grid({BusType::Load, BusType::Load, BusType::Load});
  const Eigen::MatrixXd a = incidence_matrix(path);
  Eigen::MatrixXd expected(2, 3);
  expected << 1, -1, 0, 0, 1, -1;
  CHECK(a == expected);
}

TEST_CASE("admittance_matrix examples") {
  const Grid two = build_grid({{0, BusType::Generation}, {1, BusType::Load}}, {{0, 1, 0.5}});
  Eigen::Matrix2d y2;
  y2 << 2, -2, -2, 2;
  CHECK(Eigen::MatrixXd(admittance_matrix(two)) == y2);

  const Grid path = test::path_grid({BusType::Load, BusType::Load, BusType::Load});
  Eigen::Matrix3d yp;
  yp << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  CHECK(Eigen::MatrixXd(admittance_matrix(path)) == yp);

  const Grid tri = build_grid({{0, BusType::Load}, {1, BusType::Load}, {2, BusType::Load}},
                              {{0, 1}, {0, 2}, {2, 1}});
  const Eigen::MatrixXd yt = admittance_matrix(tri);
  // Assembled by hand from the incidence matrix: 2 on the diagonal, -1 elsewhere.
  Eigen::Matrix3d hand;
  hand << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  CHECK(yt == hand);
  CHECK(yt.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("admittance_matrix: missing impedance without a default") {
  const Grid path = test::path_grid({BusType::Load, BusType::Load});
  CHECK(code_of([&] { admittance_matrix(path, std::nullopt); }) == ErrorCode::MissingImpedance);
  const Grid with_x = build_grid({{0, BusType::Load}, {1, BusType::Load}}, {{0, 1, 0.25}});
  CHECK(Eigen::MatrixXd(admittance_matrix(with_x, std::nullopt))(0, 0) == 4.0);
  CHECK(branch_reactance(Branch{0, 1, {}}, 0.7) == 0.7);
}

TEST_CASE("property: admittance Laplacian") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    test::SyntheticSpec spec;
    spec.buses = 60 + static_cast<int>(seed * 13 % 300);
    spec.generation = 10;
    spec.loads = 20;
    spec.random_reactance = true;
    const Grid g = test::synthetic_grid(spec, seed + 100);
    const Eigen::SparseMatrix<double> y = admittance_matrix(g);
    const Eigen::VectorXd row_sums = y * Eigen::VectorXd::Ones(g.bus_count());
    CHECK(row_sums.cwiseAbs().maxCoeff() <= 1e-12);
    const Eigen::MatrixXd dense = y;
    CHECK(dense == dense.transpose());
  }
}

TEST_CASE("is_connected") {
  CHECK(is_connected(test::path_grid({BusType::Load, BusType::Load, BusType::Load})));
  CHECK(is_connected(build_grid({{0, BusType::Load}}, {})));
  CHECK_FALSE(is_connected(build_grid({{0, BusType::Load}, {1, BusType::Load}}, {})));
}
