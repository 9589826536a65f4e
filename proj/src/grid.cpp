#include "gridseed/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace gridseed {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DuplicateBusId: return "DuplicateBusId";
    case ErrorCode::NonContiguousBusIds: return "NonContiguousBusIds";
    case ErrorCode::DanglingBranchEndpoint: return "DanglingBranchEndpoint";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::BadReactance: return "BadReactance";
    case ErrorCode::AllZeroDegrees: return "AllZeroDegrees";
    case ErrorCode::MissingImpedance: return "MissingImpedance";
    case ErrorCode::InvalidNetworkSize: return "InvalidNetworkSize";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonPositiveMax: return "NonPositiveMax";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotADistribution: return "NotADistribution";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::BadEdges: return "BadEdges";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::ConstantVector: return "ConstantVector";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::CollinearSizes: return "CollinearSizes";
    case ErrorCode::NoGenerationBuses: return "NoGenerationBuses";
    case ErrorCode::NoLoadBuses: return "NoLoadBuses";
    case ErrorCode::InvalidOptions: return "InvalidOptions";
    case ErrorCode::DisconnectedGrid: return "DisconnectedGrid";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

std::vector<BusId> Grid::buses_of_type(BusType type) const {
  std::vector<BusId> ids;
  for (const auto& bus : buses_) {
    if (bus.type == type) ids.push_back(bus.id);
  }
  return ids;
}

Grid build_grid(std::vector<Bus> buses, std::vector<Branch> branches) {
  const auto n = static_cast<BusId>(buses.size());
  std::vector<bool> seen(buses.size(), false);
  for (const auto& bus : buses) {
    if (bus.id < 0 || bus.id >= n) {
      throw Error(ErrorCode::NonContiguousBusIds,
                  "bus id " + std::to_string(bus.id) + " outside dense range [0, " +
                      std::to_string(n) + ")");
    }
    if (seen[static_cast<std::size_t>(bus.id)]) {
      throw Error(ErrorCode::DuplicateBusId, "duplicate bus id " + std::to_string(bus.id));
    }
    seen[static_cast<std::size_t>(bus.id)] = true;
  }
  std::sort(buses.begin(), buses.end(),
            [](const Bus& a, const Bus& b) { return a.id < b.id; });

  for (std::size_t l = 0; l < branches.size(); ++l) {
    const auto& br = branches[l];
    if (br.from < 0 || br.from >= n || br.to < 0 || br.to >= n) {
      throw Error(ErrorCode::DanglingBranchEndpoint,
                  "branch " + std::to_string(l) + " (" + std::to_string(br.from) + ", " +
                      std::to_string(br.to) + ") references a missing bus");
    }
    if (br.from == br.to) {
      throw Error(ErrorCode::SelfLoop,
                  "branch " + std::to_string(l) + " is a self-loop at bus " +
                      std::to_string(br.from));
    }
    if (br.reactance && !(*br.reactance > 0.0 && std::isfinite(*br.reactance))) {
      throw Error(ErrorCode::BadReactance,
                  "branch " + std::to_string(l) + " has non-positive reactance");
    }
  }

  Grid grid;
  grid.buses_ = std::move(buses);
  grid.branches_ = std::move(branches);
  return grid;
}

Eigen::VectorXi node_degrees(const Grid& grid) {
  const auto n = static_cast<std::size_t>(grid.bus_count());
  std::vector<std::vector<BusId>> neighbours(n);
  for (const auto& br : grid.branches()) {
    neighbours[static_cast<std::size_t>(br.from)].push_back(br.to);
    neighbours[static_cast<std::size_t>(br.to)].push_back(br.from);
  }
  Eigen::VectorXi degree(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    auto& nb = neighbours[i];
    std::sort(nb.begin(), nb.end());
    degree(static_cast<Eigen::Index>(i)) =
        static_cast<int>(std::unique(nb.begin(), nb.end()) - nb.begin());
  }
  return degree;
}

Eigen::VectorXd normalized_degrees(const Grid& grid, std::span<const BusId> subset) {
  if (subset.empty()) {
    throw Error(ErrorCode::EmptyInput, "normalized_degrees: empty bus subset");
  }
  const Eigen::VectorXi all = node_degrees(grid);
  Eigen::VectorXd k(static_cast<Eigen::Index>(subset.size()));
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] < 0 || subset[i] >= grid.bus_count()) {
      throw Error(ErrorCode::OutOfRange, "normalized_degrees: unknown bus id");
    }
    k(static_cast<Eigen::Index>(i)) = all(subset[i]);
  }
  const double kmax = k.maxCoeff();
  if (kmax <= 0.0) {
    throw Error(ErrorCode::AllZeroDegrees, "normalized_degrees: every degree in subset is zero");
  }
  return k / kmax;
}

Eigen::SparseMatrix<double> incidence_matrix(const Grid& grid) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * grid.branches().size());
  Eigen::Index l = 0;
  for (const auto& br : grid.branches()) {
    triplets.emplace_back(l, br.from, 1.0);
    triplets.emplace_back(l, br.to, -1.0);
    ++l;
  }
  Eigen::SparseMatrix<double> a(grid.branch_count(), grid.bus_count());
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

double branch_reactance(const Branch& branch, std::optional<double> default_reactance) {
  if (branch.reactance) return *branch.reactance;
  if (!default_reactance) {
    throw Error(ErrorCode::MissingImpedance,
                "branch (" + std::to_string(branch.from) + ", " + std::to_string(branch.to) +
                    ") carries no reactance");
  }
  return *default_reactance;
}

Eigen::SparseMatrix<double> admittance_matrix(const Grid& grid,
                                              std::optional<double> default_reactance) {
  if (default_reactance && !(*default_reactance > 0.0)) {
    throw Error(ErrorCode::BadReactance, "default reactance must be positive");
  }
  // Assembled per branch; equal to A^T diag(1/x) A without forming the product.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * grid.branches().size());
  for (const auto& br : grid.branches()) {
    const double y = 1.0 / branch_reactance(br, default_reactance);
    triplets.emplace_back(br.from, br.from, y);
    triplets.emplace_back(br.to, br.to, y);
    triplets.emplace_back(br.from, br.to, -y);
    triplets.emplace_back(br.to, br.from, -y);
  }
  Eigen::SparseMatrix<double> y(grid.bus_count(), grid.bus_count());
  y.setFromTriplets(triplets.begin(), triplets.end());
  return y;
}

bool is_connected(const Grid& grid) {
  const auto n = static_cast<std::size_t>(grid.bus_count());
  if (n <= 1) return true;
  std::vector<BusId> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](BusId x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      auto& p = parent[static_cast<std::size_t>(x)];
      p = parent[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  };
  std::size_t components = n;
  for (const auto& br : grid.branches()) {
    const BusId a = find(br.from);
    const BusId b = find(br.to);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --components;
    }
  }
  return components == 1;
}

}  // namespace gridseed
