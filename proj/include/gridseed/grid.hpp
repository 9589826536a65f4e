#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "gridseed/error.hpp"

namespace gridseed {

using BusId = int;

enum class BusType { Generation, Load, Connection };

struct Bus {
  BusId id = 0;
  BusType type = BusType::Connection;
};

struct Branch {
  BusId from = 0;
  BusId to = 0;
  std::optional<double> reactance;  // per unit, strictly positive when set
};

/// Validated transmission network with dense 0-based bus ids.
///
/// Immutable after construction; use build_grid() to obtain one.
class Grid {
 public:
  Grid() = default;

  Eigen::Index bus_count() const { return static_cast<Eigen::Index>(buses_.size()); }
  Eigen::Index branch_count() const { return static_cast<Eigen::Index>(branches_.size()); }

  const std::vector<Bus>& buses() const { return buses_; }
  const std::vector<Branch>& branches() const { return branches_; }
  BusType type(BusId id) const { return buses_[static_cast<std::size_t>(id)].type; }

  /// Ids of all buses of the given type, ascending.
  std::vector<BusId> buses_of_type(BusType type) const;

 private:
  friend Grid build_grid(std::vector<Bus> buses, std::vector<Branch> branches);

  std::vector<Bus> buses_;      // indexed by id
  std::vector<Branch> branches_;
};

/// Validates ids (unique, dense [0, N)), endpoints and reactances.
///
/// Buses may be given in any order; they are stored sorted by id. Parallel
/// branches are kept.
Grid build_grid(std::vector<Bus> buses, std::vector<Branch> branches);

/// Number of distinct neighbours of every bus. Parallel branches count once.
Eigen::VectorXi node_degrees(const Grid& grid);

/// k_n / max k over `subset`, in subset order.
Eigen::VectorXd normalized_degrees(const Grid& grid, std::span<const BusId> subset);

/// Branch-bus incidence matrix (M x N): +1 at `from`, -1 at `to`.
Eigen::SparseMatrix<double> incidence_matrix(const Grid& grid);

/// Reactance of a branch, falling back to `default_reactance` when unset.
/// Throws MissingImpedance if unset and no default is given.
double branch_reactance(const Branch& branch, std::optional<double> default_reactance);

/// Nodal susceptance matrix A^T diag(1/x) A, with A the incidence matrix.
///
/// Pass `default_reactance = std::nullopt` to require every branch to carry
/// an impedance.
Eigen::SparseMatrix<double> admittance_matrix(const Grid& grid,
                                              std::optional<double> default_reactance = 1.0);

/// True when the branch set connects all buses (a single bus is connected).
bool is_connected(const Grid& grid);

}  // namespace gridseed
