#pragma once

// Synthetic topologies for tests. Topology synthesis is not part of the
// library; these generators only need to look roughly like transmission grids
// (sparse, connected, mean degree near 2.7, a few hubs).

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "gridseed/grid.hpp"
#include "gridseed/rng.hpp"

namespace gridseed::test {

struct SyntheticSpec {
  int buses = 2000;
  int generation = 400;
  int loads = 800;
  double extra_edge_ratio = 0.35;  // extra branches per bus on top of a spanning tree
  bool random_reactance = false;
};

/// Random recursive spanning tree plus random chords; bus types drawn at random.
inline Grid synthetic_grid(const SyntheticSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Branch> branches;
  std::set<std::pair<int, int>> used;
  auto add = [&](int a, int b) {
    if (a == b) return false;
    const auto key = std::minmax(a, b);
    if (!used.insert(key).second) return false;
    Branch br{a, b, std::nullopt};
    if (spec.random_reactance) br.reactance = rng.uniform(0.01, 0.5);
    branches.push_back(br);
    return true;
  };
  for (int i = 1; i < spec.buses; ++i) add(i, static_cast<int>(rng.below(static_cast<std::uint64_t>(i))));
  const long room = static_cast<long>(spec.buses) * (spec.buses - 1) / 2 - (spec.buses - 1);
  const int extra = static_cast<int>(std::min<long>(static_cast<long>(spec.extra_edge_ratio * spec.buses), room));
  for (int added = 0; added < extra && spec.buses > 2;) {
    const auto a = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.buses)));
    const auto b = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.buses)));
    if (add(a, b)) ++added;
  }

  std::vector<int> order(static_cast<std::size_t>(spec.buses));
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::vector<Bus> buses(static_cast<std::size_t>(spec.buses));
  for (int r = 0; r < spec.buses; ++r) {
    const int id = order[static_cast<std::size_t>(r)];
    BusType t = BusType::Connection;
    if (r < spec.generation) {
      t = BusType::Generation;
    } else if (r < spec.generation + spec.loads) {
      t = BusType::Load;
    }
    buses[static_cast<std::size_t>(id)] = {id, t};
  }
  return build_grid(std::move(buses), std::move(branches));
}

inline Grid path_grid(std::vector<BusType> types) {
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  for (std::size_t i = 0; i < types.size(); ++i) {
    buses.push_back({static_cast<BusId>(i), types[i]});
    if (i > 0) branches.push_back({static_cast<BusId>(i - 1), static_cast<BusId>(i), std::nullopt});
  }
  return build_grid(std::move(buses), std::move(branches));
}

}  // namespace gridseed::test
