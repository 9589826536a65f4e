#include "gridseed/stats.hpp"

#include <algorithm>
#include <numeric>

#include "gridseed/rng.hpp"

namespace gridseed {

void TailedExponentialModel::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::InvalidModel, "exponential mean beta must be positive");
  }
  if (!(tail_fraction >= 0.0 && tail_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidModel, "tail fraction must lie in [0, 1)");
  }
  if (!(tail_multiplier[0] > 1.0 && tail_multiplier[0] <= tail_multiplier[1]) ||
      !std::isfinite(tail_multiplier[1])) {
    throw Error(ErrorCode::InvalidModel, "tail multiplier range must satisfy 1 < lo <= hi");
  }
}

Eigen::Index TailedExponentialModel::tail_count(Eigen::Index n) const {
  if (n <= 0 || tail_fraction <= 0.0) return 0;
  const auto t = static_cast<Eigen::Index>(std::llround(tail_fraction * static_cast<double>(n)));
  return std::clamp<Eigen::Index>(t, 1, n);
}

ValueSample sample_tailed_exponential(Eigen::Index n, const TailedExponentialModel& model,
                                      std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::EmptyInput, "sample_tailed_exponential: n must be >= 1");
  model.validate();

  Rng rng(seed);
  Rng placement = rng.split(1);
  Rng draws = rng.split(2);

  const Eigen::Index tails = model.tail_count(n);

  // Partial Fisher-Yates picks the tail positions.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < tails; ++i) {
    const auto j = i + static_cast<Eigen::Index>(placement.below(static_cast<std::uint64_t>(n - i)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  std::vector<Eigen::Index> tail_indices(order.begin(), order.begin() + tails);
  std::sort(tail_indices.begin(), tail_indices.end());

  std::vector<bool> is_tail(static_cast<std::size_t>(n), false);
  for (auto i : tail_indices) is_tail[static_cast<std::size_t>(i)] = true;

  ValueSample sample;
  sample.values.resize(n);
  double body_max = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (is_tail[static_cast<std::size_t>(i)]) continue;
    const double v = -model.beta * std::log(draws.uniform_open());
    sample.values(i) = v;
    body_max = std::max(body_max, v);
  }
  if (tails == n) body_max = -model.beta * std::log(draws.uniform_open());

  for (auto i : tail_indices) {
    sample.values(i) = body_max * draws.uniform(model.tail_multiplier[0], model.tail_multiplier[1]);
  }

  sample.tail_indices = std::move(tail_indices);
  sample.seed = seed;
  sample.model = model;
  return sample;
}

BinEdges default_bin_edges() {
  BinEdges e;
  e << 0.00, 0.01, 0.03, 0.06, 0.10, 0.15, 0.21, 0.28, 0.36, 0.45, 0.55, 0.66, 0.78, 1.00;
  return e;
}

std::string to_string(ValueAxis axis) {
  return axis == ValueAxis::GenerationCapacity ? "generation" : "load";
}

ProbabilityTable validate_table(const JointMatrix& raw, const BinEdges& edges, ValueAxis axis) {
  if (edges(0) != 0.0 || edges(kTableBins) != 1.0) {
    throw Error(ErrorCode::BadEdges, "bin edges must start at 0 and end at 1");
  }
  for (int i = 0; i < kTableBins; ++i) {
    if (!(edges(i) < edges(i + 1))) {
      throw Error(ErrorCode::BadEdges, "bin edges must be strictly ascending");
    }
  }
  if (!raw.allFinite()) {
    throw Error(ErrorCode::NotADistribution, "table contains non-finite cells");
  }
  if ((raw.array() < 0.0).any()) {
    throw Error(ErrorCode::NegativeEntry, "table contains a negative cell");
  }
  const double total = raw.sum();
  if (total < 0.98 || total > 1.02) {
    throw Error(ErrorCode::NotADistribution,
                "table cells sum to " + std::to_string(total) + ", outside [0.98, 1.02]");
  }
  return ProbabilityTable(raw / total, edges, axis);
}

int bin_index(double x, const BinEdges& edges) {
  if (!(x >= edges(0) && x <= edges(kTableBins))) {
    throw Error(ErrorCode::OutOfRange, "bin_index: value outside [0, 1]");
  }
  // First edge strictly greater than x closes the bin.
  const double* begin = edges.data() + 1;
  const double* end = edges.data() + kTableBins;
  const auto it = std::upper_bound(begin, end, x);
  return static_cast<int>(it - begin);
}

BinVector conditional_value_distribution(const ProbabilityTable& table, int degree_bin) {
  if (degree_bin < 0 || degree_bin >= kTableBins) {
    throw Error(ErrorCode::OutOfRange, "degree bin outside [0, 12]");
  }
  const BinVector marginal = table.degree_marginal();
  int column = -1;
  for (int offset = 0; offset < kTableBins && column < 0; ++offset) {
    for (int candidate : {degree_bin - offset, degree_bin + offset}) {
      if (candidate >= 0 && candidate < kTableBins && marginal(candidate) > 0.0) {
        column = candidate;
        break;
      }
    }
  }
  // validate_table guarantees total mass 1, so some column is nonempty.
  const BinVector cond = table.joint().col(column) / marginal(column);
  return cond / cond.sum();
}

}  // namespace gridseed
