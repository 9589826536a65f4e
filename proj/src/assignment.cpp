#include "gridseed/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gridseed/empirical.hpp"
#include "gridseed/rng.hpp"
#include "gridseed/tables.hpp"

namespace gridseed {

namespace {

// Sub-stream tags; generation and load draw from disjoint streams of one seed.
constexpr std::uint64_t kGenSampleStream = 0x67656e5f73616d70ULL;
constexpr std::uint64_t kGenMatchStream = 0x67656e5f6d617463ULL;
constexpr std::uint64_t kLoadSampleStream = 0x6c6f645f73616d70ULL;
constexpr std::uint64_t kLoadMatchStream = 0x6c6f645f6d617463ULL;

struct AxisStreams {
  std::uint64_t sample;
  std::uint64_t match;
};

Assignment run_pipeline(const Grid& grid, const AssignmentOptions& options, ValueAxis axis,
                        double law_total, double target_total, std::optional<double> hard_cap,
                        AxisStreams streams) {
  const BusType type = axis == ValueAxis::GenerationCapacity ? BusType::Generation : BusType::Load;
  const std::vector<BusId> buses = grid.buses_of_type(type);
  if (buses.empty()) {
    throw Error(axis == ValueAxis::GenerationCapacity ? ErrorCode::NoGenerationBuses
                                                      : ErrorCode::NoLoadBuses,
                "grid has no " + to_string(axis) + " buses");
  }
  const auto n = static_cast<Eigen::Index>(buses.size());

  TailedExponentialModel model;
  model.tail_fraction = options.tail_fraction;
  model.tail_multiplier = options.tail_multiplier;

  // Draw values; without an explicit beta, sample once at the mean implied by the
  // target, measure, and redraw with beta corrected for the realized tail mass.
  ValueSample sample;
  if (options.beta) {
    model.beta = *options.beta;
    sample = sample_tailed_exponential(n, model, streams.sample);
  } else {
    model.beta = target_total / static_cast<double>(n);
    const ValueSample probe = sample_tailed_exponential(n, model, streams.sample);
    model.beta *= target_total / probe.values.sum();
    sample = sample_tailed_exponential(n, model, streams.sample);
  }

  Eigen::VectorXd values = rescale_if_exceeds(sample.values, target_total, options.rescale_trigger);
  bool rescaled = values.sum() != sample.values.sum();
  // A binding cap aims a hair below the limit so that any summation order of the
  // stored values still respects it.
  const std::optional<double> limit =
      hard_cap ? std::optional<double>(*hard_cap * (1.0 - 1e-12)) : std::nullopt;
  if (limit && values.sum() > *limit) {
    values *= *limit / values.sum();
    rescaled = true;
  }

  const Eigen::VectorXd k = normalized_degrees(grid, buses);
  const MatchResult match = match_values_to_buses(values, k, options.table, streams.match);

  Assignment out;
  out.axis = axis;
  out.buses = buses;
  out.mw = match.assigned;
  while (limit && out.mw.sum() > *limit) out.mw *= 1.0 - 1e-15;
  out.total = out.mw.sum();
  out.law_total = law_total;
  out.target_total = target_total;
  out.rescaled = rescaled;
  out.beta = model.beta;
  out.target_counts = match.target_counts;
  out.seed = options.seed;

  std::vector<bool> is_tail(static_cast<std::size_t>(n), false);
  for (auto t : sample.tail_indices) is_tail[static_cast<std::size_t>(t)] = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (is_tail[static_cast<std::size_t>(match.source[static_cast<std::size_t>(i)])]) {
      out.tail_buses.push_back(buses[static_cast<std::size_t>(i)]);
    }
  }

  const Eigen::VectorXi all_degrees = node_degrees(grid);
  Eigen::VectorXi degrees(n);
  for (Eigen::Index i = 0; i < n; ++i) degrees(i) = all_degrees(buses[static_cast<std::size_t>(i)]);
  out.realized_table = extract_joint_table(out.mw, degrees, options.table.edges(), axis);
  if (n >= 2) {
    try {
      out.pearson_rho = pearson_correlation(normalize_values(out.mw), k);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ConstantVector) throw;
    }
  }
  return out;
}

}  // namespace

AssignmentOptions AssignmentOptions::generation_defaults(std::uint64_t seed) {
  AssignmentOptions o;
  o.seed = seed;
  o.scaling_law = kGenerationScalingLaw;
  o.beta = std::nullopt;
  o.table = default_generation_table();
  return o;
}

AssignmentOptions AssignmentOptions::load_defaults(std::uint64_t seed) {
  AssignmentOptions o;
  o.seed = seed;
  o.scaling_law = kLoadScalingLaw;
  o.beta = kDefaultLoadBeta;
  o.table = default_load_table();
  return o;
}

void AssignmentOptions::validate() const {
  if (!(rescale_trigger >= 1.0)) {
    throw Error(ErrorCode::InvalidOptions, "rescale trigger must be >= 1");
  }
  if (!(balance_cap > 0.0 && balance_cap <= 1.0)) {
    throw Error(ErrorCode::InvalidOptions, "balance cap must lie in (0, 1]");
  }
  TailedExponentialModel model;
  model.beta = beta.value_or(1.0);
  model.tail_fraction = tail_fraction;
  model.tail_multiplier = tail_multiplier;
  try {
    model.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidOptions, e.what());
  }
}

std::optional<double> Assignment::value_at(BusId bus) const {
  const auto it = std::lower_bound(buses.begin(), buses.end(), bus);
  if (it == buses.end() || *it != bus) return std::nullopt;
  return mw(it - buses.begin());
}

Eigen::VectorXd rescale_if_exceeds(const Eigen::Ref<const Eigen::VectorXd>& values,
                                   double target_total, double trigger) {
  const double sum = values.sum();
  if (sum > trigger * target_total) return values * (target_total / sum);
  return values;
}

BinCounts largest_remainder(int n, const BinVector& p) {
  BinCounts seats;
  BinVector remainder;
  int assigned = 0;
  for (int v = 0; v < kTableBins; ++v) {
    const double quota = n * p(v);
    const double whole = std::floor(quota);
    seats(v) = static_cast<int>(whole);
    remainder(v) = quota - whole;
    assigned += seats(v);
  }
  std::array<int, kTableBins> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainder(a) > remainder(b); });
  for (int i = 0; assigned < n; i = (i + 1) % kTableBins) {
    ++seats(order[static_cast<std::size_t>(i)]);
    ++assigned;
  }
  return seats;
}

CountMatrix target_slot_counts(const Eigen::Ref<const Eigen::VectorXi>& degree_bin,
                               const ProbabilityTable& table) {
  BinCounts per_degree = BinCounts::Zero();
  for (Eigen::Index i = 0; i < degree_bin.size(); ++i) ++per_degree(degree_bin(i));
  CountMatrix counts = CountMatrix::Zero();
  for (int j = 0; j < kTableBins; ++j) {
    if (per_degree(j) == 0) continue;
    counts.col(j) = largest_remainder(per_degree(j), conditional_value_distribution(table, j));
  }
  return counts;
}

MatchResult match_values_to_buses(const Eigen::Ref<const Eigen::VectorXd>& values,
                                  const Eigen::Ref<const Eigen::VectorXd>& normalized_degrees,
                                  const ProbabilityTable& table, std::uint64_t seed) {
  if (values.size() != normalized_degrees.size()) {
    throw Error(ErrorCode::LengthMismatch, "match_values_to_buses: length mismatch");
  }
  const Eigen::Index n = values.size();
  MatchResult result;
  result.degree_bin.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    result.degree_bin(i) = bin_index(normalized_degrees(i), table.edges());
  }
  result.target_counts = target_slot_counts(result.degree_bin, table);

  // Hand out value-bin slots inside each degree bin in random bus order.
  Rng rng(seed);
  result.value_bin.resize(n);
  for (int j = 0; j < kTableBins; ++j) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (result.degree_bin(i) == j) members.push_back(i);
    }
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[rng.below(i)]);
    }
    std::size_t next = 0;
    for (int v = 0; v < kTableBins; ++v) {
      for (int c = 0; c < result.target_counts(v, j); ++c) {
        result.value_bin(members[next++]) = v;
      }
    }
  }

  std::vector<Eigen::Index> slots(static_cast<std::size_t>(n));
  std::iota(slots.begin(), slots.end(), Eigen::Index{0});
  std::sort(slots.begin(), slots.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (result.value_bin(a) != result.value_bin(b)) return result.value_bin(a) < result.value_bin(b);
    if (normalized_degrees(a) != normalized_degrees(b)) {
      return normalized_degrees(a) < normalized_degrees(b);
    }
    return a < b;
  });

  std::vector<Eigen::Index> by_value(static_cast<std::size_t>(n));
  std::iota(by_value.begin(), by_value.end(), Eigen::Index{0});
  std::stable_sort(by_value.begin(), by_value.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });

  result.assigned.resize(n);
  result.source.resize(static_cast<std::size_t>(n));
  for (std::size_t r = 0; r < slots.size(); ++r) {
    result.assigned(slots[r]) = values(by_value[r]);
    result.source[static_cast<std::size_t>(slots[r])] = by_value[r];
  }
  return result;
}

CountMatrix realized_rank_counts(const Eigen::Ref<const Eigen::VectorXd>& values,
                                 const Eigen::Ref<const Eigen::VectorXi>& degree_bin,
                                 const BinCounts& value_bin_totals) {
  if (values.size() != degree_bin.size() || value_bin_totals.sum() != values.size()) {
    throw Error(ErrorCode::LengthMismatch, "realized_rank_counts: inconsistent sizes");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });
  CountMatrix counts = CountMatrix::Zero();
  std::size_t r = 0;
  for (int v = 0; v < kTableBins; ++v) {
    for (int c = 0; c < value_bin_totals(v); ++c, ++r) {
      ++counts(v, degree_bin(order[r]));
    }
  }
  return counts;
}

double reconcile_balance(double load_target, double gen_total, double cap) {
  return std::min(load_target, cap * gen_total);
}

Assignment assign_generation(const Grid& grid, const AssignmentOptions& options) {
  options.validate();
  const double law_total =
      evaluate_scaling_law(options.scaling_law, static_cast<double>(grid.bus_count()));
  return run_pipeline(grid, options, ValueAxis::GenerationCapacity, law_total, law_total,
                      std::nullopt,
                      {derive_seed(options.seed, kGenSampleStream),
                       derive_seed(options.seed, kGenMatchStream)});
}

Assignment assign_loads(const Grid& grid, const AssignmentOptions& options, double gen_total) {
  options.validate();
  if (!(gen_total > 0.0)) {
    throw Error(ErrorCode::InvalidOptions, "assign_loads: generation total must be positive");
  }
  const double law_total =
      evaluate_scaling_law(options.scaling_law, static_cast<double>(grid.bus_count()));
  const double target = reconcile_balance(law_total, gen_total, options.balance_cap);
  return run_pipeline(grid, options, ValueAxis::Load, law_total, target,
                      options.balance_cap * gen_total,
                      {derive_seed(options.seed, kLoadSampleStream),
                       derive_seed(options.seed, kLoadMatchStream)});
}

}  // namespace gridseed
