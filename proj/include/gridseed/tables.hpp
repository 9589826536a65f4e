#pragma once

#include "gridseed/stats.hpp"

namespace gridseed {

/// A reference table exactly as published: cells plus the printed marginals.
///
/// Published cells carry rounding and transcription loss, so they need not
/// sum to the printed total; to_probability_table() rescales them.
struct PublishedTable {
  JointMatrix cells;        // rows: value bins ascending, cols: degree bins ascending
  BinVector value_marginal;
  BinVector degree_marginal;
  double total = 1.0;
  ValueAxis axis = ValueAxis::GenerationCapacity;

  ProbabilityTable to_probability_table() const;
};

/// Normalized generation capacity vs. normalized degree (WECC reference system).
const PublishedTable& published_generation_table();

/// Normalized load vs. normalized degree, legible cells only.
const PublishedTable& published_load_table();

inline ProbabilityTable default_generation_table() {
  return published_generation_table().to_probability_table();
}

inline ProbabilityTable default_load_table() {
  return published_load_table().to_probability_table();
}

}  // namespace gridseed
