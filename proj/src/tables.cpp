#include "gridseed/tables.hpp"

namespace gridseed {

namespace {

// Published layout lists the highest value bin first; flip to ascending rows.
JointMatrix from_top_down(const JointMatrix& printed) { return printed.colwise().reverse(); }

BinVector reversed(const BinVector& v) { return v.reverse(); }

PublishedTable make_generation_table() {
  JointMatrix printed;
  // degree bins:  [0,.01) [.01,.03) [.03,.06) [.06,.1) [.1,.15) [.15,.21) [.21,.28) [.28,.36) [.36,.45) [.45,.55) [.55,.66) [.66,.78) [.78,1]
  printed <<
      0.000, 0.001, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.001, 0.000, 0.000, 0.000,  // [0.78, 1.00]
      0.000, 0.000, 0.000, 0.001, 0.000, 0.000, 0.001, 0.001, 0.001, 0.000, 0.000, 0.000, 0.000,  // [0.66, 0.78)
      0.000, 0.000, 0.001, 0.000, 0.000, 0.000, 0.001, 0.001, 0.000, 0.000, 0.000, 0.000, 0.000,  // [0.55, 0.66)
      0.000, 0.001, 0.000, 0.004, 0.008, 0.000, 0.002, 0.001, 0.000, 0.001, 0.000, 0.001, 0.000,  // [0.45, 0.55)
      0.006, 0.002, 0.000, 0.009, 0.008, 0.003, 0.003, 0.002, 0.000, 0.000, 0.000, 0.000, 0.000,  // [0.36, 0.45)
      0.003, 0.011, 0.012, 0.017, 0.013, 0.007, 0.003, 0.002, 0.000, 0.001, 0.000, 0.000, 0.000,  // [0.28, 0.36)
      0.009, 0.024, 0.016, 0.024, 0.013, 0.004, 0.003, 0.001, 0.000, 0.000, 0.000, 0.000, 0.001,  // [0.21, 0.28)
      0.025, 0.027, 0.016, 0.013, 0.009, 0.002, 0.002, 0.000, 0.000, 0.000, 0.000, 0.000, 0.001,  // [0.15, 0.21)
      0.027, 0.031, 0.010, 0.010, 0.005, 0.004, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000,  // [0.10, 0.15)
      0.033, 0.017, 0.003, 0.003, 0.005, 0.000, 0.001, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000,  // [0.06, 0.10)
      0.090, 0.030, 0.010, 0.008, 0.001, 0.000, 0.001, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000,  // [0.03, 0.06)
      0.082, 0.140, 0.070, 0.040, 0.010, 0.001, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000,  // [0.01, 0.03)
      0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000;  // [0.00, 0.01)
  BinVector value_marginal_top_down;
  value_marginal_top_down << 0.002, 0.004, 0.003, 0.018, 0.034, 0.072, 0.097, 0.097, 0.088,
      0.063, 0.151, 0.360, 0.000;
  BinVector degree_marginal;
  degree_marginal << 0.283, 0.291, 0.147, 0.141, 0.077, 0.022, 0.017, 0.008, 0.001, 0.003,
      0.000, 0.001, 0.002;

  PublishedTable t;
  t.cells = from_top_down(printed);
  t.value_marginal = reversed(value_marginal_top_down);
  t.degree_marginal = degree_marginal;
  t.total = 1.000;
  t.axis = ValueAxis::GenerationCapacity;
  return t;
}

PublishedTable make_load_table() {
  // Only the first 13 printed cells of each row line up with the degree bins;
  // rows above [0.36, 0.45) print no cells, only marginals.
  JointMatrix printed = JointMatrix::Zero();
  printed.row(4) << 0.003, 0.004, 0.006, 0.010, 0.010, 0.003, 0.001, 0.001, 0, 0, 0, 0, 0;     // [0.36, 0.45)
  printed.row(5) << 0.004, 0.009, 0.019, 0.018, 0.009, 0.003, 0.002, 0.001, 0, 0, 0, 0, 0;     // [0.28, 0.36)
  printed.row(6) << 0.012, 0.027, 0.037, 0.022, 0.013, 0.001, 0.002, 0.001, 0.001, 0, 0, 0, 0; // [0.21, 0.28)
  printed.row(7) << 0.030, 0.038, 0.027, 0.015, 0.003, 0.001, 0.001, 0, 0, 0, 0, 0, 0;         // [0.15, 0.21)
  printed.row(8) << 0.082, 0.066, 0.022, 0.004, 0.002, 0.003, 0.001, 0, 0, 0, 0, 0, 0;         // [0.10, 0.15)
  printed.row(9) << 0.135, 0.058, 0.010, 0.002, 0, 0, 0, 0, 0, 0, 0, 0, 0;                     // [0.06, 0.10)
  printed.row(10) << 0.196, 0.033, 0.005, 0, 0.001, 0, 0, 0, 0, 0, 0, 0, 0;                    // [0.03, 0.06)
  BinVector value_marginal_top_down;
  value_marginal_top_down << 0.002, 0.003, 0.008, 0.012, 0.041, 0.069, 0.118, 0.119, 0.183,
      0.205, 0.235, 0.000, 0.000;
  BinVector degree_marginal;
  degree_marginal << 0.464, 0.238, 0.130, 0.076, 0.042, 0.018, 0.012, 0.005, 0.002, 0.005,
      0.001, 0.005, 0.001;

  PublishedTable t;
  t.cells = from_top_down(printed);
  t.value_marginal = reversed(value_marginal_top_down);
  t.degree_marginal = degree_marginal;
  t.total = 1.000;
  t.axis = ValueAxis::Load;
  return t;
}

}  // namespace

ProbabilityTable PublishedTable::to_probability_table() const {
  return validate_table(cells / cells.sum(), default_bin_edges(), axis);
}

const PublishedTable& published_generation_table() {
  static const PublishedTable table = make_generation_table();
  return table;
}

const PublishedTable& published_load_table() {
  static const PublishedTable table = make_load_table();
  return table;
}

}  // namespace gridseed
