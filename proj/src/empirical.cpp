#include "gridseed/empirical.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include <Eigen/QR>

namespace gridseed {

void CaseSnapshot::validate() const {
  auto check = [&](const std::map<BusId, double>& values, BusType type, const char* what) {
    const auto expected = grid.buses_of_type(type);
    if (values.size() != expected.size() ||
        !std::equal(expected.begin(), expected.end(), values.begin(),
                    [](BusId id, const auto& kv) { return kv.first == id; })) {
      throw Error(ErrorCode::SchemaError,
                  std::string(what) + " keys do not match the buses of that type");
    }
    for (const auto& [id, mw] : values) {
      if (!(mw >= 0.0) || !std::isfinite(mw)) {
        throw Error(ErrorCode::SchemaError,
                    std::string(what) + " at bus " + std::to_string(id) + " is negative");
      }
    }
  };
  check(gen_capacity, BusType::Generation, "generation capacity");
  check(load, BusType::Load, "load");
}

CountMatrix joint_counts(const Eigen::Ref<const Eigen::VectorXd>& normalized_values,
                         const Eigen::Ref<const Eigen::VectorXd>& normalized_degrees,
                         const BinEdges& edges) {
  if (normalized_values.size() != normalized_degrees.size()) {
    throw Error(ErrorCode::LengthMismatch, "joint_counts: length mismatch");
  }
  CountMatrix counts = CountMatrix::Zero();
  for (Eigen::Index i = 0; i < normalized_values.size(); ++i) {
    ++counts(bin_index(normalized_values(i), edges), bin_index(normalized_degrees(i), edges));
  }
  return counts;
}

ProbabilityTable extract_joint_table(const Eigen::Ref<const Eigen::VectorXd>& values,
                                     const Eigen::Ref<const Eigen::VectorXi>& degrees,
                                     const BinEdges& edges, ValueAxis axis) {
  if (values.size() != degrees.size()) {
    throw Error(ErrorCode::LengthMismatch, "extract_joint_table: length mismatch");
  }
  if (values.size() == 0 || !(values.maxCoeff() > 0.0) || degrees.maxCoeff() <= 0) {
    throw Error(ErrorCode::DegenerateInput,
                "extract_joint_table: need at least one pair with positive value and degree");
  }
  const Eigen::VectorXd pv = normalize_values(values);
  const Eigen::VectorXd kv = normalize_values(degrees.cast<double>());
  const CountMatrix counts = joint_counts(pv, kv, edges);
  return validate_table(counts.cast<double>() / static_cast<double>(values.size()), edges, axis);
}

ExponentialFit fit_exponential_with_tail(const Eigen::Ref<const Eigen::VectorXd>& values,
                                         double tail_fraction) {
  const Eigen::Index n = values.size();
  if (n == 0) throw Error(ErrorCode::EmptyInput, "fit_exponential_with_tail: empty input");
  if (!(tail_fraction >= 0.0 && tail_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidModel, "tail fraction must lie in [0, 1)");
  }
  const auto tails = static_cast<Eigen::Index>(std::llround(tail_fraction * static_cast<double>(n)));
  if (tails >= n) {
    throw Error(ErrorCode::DegenerateInput, "fit_exponential_with_tail: no values left after tail cut");
  }

  // Order by value, then index, so the flagged set is independent of input order up to ties.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return values(a) != values(b) ? values(a) > values(b) : a < b;
  });

  ExponentialFit fit;
  fit.tail_indices.assign(order.begin(), order.begin() + tails);
  std::sort(fit.tail_indices.begin(), fit.tail_indices.end());

  // Sum the body in sorted order so beta does not depend on input permutation.
  std::vector<double> body;
  body.reserve(static_cast<std::size_t>(n - tails));
  for (auto it = order.begin() + tails; it != order.end(); ++it) body.push_back(values(*it));
  std::sort(body.begin(), body.end());
  fit.beta = std::accumulate(body.begin(), body.end(), 0.0) / static_cast<double>(body.size());
  return fit;
}

ScalingLaw<double> fit_scaling_law(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) {
    throw Error(ErrorCode::InsufficientPoints, "fit_scaling_law: need at least 3 points");
  }
  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd design(m, 3);
  Eigen::VectorXd rhs(m);
  std::set<double> sizes;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto [n, total] = points[static_cast<std::size_t>(i)];
    if (!(n >= 2.0) || !(total > 0.0)) {
      throw Error(ErrorCode::InvalidNetworkSize,
                  "fit_scaling_law: sizes must be >= 2 and totals positive");
    }
    sizes.insert(n);
    const double x = std::log10(n);
    design.row(i) << x * x, x, 1.0;
    rhs(i) = std::log10(total);
  }
  if (sizes.size() < 3) {
    throw Error(ErrorCode::CollinearSizes, "fit_scaling_law: need at least 3 distinct sizes");
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) {
    throw Error(ErrorCode::CollinearSizes, "fit_scaling_law: design matrix is rank deficient");
  }
  const Eigen::Vector3d coef = qr.solve(rhs);
  return {coef(0), coef(1), coef(2)};
}

Histogram empirical_pdf(const Eigen::Ref<const Eigen::VectorXd>& values, int bin_count) {
  if (values.size() == 0) throw Error(ErrorCode::EmptyInput, "empirical_pdf: empty input");
  if (bin_count < 1) throw Error(ErrorCode::InvalidModel, "empirical_pdf: bin_count must be >= 1");
  if ((values.array() < 0.0).any() || !values.allFinite()) {
    throw Error(ErrorCode::OutOfRange, "empirical_pdf: values must be finite and nonnegative");
  }
  double upper = values.maxCoeff();
  // All-zero data still gets a well-defined unit-width range.
  if (upper <= 0.0) upper = 1.0;
  const double width = upper / bin_count;

  Histogram h;
  h.edges = Eigen::VectorXd::LinSpaced(bin_count + 1, 0.0, upper);
  h.edges(bin_count) = upper;
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(bin_count);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const auto b = std::min<Eigen::Index>(static_cast<Eigen::Index>(values(i) / width), bin_count - 1);
    counts(b) += 1.0;
  }
  h.densities = counts / (static_cast<double>(values.size()) * width);
  return h;
}

EmpiricalReport analyze_case(const CaseSnapshot& snapshot, ValueAxis axis, double tail_fraction,
                             int bin_count, const BinEdges& edges) {
  snapshot.validate();
  const auto& source = axis == ValueAxis::GenerationCapacity ? snapshot.gen_capacity : snapshot.load;
  if (source.empty()) {
    throw Error(axis == ValueAxis::GenerationCapacity ? ErrorCode::NoGenerationBuses
                                                      : ErrorCode::NoLoadBuses,
                "analyze_case: no buses on the requested axis");
  }
  const Eigen::VectorXi all_degrees = node_degrees(snapshot.grid);
  const auto n = static_cast<Eigen::Index>(source.size());
  Eigen::VectorXd values(n);
  Eigen::VectorXi degrees(n);
  Eigen::Index i = 0;
  for (const auto& [id, mw] : source) {
    values(i) = mw;
    degrees(i) = all_degrees(id);
    ++i;
  }

  EmpiricalReport report;
  report.axis = axis;
  report.sample_size = n;
  report.pdf = empirical_pdf(values, bin_count);
  const ExponentialFit fit = fit_exponential_with_tail(values, n > 1 ? tail_fraction : 0.0);
  report.fitted_beta = fit.beta;
  double tail_mw = 0.0;
  for (auto t : fit.tail_indices) tail_mw += values(t);
  report.tail_share = values.sum() > 0.0 ? tail_mw / values.sum() : 0.0;
  report.joint_table = extract_joint_table(values, degrees, edges, axis);
  try {
    report.pearson_rho = pearson_correlation(normalize_values(values),
                                             normalize_values(degrees.cast<double>()));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConstantVector && e.code() != ErrorCode::InsufficientPoints) throw;
  }
  return report;
}

}  // namespace gridseed
