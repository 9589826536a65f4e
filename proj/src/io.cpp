#include "gridseed/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "gridseed/tables.hpp"

namespace gridseed::io {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string_view rest(line);
  while (true) {
    const auto comma = rest.find(',');
    fields.push_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return fields;
}

/// Minimal CSV reader: a header row naming the columns, then records.
/// Blank lines and lines starting with '#' are skipped.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {
    std::vector<std::string> header;
    if (!next(header)) throw ParseError(name_, line_, "missing header row");
    for (std::size_t i = 0; i < header.size(); ++i) columns_[lower(header[i])] = i;
  }

  std::optional<std::size_t> column(const std::string& key) const {
    const auto it = columns_.find(key);
    if (it == columns_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require(const std::string& key) const {
    if (auto c = column(key)) return *c;
    throw ParseError(name_, header_line_, "header lacks column '" + key + "'");
  }

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      const std::string t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      fields = split_csv(t);
      if (header_line_ == 0) header_line_ = line_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(name_, line_, message);
  }

  const std::string& field(const std::vector<std::string>& fields, std::size_t col) const {
    if (col >= fields.size()) fail("missing field in column " + std::to_string(col + 1));
    return fields[col];
  }

  double number(const std::vector<std::string>& fields, std::size_t col) const {
    const std::string& s = field(fields, col);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
      fail("'" + s + "' is not a number");
    }
    return value;
  }

  long line() const { return line_; }
  const std::string& name() const { return name_; }

 private:
  std::istream& in_;
  std::string name_;
  long line_ = 0;
  long header_line_ = 0;
  std::map<std::string, std::size_t> columns_;
};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

BusType parse_bus_type(const std::string& s, const CsvReader& reader) {
  if (s == "G" || s == "g") return BusType::Generation;
  if (s == "L" || s == "l") return BusType::Load;
  if (s == "C" || s == "c") return BusType::Connection;
  reader.fail("bus type '" + s + "' is not one of G, L, C");
}

char bus_type_code(BusType t) {
  switch (t) {
    case BusType::Generation: return 'G';
    case BusType::Load: return 'L';
    case BusType::Connection: return 'C';
  }
  return 'C';
}

std::map<BusId, double> read_bus_values(const std::filesystem::path& path, const Topology& topo) {
  std::ifstream in = open_input(path);
  CsvReader reader(in, path.filename().string());
  const auto bus_col = reader.require("bus");
  const auto mw_col = reader.require("mw");
  std::map<BusId, double> values;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    const std::string& label = reader.field(fields, bus_col);
    const auto id = topo.find(label);
    if (!id) reader.fail("unknown bus '" + label + "'");
    if (!values.emplace(*id, reader.number(fields, mw_col)).second) {
      reader.fail("duplicate bus '" + label + "'");
    }
  }
  return values;
}

// --- JSON helpers ---------------------------------------------------------

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorCode::SchemaError, what);
}

const Json& member(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) schema_error(std::string("missing field '") + key + "'");
  return doc.at(key);
}

double number_of(const Json& j, const char* what) {
  if (!j.is_number()) schema_error(std::string(what) + " must be a number");
  return j.get<double>();
}

template <int Size>
Eigen::Matrix<double, Size, 1> vector_of(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != Size) {
    schema_error(std::string(what) + " must be an array of " + std::to_string(Size) + " numbers");
  }
  Eigen::Matrix<double, Size, 1> v;
  for (int i = 0; i < Size; ++i) v(i) = number_of(j[static_cast<std::size_t>(i)], what);
  return v;
}

template <typename Derived>
Json array_of(const Eigen::MatrixBase<Derived>& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

JointMatrix joint_of(const Json& j) {
  if (!j.is_array() || j.size() != kTableBins) schema_error("joint must be a 13 x 13 array");
  JointMatrix m;
  for (int r = 0; r < kTableBins; ++r) {
    m.row(r) = vector_of<kTableBins>(j[static_cast<std::size_t>(r)], "joint row").transpose();
  }
  return m;
}

CountMatrix counts_of(const Json& j) {
  if (!j.is_array() || j.size() != kTableBins) schema_error("count matrix must be 13 x 13");
  CountMatrix m;
  for (int r = 0; r < kTableBins; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != kTableBins) schema_error("count matrix must be 13 x 13");
    for (int c = 0; c < kTableBins; ++c) {
      if (!row[static_cast<std::size_t>(c)].is_number_integer()) schema_error("counts must be integers");
      m(r, c) = row[static_cast<std::size_t>(c)].get<int>();
    }
  }
  return m;
}

ValueAxis axis_of(const Json& j) {
  if (j == "generation") return ValueAxis::GenerationCapacity;
  if (j == "load") return ValueAxis::Load;
  schema_error("axis must be \"generation\" or \"load\"");
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

// --- Topology -------------------------------------------------------------

std::optional<BusId> Topology::find(const std::string& label) const {
  const auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Topology::add_label(const std::string& label) {
  if (!index_.emplace(label, static_cast<BusId>(labels.size())).second) return false;
  labels.push_back(label);
  return true;
}

Topology read_topology(std::istream& buses, std::istream& branches, const std::string& bus_name,
                       const std::string& branch_name) {
  Topology topo;
  std::vector<Bus> bus_list;
  {
    CsvReader reader(buses, bus_name);
    const auto id_col = reader.require("id");
    const auto type_col = reader.require("type");
    std::vector<std::string> fields;
    while (reader.next(fields)) {
      const std::string& label = reader.field(fields, id_col);
      if (label.empty()) reader.fail("empty bus id");
      const auto type = parse_bus_type(reader.field(fields, type_col), reader);
      const auto id = static_cast<BusId>(topo.labels.size());
      if (!topo.add_label(label)) reader.fail("duplicate bus id '" + label + "'");
      bus_list.push_back({id, type});
    }
  }
  std::vector<Branch> branch_list;
  {
    CsvReader reader(branches, branch_name);
    const auto from_col = reader.require("from");
    const auto to_col = reader.require("to");
    const auto x_col = reader.column("x");
    std::vector<std::string> fields;
    while (reader.next(fields)) {
      Branch br;
      const auto from = topo.find(reader.field(fields, from_col));
      const auto to = topo.find(reader.field(fields, to_col));
      if (!from || !to) reader.fail("branch references an unknown bus");
      if (*from == *to) reader.fail("branch is a self-loop");
      br.from = *from;
      br.to = *to;
      if (x_col && *x_col < fields.size() && !fields[*x_col].empty()) {
        const double x = reader.number(fields, *x_col);
        if (!(x > 0.0)) reader.fail("reactance must be positive");
        br.reactance = x;
      }
      branch_list.push_back(br);
    }
  }
  topo.grid = build_grid(std::move(bus_list), std::move(branch_list));
  return topo;
}

Topology parse_topology(const std::filesystem::path& dir) {
  std::ifstream buses = open_input(dir / "buses.csv");
  std::ifstream branches = open_input(dir / "branches.csv");
  return read_topology(buses, branches);
}

void write_topology(const Topology& topology, std::ostream& buses, std::ostream& branches) {
  buses << "id,type\n";
  for (const auto& bus : topology.grid.buses()) {
    buses << topology.labels[static_cast<std::size_t>(bus.id)] << ',' << bus_type_code(bus.type) << '\n';
  }
  branches << "from,to,x\n";
  for (const auto& br : topology.grid.branches()) {
    branches << topology.labels[static_cast<std::size_t>(br.from)] << ','
             << topology.labels[static_cast<std::size_t>(br.to)] << ',';
    if (br.reactance) branches << format_double(*br.reactance);
    branches << '\n';
  }
}

void write_topology(const Topology& topology, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream buses;
  std::ostringstream branches;
  write_topology(topology, buses, branches);
  write_text_atomic(dir / "buses.csv", buses.str());
  write_text_atomic(dir / "branches.csv", branches.str());
}

CaseFiles parse_case(const std::filesystem::path& dir) {
  CaseFiles files{parse_topology(dir), {}};
  files.snapshot.grid = files.topology.grid;
  files.snapshot.gen_capacity = read_bus_values(dir / "gen.csv", files.topology);
  files.snapshot.load = read_bus_values(dir / "load.csv", files.topology);
  files.snapshot.validate();
  return files;
}

// --- Statistics -----------------------------------------------------------

ProbabilityTable StatsSpec::table() const {
  if (renormalize) {
    const double total = joint.sum();
    if (!(total > 0.0)) throw Error(ErrorCode::NotADistribution, "table has no mass");
    return validate_table(joint / total, bin_edges, axis);
  }
  return validate_table(joint, bin_edges, axis);
}

AssignmentOptions StatsSpec::options(std::uint64_t seed) const {
  AssignmentOptions o;
  o.seed = seed;
  o.scaling_law = scaling_law;
  o.beta = beta;
  o.tail_fraction = tail_fraction;
  o.tail_multiplier = tail_multiplier;
  o.table = table();
  return o;
}

StatsSpec default_stats(ValueAxis axis) {
  const bool gen = axis == ValueAxis::GenerationCapacity;
  const PublishedTable& published = gen ? published_generation_table() : published_load_table();
  StatsSpec spec;
  spec.axis = axis;
  spec.scaling_law = gen ? kGenerationScalingLaw : kLoadScalingLaw;
  spec.beta = gen ? std::nullopt : std::optional<double>(kDefaultLoadBeta);
  spec.joint = published.cells;
  spec.renormalize = true;
  spec.marginals = PublishedMarginals{published.value_marginal, published.degree_marginal,
                                      published.total};
  return spec;
}

Json to_json(const StatsSpec& spec) {
  Json doc;
  doc["axis"] = to_string(spec.axis);
  doc["scaling_law"] = {{"a", spec.scaling_law.a}, {"b", spec.scaling_law.b}, {"c", spec.scaling_law.c}};
  doc["beta"] = optional_number(spec.beta);
  doc["tail_fraction"] = spec.tail_fraction;
  doc["tail_multiplier"] = {spec.tail_multiplier[0], spec.tail_multiplier[1]};
  doc["bin_edges"] = array_of(spec.bin_edges);
  doc["joint"] = joint_matrix_json(spec.joint);
  doc["renormalize"] = spec.renormalize;
  if (spec.marginals) {
    doc["marginals"] = {{"value", array_of(spec.marginals->value)},
                        {"degree", array_of(spec.marginals->degree)},
                        {"total", spec.marginals->total}};
  }
  return doc;
}

StatsSpec stats_from_json(const Json& doc) {
  StatsSpec spec;
  spec.axis = axis_of(member(doc, "axis"));
  const Json& law = member(doc, "scaling_law");
  spec.scaling_law = {number_of(member(law, "a"), "scaling_law.a"),
                      number_of(member(law, "b"), "scaling_law.b"),
                      number_of(member(law, "c"), "scaling_law.c")};
  const Json& beta = member(doc, "beta");
  if (!beta.is_null()) spec.beta = number_of(beta, "beta");
  spec.tail_fraction = number_of(member(doc, "tail_fraction"), "tail_fraction");
  const auto mult = vector_of<2>(member(doc, "tail_multiplier"), "tail_multiplier");
  spec.tail_multiplier = {mult(0), mult(1)};
  spec.bin_edges = vector_of<kTableBins + 1>(member(doc, "bin_edges"), "bin_edges");
  spec.joint = joint_of(member(doc, "joint"));
  if (doc.contains("renormalize")) {
    if (!doc["renormalize"].is_boolean()) schema_error("renormalize must be a boolean");
    spec.renormalize = doc["renormalize"].get<bool>();
  }
  if (doc.contains("marginals")) {
    const Json& m = doc["marginals"];
    spec.marginals = PublishedMarginals{vector_of<kTableBins>(member(m, "value"), "marginals.value"),
                                        vector_of<kTableBins>(member(m, "degree"), "marginals.degree"),
                                        number_of(member(m, "total"), "marginals.total")};
  }
  spec.options(0).validate();
  return spec;
}

// --- Assignment -----------------------------------------------------------

Json count_matrix_json(const CountMatrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < kTableBins; ++r) rows.push_back(array_of(m.row(r)));
  return rows;
}

Json joint_matrix_json(const JointMatrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < kTableBins; ++r) rows.push_back(array_of(m.row(r)));
  return rows;
}

Json to_json(const Assignment& a, const StatsSpec& stats, const Topology& topology) {
  auto label = [&](BusId id) { return topology.labels.at(static_cast<std::size_t>(id)); };
  Json doc;
  doc["axis"] = to_string(a.axis);
  doc["seed"] = a.seed;
  doc["totals"] = {{"mw", a.total}, {"law", a.law_total}, {"target", a.target_total}};
  doc["rescaled"] = a.rescaled;
  doc["beta"] = a.beta;
  Json values = Json::array();
  for (std::size_t i = 0; i < a.buses.size(); ++i) {
    values.push_back({{"bus", label(a.buses[i])}, {"mw", a.mw(static_cast<Eigen::Index>(i))}});
  }
  doc["values"] = std::move(values);
  Json tails = Json::array();
  for (BusId b : a.tail_buses) tails.push_back(label(b));
  doc["tail_buses"] = std::move(tails);
  doc["realized_stats"] = {{"pearson_rho", optional_number(a.pearson_rho)},
                           {"target_counts", count_matrix_json(a.target_counts)},
                           {"realized_joint", joint_matrix_json(a.realized_table.joint())}};
  doc["stats"] = to_json(stats);
  return doc;
}

AssignmentDocument assignment_from_json(const Json& doc, const Topology& topology) {
  AssignmentDocument out;
  Assignment& a = out.assignment;
  a.axis = axis_of(member(doc, "axis"));
  const Json& seed = member(doc, "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
    schema_error("seed must be a nonnegative integer");
  }
  a.seed = seed.get<std::uint64_t>();
  const Json& totals = member(doc, "totals");
  a.total = number_of(member(totals, "mw"), "totals.mw");
  a.law_total = number_of(member(totals, "law"), "totals.law");
  a.target_total = number_of(member(totals, "target"), "totals.target");
  const Json& rescaled = member(doc, "rescaled");
  if (!rescaled.is_boolean()) schema_error("rescaled must be a boolean");
  a.rescaled = rescaled.get<bool>();
  a.beta = number_of(member(doc, "beta"), "beta");

  auto bus_of = [&](const Json& j) {
    if (!j.is_string()) schema_error("bus labels must be strings");
    const auto id = topology.find(j.get<std::string>());
    if (!id) schema_error("unknown bus '" + j.get<std::string>() + "'");
    return *id;
  };

  std::map<BusId, double> values;
  const Json& list = member(doc, "values");
  if (!list.is_array()) schema_error("values must be an array");
  for (const Json& entry : list) {
    const BusId id = bus_of(member(entry, "bus"));
    if (!values.emplace(id, number_of(member(entry, "mw"), "values.mw")).second) {
      schema_error("duplicate bus in values");
    }
  }
  a.mw.resize(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const auto& [id, mw] : values) {
    a.buses.push_back(id);
    a.mw(i++) = mw;
  }
  const Json& tails = member(doc, "tail_buses");
  if (!tails.is_array()) schema_error("tail_buses must be an array");
  for (const Json& t : tails) a.tail_buses.push_back(bus_of(t));
  std::sort(a.tail_buses.begin(), a.tail_buses.end());

  const Json& realized = member(doc, "realized_stats");
  const Json& rho = member(realized, "pearson_rho");
  if (!rho.is_null()) a.pearson_rho = number_of(rho, "pearson_rho");
  a.target_counts = counts_of(member(realized, "target_counts"));
  out.stats = stats_from_json(member(doc, "stats"));
  // The realized joint is a recorded observation; renormalize only if it carries mass.
  const JointMatrix realized_joint = joint_of(member(realized, "realized_joint"));
  if (realized_joint.sum() > 0.0) {
    a.realized_table = validate_table(realized_joint, out.stats.bin_edges, a.axis);
  }
  return out;
}

Json to_json(const EmpiricalReport& report) {
  Json doc;
  doc["axis"] = to_string(report.axis);
  doc["sample_size"] = report.sample_size;
  doc["fitted_beta"] = report.fitted_beta;
  doc["pearson_rho"] = optional_number(report.pearson_rho);
  doc["tail_share"] = report.tail_share;
  doc["pdf"] = {{"edges", array_of(report.pdf.edges)}, {"densities", array_of(report.pdf.densities)}};
  doc["joint"] = joint_matrix_json(report.joint_table.joint());
  doc["bin_edges"] = array_of(report.joint_table.edges());
  return doc;
}

// --- Files ----------------------------------------------------------------

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot move " + tmp.string() + " to " + path.string());
}

void write_json_atomic(const std::filesystem::path& path, const Json& doc) {
  write_text_atomic(path, doc.dump(2) + "\n");
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

}  // namespace gridseed::io
