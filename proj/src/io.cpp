#include "latboot/io.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

namespace latboot {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    out.push_back(trim(field));
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

template <Scalar S>
bool try_parse_row(const std::vector<std::string>& fields, std::vector<S>& row) {
  row.clear();
  try {
    for (const auto& f : fields) {
      row.push_back(parse_scalar<S>(f));
    }
  } catch (const ParseError&) {
    return false;
  }
  return true;
}

template <Scalar S>
S coefficient_from_json(const nlohmann::json& c) {
  if (c.is_string()) {
    return parse_scalar<S>(c.get<std::string>());
  }
  if (c.is_number_integer()) {
    return S(c.get<long>());
  }
  if (c.is_number()) {
    // Exact mode reads the shortest decimal text of the double.
    return parse_scalar<S>(to_string(c.get<double>()));
  }
  throw ParseError("coefficient must be a string or number, got " + c.dump());
}

Rational rational_from_json(const nlohmann::json& v, const std::string& what) {
  try {
    return coefficient_from_json<Rational>(v);
  } catch (const ParseError& e) {
    throw ParseError(what + ": " + e.what());
  }
}

}  // namespace

template <Scalar S>
Dataset<S> parse_dataset(std::istream& in, const std::string& source_name) {
  std::vector<std::vector<S>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool seen_first = false;
  std::vector<S> row;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') {
      continue;
    }
    const auto fields = split_fields(t);
    if (!try_parse_row<S>(fields, row)) {
      if (!seen_first) {
        seen_first = true;  // header
        continue;
      }
      throw ParseError(source_name + ":" + std::to_string(line_no) + ": not a numeric row: " + t);
    }
    seen_first = true;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DimensionError(source_name + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(rows.front().size()) + " columns, got " + std::to_string(row.size()));
    }
    rows.push_back(row);
  }
  if (rows.empty()) {
    throw DimensionError(source_name + ": no data rows");
  }
  return Dataset<S>::from_rows(rows);
}

template <Scalar S>
Dataset<S> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open dataset " + path.string());
  }
  return parse_dataset<S>(in, path.string());
}

template <Scalar S>
MomentPolynomial<S> functional_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("d") || !j.contains("terms")) {
    throw ParseError("functional JSON needs \"d\" and \"terms\"");
  }
  if (!j["d"].is_number_integer()) {
    throw ParseError("functional \"d\" must be an integer");
  }
  MomentPolynomial<S> poly(j["d"].get<int>());
  if (!j["terms"].is_array()) {
    throw ParseError("functional \"terms\" must be an array");
  }
  for (const auto& t : j["terms"]) {
    if (!t.contains("blocks") || !t.contains("coeff")) {
      throw ParseError("each term needs \"blocks\" and \"coeff\": " + t.dump());
    }
    std::vector<std::vector<int>> blocks;
    try {
      blocks = t["blocks"].get<std::vector<std::vector<int>>>();
    } catch (const nlohmann::json::exception&) {
      throw ParseError("term blocks must be arrays of integer labels: " + t["blocks"].dump());
    }
    for (const auto& b : blocks) {
      if (b.empty()) {
        throw ParseError("empty block in term " + t["blocks"].dump() + " (use \"blocks\": [] for the constant)");
      }
    }
    poly.add(LabeledTerm(std::move(blocks)), coefficient_from_json<S>(t["coeff"]));
  }
  return poly;
}

template <Scalar S>
nlohmann::json functional_to_json(const MomentPolynomial<S>& poly) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [term, c] : poly.terms()) {
    terms.push_back({{"blocks", term.blocks()}, {"coeff", to_string(c)}});
  }
  return {{"d", poly.dimension()}, {"terms", terms}};
}

template <Scalar S>
MomentPolynomial<S> variance_functional() {
  MomentPolynomial<S> poly(1);
  poly.add(LabeledTerm({{0, 0}}), S(1));
  poly.add(LabeledTerm({{0}, {0}}), S(-1));
  return poly;
}

template <Scalar S>
MomentPolynomial<S> read_functional(const std::string& path_or_name) {
  if (path_or_name == "variance") {
    return variance_functional<S>();
  }
  return functional_from_json<S>(read_json(path_or_name));
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open " + path.string());
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Population population_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ParseError("population JSON needs a string \"kind\"");
  }
  const auto kind = j["kind"].get<std::string>();
  if (kind == "normal") {
    if (!j.contains("mean") || !j.contains("variance") || !j["mean"].is_array() || !j["variance"].is_array()) {
      throw ParseError("normal population needs \"mean\" and \"variance\" arrays");
    }
    std::vector<Rational> mean;
    std::vector<Rational> variance;
    for (const auto& v : j["mean"]) {
      mean.push_back(rational_from_json(v, "mean"));
    }
    for (const auto& v : j["variance"]) {
      variance.push_back(rational_from_json(v, "variance"));
    }
    return Population::normal(std::move(mean), std::move(variance));
  }
  if (kind == "table") {
    if (!j.contains("d") || !j["d"].is_number_integer() || !j.contains("moments") || !j["moments"].is_array()) {
      throw ParseError("table population needs integer \"d\" and a \"moments\" array");
    }
    MomentTable<Rational> table(j["d"].get<int>());
    for (const auto& entry : j["moments"]) {
      if (!entry.contains("labels") || !entry.contains("value")) {
        throw ParseError("moment entry needs \"labels\" and \"value\": " + entry.dump());
      }
      table.insert(entry["labels"].get<std::vector<int>>(), rational_from_json(entry["value"], "moment value"));
    }
    return Population::table(std::move(table));
  }
  if (kind == "dataset") {
    if (!j.contains("path") || !j["path"].is_string()) {
      throw ParseError("dataset population needs a \"path\"");
    }
    std::filesystem::path p = j["path"].get<std::string>();
    if (p.is_relative() && !base_dir.empty()) {
      p = base_dir / p;
    }
    return Population::empirical(read_dataset<Rational>(p));
  }
  throw ParseError("unknown population kind \"" + kind + "\" (expected normal, table or dataset)");
}

Population read_population(const std::filesystem::path& path) {
  return population_from_json(read_json(path), path.parent_path());
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw DimensionError("table " + name + " row has " + std::to_string(row.size()) + " cells, expected " +
                         std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

Table& Artifact::add_table(std::string name, std::vector<std::string> columns) {
  tables.push_back(Table{std::move(name), std::move(columns), {}});
  return tables.back();
}

std::string cell_text(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, double>) {
          return to_string(v);
        } else {
          return std::to_string(v);
        }
      },
      cell);
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_csv(const Artifact& artifact, std::ostream& out) {
  for (const auto& [key, value] : artifact.provenance) {
    out << "# " << key << ": " << value << '\n';
  }
  for (const auto& table : artifact.tables) {
    out << "# section: " << table.name << '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out << (c ? "," : "") << csv_escape(table.columns[c]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        out << (c ? "," : "") << csv_escape(cell_text(row[c]));
      }
      out << '\n';
    }
  }
}

nlohmann::json artifact_to_json(const Artifact& artifact) {
  nlohmann::json prov = nlohmann::json::object();
  for (const auto& [key, value] : artifact.provenance) {
    prov[key] = value;
  }
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& table : artifact.tables) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
      nlohmann::json r = nlohmann::json::array();
      for (const auto& cell : row) {
        std::visit(
            [&r](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>) {
                if (std::isfinite(v)) {
                  r.push_back(v);
                } else {
                  r.push_back(to_string(v));
                }
              } else {
                r.push_back(v);
              }
            },
            cell);
      }
      rows.push_back(std::move(r));
    }
    tables.push_back({{"name", table.name}, {"columns", table.columns}, {"rows", std::move(rows)}});
  }
  return {{"provenance", prov}, {"tables", tables}};
}

void write_json(const Artifact& artifact, std::ostream& out) { out << artifact_to_json(artifact).dump(2) << '\n'; }

Format parse_format(const std::string& text) {
  if (text == "csv") {
    return Format::csv;
  }
  if (text == "json") {
    return Format::json;
  }
  throw ParseError("unknown format \"" + text + "\" (expected csv or json)");
}

void write_artifact(const Artifact& artifact, const std::string& path, std::optional<Format> format) {
  Format f = format.value_or(std::filesystem::path(path).extension() == ".json" ? Format::json : Format::csv);
  auto emit = [&](std::ostream& out) {
    if (f == Format::json) {
      write_json(artifact, out);
    } else {
      write_csv(artifact, out);
    }
  };
  if (path.empty() || path == "-") {
    emit(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write " + path);
  }
  emit(out);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template Dataset<Rational> parse_dataset<Rational>(std::istream&, const std::string&);
template Dataset<double> parse_dataset<double>(std::istream&, const std::string&);
template Dataset<Rational> read_dataset<Rational>(const std::filesystem::path&);
template Dataset<double> read_dataset<double>(const std::filesystem::path&);
template MomentPolynomial<Rational> functional_from_json<Rational>(const nlohmann::json&);
template MomentPolynomial<double> functional_from_json<double>(const nlohmann::json&);
template nlohmann::json functional_to_json<Rational>(const MomentPolynomial<Rational>&);
template nlohmann::json functional_to_json<double>(const MomentPolynomial<double>&);
template MomentPolynomial<Rational> read_functional<Rational>(const std::string&);
template MomentPolynomial<double> read_functional<double>(const std::string&);
template MomentPolynomial<Rational> variance_functional<Rational>();
template MomentPolynomial<double> variance_functional<double>();

}  // namespace latboot
