#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "latboot/mc.hpp"
#include "latboot/moments.hpp"
#include "latboot/scalar.hpp"

namespace latboot {

/// CSV rows of numbers. Blank lines and '#' lines are skipped; a first line
/// that does not parse as numbers is taken as a header.
template <Scalar S>
Dataset<S> parse_dataset(std::istream& in, const std::string& source_name);

template <Scalar S>
Dataset<S> read_dataset(const std::filesystem::path& path);

/// {"d": 2, "terms": [{"blocks": [[0, 0], [1]], "coeff": "1/2"}, ...]}.
/// Coefficients may be strings ("p/q", decimals) or JSON numbers.
template <Scalar S>
MomentPolynomial<S> functional_from_json(const nlohmann::json& j);

template <Scalar S>
nlohmann::json functional_to_json(const MomentPolynomial<S>& poly);

/// Reads a functional JSON file; "variance" names the built-in univariate
/// variance E[x^2] - E[x]^2.
template <Scalar S>
MomentPolynomial<S> read_functional(const std::string& path_or_name);

template <Scalar S>
MomentPolynomial<S> variance_functional();

/// {"kind": "normal", "mean": ["0"], "variance": ["1"]}
/// {"kind": "table", "d": 1, "moments": [{"labels": [0, 0], "value": "1"}]}
/// {"kind": "dataset", "path": "pop.csv"} (relative to the JSON file)
Population population_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
Population read_population(const std::filesystem::path& path);

nlohmann::json read_json(const std::filesystem::path& path);

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

/// Output of one CLI run: provenance header plus named tables.
struct Artifact {
  std::vector<std::pair<std::string, std::string>> provenance;
  std::vector<Table> tables;

  Table& add_table(std::string name, std::vector<std::string> columns);
};

std::string cell_text(const Cell& cell);

/// "# key: value" header lines, then per table "# section: name", a column
/// header and the rows.
void write_csv(const Artifact& artifact, std::ostream& out);

/// {"provenance": {...}, "tables": [{"name", "columns", "rows"}]}.
nlohmann::json artifact_to_json(const Artifact& artifact);
void write_json(const Artifact& artifact, std::ostream& out);

enum class Format { csv, json };

Format parse_format(const std::string& text);

/// Format from the extension (.json or anything else -> csv) unless forced.
void write_artifact(const Artifact& artifact, const std::string& path, std::optional<Format> format);

/// Current UTC time as ISO 8601.
std::string utc_timestamp();

}  // namespace latboot
