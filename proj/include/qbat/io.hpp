#pragma once

// Tabular output. Floats use the shortest decimal that round-trips, so equal
// doubles always print identically (CSV bodies are byte-stable).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace qbat {

std::string format_double(double v);

using Cell = std::variant<double, std::int64_t, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

enum class Format { csv, json };

Format parse_format(const std::string& name);
void write_csv(std::ostream& os, const Table& table);
nlohmann::ordered_json to_json(const Table& table);
void write_table(const std::filesystem::path& path, const Table& table, Format format);

/// Numeric columns of a CSV file with a header row; non-numeric cells become NaN.
struct CsvData {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  std::vector<double> numeric(const std::string& name) const;
};

CsvData read_csv(const std::filesystem::path& path);

struct RunManifest {
  std::string command;
  std::vector<std::string> args;  // argv after the program name, replayable
  nlohmann::ordered_json parameters;
  nlohmann::ordered_json summary;
  std::string version;
  std::string timestamp;  // UTC, ISO 8601
  std::vector<std::string> outputs;

  nlohmann::ordered_json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

std::filesystem::path manifest_path(const std::filesystem::path& output);
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);
std::string utc_timestamp();

/// Companion gnuplot script plotting `y_columns` against `x_column` (1-based).
void write_gnuplot(const std::filesystem::path& script, const std::filesystem::path& csv, const Table& table,
                   std::size_t x_column, const std::vector<std::size_t>& y_columns);

}  // namespace qbat
