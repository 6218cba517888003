#pragma once

// Deterministic text output: fixed 17-significant-digit numbers, RFC 4180
// style CSV, insertion-ordered JSON, and the run manifest that travels with
// every output.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace schmidtlab::io {

using Json = nlohmann::ordered_json;

/// 17 significant digits, '.' separator, independent of the C locale.
/// Non-finite values have no JSON spelling and are written as "null".
std::string format_double(double v);

/// Shortest round-trip spelling, used for keys such as "H_0.5".
std::string format_label(double v);

/// Compact, byte-stable JSON; floats through format_double.
std::string write_json(const Json& doc);

/// 64-bit FNV-1a, printed as 16 lowercase hex digits.
std::string checksum(std::string_view bytes);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  /// Cells already formatted; an empty string is an empty cell.
  void add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Quotes a field when it contains ',', '"', '\r' or '\n'.
std::string csv_escape(std::string_view field);

struct RunManifest {
  std::string command;
  Json parameters = Json::object();  // every resolved value, defaults included
  std::string version;
  std::string output_checksum;        // over the payload, excluding the manifest

  Json to_json() const;
};

/// Library version string.
std::string version();

}  // namespace schmidtlab::io
