#include "schmidtlab/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace schmidtlab::io {
namespace {

void write_value(const Json& v, std::string& out) {
  switch (v.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        out += Json(key).dump();
        out += ':';
        write_value(item, out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ',';
        write_value(v[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float:
      out += format_double(v.get<double>());
      break;
    default:
      out += v.dump();
  }
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0) return std::signbit(v) ? "-0.0" : "0.0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (res.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  std::string s(buf, res.ptr);
  // Keep floats recognizable as floats in JSON consumers.
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string format_label(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc()) throw std::runtime_error("format_label: conversion failed");
  return std::string(buf, res.ptr);
}

std::string write_json(const Json& doc) {
  std::string out;
  write_value(doc, out);
  out += '\n';
  return out;
}

std::string checksum(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw std::invalid_argument("CsvTable: header is mandatory");
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::invalid_argument("CsvTable: row width differs from header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  const auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += csv_escape(cells[i]);
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

Json RunManifest::to_json() const {
  Json j = Json::object();
  j["command"] = command;
  j["parameters"] = parameters;
  j["version"] = version;
  j["output_checksum"] = output_checksum;
  return j;
}

std::string version() { return SCHMIDTLAB_VERSION; }

}  // namespace schmidtlab::io
