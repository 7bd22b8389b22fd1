#include "spinprobe/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "spinprobe/error.hpp"

namespace spinprobe {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (res.ec != std::errc{}) throw Error("format_number: conversion failed");
  return {buf, res.ptr};
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw InvalidArgument("table row has " + std::to_string(row.size()) + " cells, expected " +
                          std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

namespace {

std::string cell_text(const Cell& c) {
  struct {
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& s) const { return s; }
  } visit;
  return std::visit(visit, c);
}

}  // namespace

std::string render_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(t.columns[i]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(cell_text(row[i]));
    }
    out += '\n';
  }
  return out;
}

std::string render_gnuplot(const Table& t, std::string_view block_column) {
  std::size_t block = t.columns.size();
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (t.columns[i] == block_column) block = i;
  }
  std::string out = "#";
  for (const auto& c : t.columns) out += ' ' + c;
  out += '\n';
  std::string previous;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    if (block < row.size()) {
      std::string key = cell_text(row[block]);
      if (r > 0 && key != previous) out += '\n';
      previous = std::move(key);
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ' ';
      std::string text = cell_text(row[i]);
      // Free-text cells must stay a single token.
      for (char& ch : text) {
        if (ch == ' ' || ch == '\t' || ch == '\n') ch = '_';
      }
      out += text.empty() ? "-" : text;
    }
    out += '\n';
  }
  return out;
}

nlohmann::json table_to_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& c : row) {
      if (const double* d = std::get_if<double>(&c)) {
        r.push_back(std::isfinite(*d) ? nlohmann::json(*d) : nlohmann::json(nullptr));
      } else {
        std::visit([&](const auto& v) { r.push_back(v); }, c);
      }
    }
    rows.push_back(std::move(r));
  }
  return {{"columns", t.columns}, {"rows", std::move(rows)}};
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace spinprobe
