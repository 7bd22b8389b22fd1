#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace spinprobe {

/// Shortest locale-free form with at most 17 significant digits ("%.17g" but
/// without the C locale). Non-finite values print as nan, inf, -inf.
[[nodiscard]] std::string format_number(double v);

/// Quotes a field when it holds a comma, quote or line break.
[[nodiscard]] std::string csv_escape(std::string_view field);

using Cell = std::variant<double, std::int64_t, bool, std::string>;

/// Column-oriented payload shared by the CSV, JSON and gnuplot writers.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

[[nodiscard]] std::string render_csv(const Table& t);

/// Whitespace-separated columns under a '#' header. When `block_column` names
/// a column, a blank line is inserted whenever its value changes (gnuplot
/// `splot` grids).
[[nodiscard]] std::string render_gnuplot(const Table& t, std::string_view block_column = {});

/// {"columns": [...], "rows": [[...], ...]}; non-finite numbers become null.
[[nodiscard]] nlohmann::json table_to_json(const Table& t);

/// 64-bit FNV-1a of `bytes`, as 16 lowercase hex digits.
[[nodiscard]] std::string fnv1a_hex(std::string_view bytes);

}  // namespace spinprobe
