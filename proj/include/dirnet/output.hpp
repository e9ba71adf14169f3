#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace dirnet {

using Cell = std::variant<double, std::int64_t, std::string, bool>;

/// Rows of named columns, rendered as CSV or as a JSON array of objects with
/// the same field names.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

enum class OutputFormat { Csv, Json };

OutputFormat output_format_from_string(const std::string& s);

/// Shortest round-trip decimal form; "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double v);

void write_csv(std::ostream& out, const Table& table);
void write_json(std::ostream& out, const Table& table);
void write_table(std::ostream& out, const Table& table, OutputFormat format);

}  // namespace dirnet
