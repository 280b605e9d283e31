#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace bpre {

using Cell = std::variant<std::int64_t, double, std::string>;

// Ordered rows of named columns plus the metadata needed to reproduce them.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version = "1.0.0";
  // Extra "key=value" pairs recorded in the metadata line (defaults used etc.).
  std::vector<std::string> notes;

  void add_row(std::vector<Cell> row);
};

// Shortest decimal representation that round-trips to the same bits.
std::string format_double(double v);

// Header line, one '#' metadata comment line, then the rows.
void emit_csv(const ResultTable& table, std::ostream& out);
void emit_csv(const ResultTable& table, const std::string& path);

}  // namespace bpre
