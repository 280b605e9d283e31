#include "bpre/table.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace bpre {

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("ResultTable::add_row: row width does not match column set");
  rows.push_back(std::move(row));
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

void write_cell(std::ostream& out, const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) {
    out << *i;
  } else if (const auto* d = std::get_if<double>(&cell)) {
    out << format_double(*d);
  } else {
    out << std::get<std::string>(cell);
  }
}

}  // namespace

void emit_csv(const ResultTable& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ',';
    out << table.columns[i];
  }
  out << '\n';
  out << "# config_hash=" << table.config_hash << " seed=" << table.seed
      << " version=" << table.version;
  for (const auto& note : table.notes) out << ' ' << note;
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      write_cell(out, row[i]);
    }
    out << '\n';
  }
}

void emit_csv(const ResultTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
  emit_csv(table, out);
  out.flush();
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

}  // namespace bpre
