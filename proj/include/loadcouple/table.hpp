#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace loadcouple {

/// Comma-separated table with optional leading `# key=value` comment lines.
/// Reals are written with 17 significant digits so they parse back exactly.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_comment(const std::string& line) { comments_.push_back(line); }
  void add_row(std::vector<std::string> cells);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  void write(std::ostream& out) const;
  void save(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::vector<std::vector<std::string>> rows_;
};

std::string format_real(double value);
std::string format_int(long long value);

}  // namespace loadcouple
