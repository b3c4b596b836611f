#include "loadcouple/table.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace loadcouple {

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) throw std::invalid_argument("csv row width does not match header");
  rows_.push_back(std::move(cells));
}

void CsvTable::write(std::ostream& out) const {
  for (const auto& c : comments_) out << "# " << c << '\n';
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
    out << '\n';
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
}

void CsvTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write(out);
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::ostringstream ss;
  ss << std::setprecision(std::numeric_limits<double>::max_digits10) << value;
  return ss.str();
}

std::string format_int(long long value) { return std::to_string(value); }

}  // namespace loadcouple
