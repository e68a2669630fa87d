#ifndef SOCRATIC_CSV_H_
#define SOCRATIC_CSV_H_

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace socratic {

// A header row plus string cells. Cells are whitespace-trimmed; quoting is not
// supported (none of the formats here carry commas inside fields).
struct CsvTable {
  std::string source;  // name used in diagnostics
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;  // 1-based file line of each row

  int column_index(std::string_view name) const;  // -1 if absent
  // Throws DataError naming the row and column.
  [[noreturn]] void fail(std::size_t row, std::size_t col, const std::string& what) const;
};

// Reads a comma-separated table. Blank lines are skipped. Throws DataError on
// a missing header or a row whose column count differs from the header.
CsvTable read_csv(std::istream& in, std::string_view source);

std::optional<long> parse_integer(std::string_view cell);
std::optional<double> parse_real(std::string_view cell);

// Shortest decimal form that round-trips to the same double.
std::string format_real(double value);

}  // namespace socratic

#endif  // SOCRATIC_CSV_H_
