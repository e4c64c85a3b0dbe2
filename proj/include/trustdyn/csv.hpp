#ifndef TRUSTDYN_CSV_HPP_
#define TRUSTDYN_CSV_HPP_

// Minimal CSV I/O: '.' decimal separator, 17 significant digits, LF endings.
// Fields never contain commas or quotes in this toolkit, so no quoting.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace trustdyn {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_real(double value);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  const std::vector<std::string>& header() const { return header_; }

  void add_row(std::vector<std::string> fields);
  void add_row(const std::vector<double>& values);

  std::size_t num_rows() const { return rows_.size(); }

  void write(std::ostream& out) const;
  std::string str() const;
  // Throws OutputError if the file cannot be written.
  void write_file(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name; throws std::out_of_range naming the column.
  std::size_t column(std::string_view name) const;
  double real(std::size_t row, std::string_view name) const;
};

CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

}  // namespace trustdyn

#endif  // TRUSTDYN_CSV_HPP_
