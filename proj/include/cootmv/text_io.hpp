#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace cootmv::text_io {

// Shortest decimal that round-trips the double; "inf"/"-inf"/"nan" for non-finite values.
std::string format_double(double v);

// Parses model files line by line, skipping blank lines. Errors carry the line number.
class LineReader {
 public:
  LineReader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

  void expect_header(std::string_view header);
  // "<key> v1 v2 ..." with exactly `count` numbers.
  std::vector<double> keyed_values(std::string_view key, std::size_t count);
  // Any line of numbers; false at end of input.
  bool next_numbers(std::vector<double>& out);
  void expect_keyword(std::string_view key);

  [[noreturn]] void fail(const std::string& msg) const;

 private:
  bool next_line(std::string& line);

  std::istream& in_;
  std::string what_;
  int line_no_ = 0;
};

std::vector<double> parse_numbers(std::string_view text);

}  // namespace cootmv::text_io
