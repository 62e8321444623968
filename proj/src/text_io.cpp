#include "cootmv/text_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "cootmv/errors.hpp"

namespace cootmv::text_io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::vector<double> parse_numbers(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    const std::string token(text.substr(pos, end - pos));
    if (token == "inf") {
      out.push_back(INFINITY);
    } else if (token == "-inf") {
      out.push_back(-INFINITY);
    } else {
      double v = 0;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc() || ptr != token.data() + token.size()) throw FormatError("not a number: '" + token + "'");
      out.push_back(v);
    }
    pos = end;
  }
  return out;
}

bool LineReader::next_line(std::string& line) {
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) return true;
  }
  return false;
}

void LineReader::fail(const std::string& msg) const {
  throw ModelError(what_ + " line " + std::to_string(line_no_) + ": " + msg);
}

void LineReader::expect_header(std::string_view header) {
  std::string line;
  if (!next_line(line)) fail("empty file");
  if (line != header) fail("expected header '" + std::string(header) + "'");
}

void LineReader::expect_keyword(std::string_view key) {
  std::string line;
  if (!next_line(line)) fail("missing '" + std::string(key) + "'");
  const auto first = line.find_first_not_of(" \t");
  const auto last = line.find_last_not_of(" \t");
  if (line.substr(first, last - first + 1) != key) fail("expected '" + std::string(key) + "'");
}

std::vector<double> LineReader::keyed_values(std::string_view key, std::size_t count) {
  std::string line;
  if (!next_line(line)) fail("missing '" + std::string(key) + "'");
  std::istringstream ls(line);
  std::string word;
  ls >> word;
  if (word != key) fail("expected '" + std::string(key) + "', found '" + word + "'");
  std::vector<double> values;
  try {
    const auto rest = ls.tellg();
    values = rest < 0 ? std::vector<double>{} : parse_numbers(std::string_view(line).substr(static_cast<std::size_t>(rest)));
  } catch (const FormatError& e) {
    fail(e.what());
  }
  if (values.size() != count)
    fail("'" + std::string(key) + "' needs " + std::to_string(count) + " values, got " + std::to_string(values.size()));
  return values;
}

bool LineReader::next_numbers(std::vector<double>& out) {
  std::string line;
  if (!next_line(line)) return false;
  try {
    out = parse_numbers(line);
  } catch (const FormatError& e) {
    fail(e.what());
  }
  return true;
}

}  // namespace cootmv::text_io
