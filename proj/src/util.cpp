#include "metaet/util.hpp"

#include <charconv>
#include <cstdlib>
#include <system_error>
#include <thread>

#include "metaet/errors.hpp"

namespace metaet {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view token, int line_number) {
  double value = 0.0;
  const auto res =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw FormatError("line " + std::to_string(line_number) +
                      ": expected a number, got '" + std::string(token) + "'");
  }
  return value;
}

long long parse_integer(std::string_view token, int line_number) {
  long long value = 0;
  const auto res =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size() ||
      value < 0) {
    throw FormatError("line " + std::to_string(line_number) +
                      ": expected a non-negative integer, got '" +
                      std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

int worker_count() {
  if (const char* env = std::getenv("METAET_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace metaet
