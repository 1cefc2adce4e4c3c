#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qr {

// Flat "key = value" records. Blank lines and lines starting with '#' are
// skipped; key order is preserved for writing.
class KeyValues {
 public:
  static KeyValues parse(std::string_view text);

  void set(std::string key, std::string value);
  bool has(std::string_view key) const;
  // Throws std::invalid_argument when the key is missing or malformed.
  const std::string& get(std::string_view key) const;
  std::string get_or(std::string_view key, std::string fallback) const;
  double get_double(std::string_view key) const;
  long long get_int(std::string_view key) const;
  std::uint64_t get_u64(std::string_view key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::string to_text() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

std::string join_doubles(const std::vector<double>& values, char sep = ',');
std::vector<double> split_doubles(std::string_view text, char sep = ',');
std::vector<int> split_ints(std::string_view text, char sep = ',');
std::vector<std::string> split(std::string_view text, char sep);
std::string trim(std::string_view s);

}  // namespace qr
