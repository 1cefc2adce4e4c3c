#include "qrcert/kv.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace qr {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    out.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

double parse_double(std::string_view text) {
  const std::string s = trim(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::string join_doubles(const std::vector<double>& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += format_double(values[i]);
  }
  return out;
}

std::vector<double> split_doubles(std::string_view text, char sep) {
  std::vector<double> out;
  for (const auto& part : split(text, sep)) {
    // Accept simple fractions such as 1/3.
    const auto slash = part.find('/');
    if (slash != std::string::npos)
      out.push_back(parse_double(part.substr(0, slash)) / parse_double(part.substr(slash + 1)));
    else
      out.push_back(parse_double(part));
  }
  return out;
}

std::vector<int> split_ints(std::string_view text, char sep) {
  std::vector<int> out;
  for (const auto& part : split(text, sep)) {
    int v = 0;
    const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
    if (res.ec != std::errc() || res.ptr != part.data() + part.size())
      throw std::invalid_argument("not an integer: '" + part + "'");
    out.push_back(v);
  }
  return out;
}

KeyValues KeyValues::parse(std::string_view text) {
  KeyValues kv;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    const std::string line = trim(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    ++line_no;
    if (!line.empty() && line[0] != '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 'key = value'");
      kv.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return kv;
}

void KeyValues::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = std::move(value);
      return;
    }
  entries_.emplace_back(std::move(key), std::move(value));
}

bool KeyValues::has(std::string_view key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return true;
  return false;
}

const std::string& KeyValues::get(std::string_view key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  throw std::invalid_argument("missing key '" + std::string(key) + "'");
}

std::string KeyValues::get_or(std::string_view key, std::string fallback) const {
  return has(key) ? get(key) : std::move(fallback);
}

double KeyValues::get_double(std::string_view key) const { return parse_double(get(key)); }

long long KeyValues::get_int(std::string_view key) const {
  const std::string& s = get(key);
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("key '" + std::string(key) + "': not an integer: '" + s + "'");
  return v;
}

std::uint64_t KeyValues::get_u64(std::string_view key) const {
  const std::string& s = get(key);
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("key '" + std::string(key) + "': not an unsigned integer: '" + s + "'");
  return v;
}

std::string KeyValues::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace qr
