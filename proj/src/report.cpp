#include <algorithm>
#include <stdexcept>
#include <string>

#include "qrcert/cut_engine.hpp"
#include "qrcert/kv.hpp"

namespace qr {

namespace {

std::string join_ints(std::span<const int> values, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(values[i]);
  }
  return out;
}

std::vector<Vertex> parse_vertices(std::string_view text, int n) {
  auto out = split_ints(text);
  for (Vertex v : out)
    if (v < 0 || (n > 0 && v >= n)) throw std::invalid_argument("witness vertex " + std::to_string(v) + " out of range");
  return out;
}

std::string_view mode_name(Mode m) { return m == Mode::exhaustive ? "exhaustive" : "sampled"; }

Mode parse_mode(std::string_view s) {
  if (s == "exhaustive") return Mode::exhaustive;
  if (s == "sampled") return Mode::sampled;
  throw std::invalid_argument("unknown mode '" + std::string(s) + "'");
}

}  // namespace

// none | subset:0,1,2 | cut:0,3|1,2 | pair:0,1/5,6
std::string Witness::to_text() const {
  switch (kind) {
    case Kind::none: return "none";
    case Kind::subset: return "subset:" + join_ints(subset);
    case Kind::cut: {
      std::vector<std::vector<int>> parts_list(static_cast<std::size_t>(parts));
      for (std::size_t v = 0; v < assignment.size(); ++v)
        parts_list[static_cast<std::size_t>(assignment[v])].push_back(static_cast<int>(v));
      std::string out = "cut:";
      for (std::size_t i = 0; i < parts_list.size(); ++i) {
        if (i) out += '|';
        out += join_ints(parts_list[i]);
      }
      return out;
    }
    case Kind::pair: return "pair:" + join_ints(a) + "/" + join_ints(b);
  }
  return "none";
}

Witness Witness::from_text(std::string_view text, int n) {
  Witness w;
  const std::string t = trim(text);
  if (t == "none") return w;
  const auto colon = t.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("malformed witness '" + t + "'");
  const std::string_view kind = std::string_view(t).substr(0, colon);
  const std::string_view body = std::string_view(t).substr(colon + 1);
  if (kind == "subset") {
    w.kind = Kind::subset;
    w.subset = parse_vertices(body, n);
  } else if (kind == "cut") {
    w.kind = Kind::cut;
    const auto pieces = split(body, '|');
    w.parts = static_cast<int>(pieces.size());
    w.assignment.assign(static_cast<std::size_t>(n), -1);
    for (std::size_t i = 0; i < pieces.size(); ++i)
      for (Vertex v : parse_vertices(pieces[i], n)) {
        if (w.assignment[static_cast<std::size_t>(v)] != -1) throw std::invalid_argument("witness cut parts overlap");
        w.assignment[static_cast<std::size_t>(v)] = static_cast<int>(i);
      }
    if (std::find(w.assignment.begin(), w.assignment.end(), -1) != w.assignment.end())
      throw std::invalid_argument("witness cut does not cover every vertex");
  } else if (kind == "pair") {
    w.kind = Kind::pair;
    const auto slash = body.find('/');
    if (slash == std::string_view::npos) throw std::invalid_argument("malformed pair witness");
    w.a = parse_vertices(body.substr(0, slash), n);
    w.b = parse_vertices(body.substr(slash + 1), n);
  } else {
    throw std::invalid_argument("unknown witness kind '" + std::string(kind) + "'");
  }
  return w;
}

std::string DeviationReport::to_text() const {
  KeyValues kv;
  kv.set("property", std::string(property_name(property)));
  kv.set("n", std::to_string(n));
  kv.set("p", format_double(p));
  kv.set("exponent", std::to_string(exponent));
  kv.set("alpha", join_doubles(alpha));
  kv.set("k", std::to_string(k));
  kv.set("mode", std::string(mode_name(mode)));
  kv.set("samples", std::to_string(samples));
  kv.set("seed", std::to_string(seed));
  kv.set("max_abs_deviation", format_double(max_abs_deviation));
  kv.set("estimate", estimate ? "true" : "false");
  std::string fl;
  for (std::size_t i = 0; i < flags.size(); ++i) fl += (i ? "," : "") + flags[i];
  kv.set("flags", fl);
  for (const auto& [name, value] : metrics) kv.set("metric." + name, format_double(value));
  kv.set("input", input);
  if (property == Property::regularity) {
    kv.set("pair_x", join_ints(pair_x));
    kv.set("pair_y", join_ints(pair_y));
    kv.set("epsilon", format_double(epsilon));
  }
  kv.set("witness", witness.to_text());
  return kv.to_text();
}

DeviationReport DeviationReport::from_text(std::string_view text) {
  const KeyValues kv = KeyValues::parse(text);
  DeviationReport r;
  r.property = parse_property(kv.get("property"));
  r.n = static_cast<int>(kv.get_int("n"));
  r.p = kv.get_double("p");
  r.exponent = static_cast<int>(kv.get_int("exponent"));
  r.alpha = split_doubles(kv.get_or("alpha", ""));
  r.k = static_cast<int>(kv.get_int("k"));
  r.mode = parse_mode(kv.get("mode"));
  r.samples = kv.get_u64("samples");
  r.seed = kv.get_u64("seed");
  r.max_abs_deviation = kv.get_double("max_abs_deviation");
  r.estimate = kv.get("estimate") == "true";
  for (auto& f : split(kv.get_or("flags", ""), ','))
    if (!f.empty()) r.flags.push_back(f);
  for (const auto& [key, value] : kv.entries())
    if (key.rfind("metric.", 0) == 0) r.metrics.emplace_back(key.substr(7), parse_double(value));
  r.input = kv.get_or("input", "");
  if (r.property == Property::regularity) {
    r.pair_x = parse_vertices(kv.get("pair_x"), r.n);
    r.pair_y = parse_vertices(kv.get("pair_y"), r.n);
    r.epsilon = kv.get_double("epsilon");
  }
  r.witness = Witness::from_text(kv.get("witness"), r.n);
  return r;
}

double DeviationReport::metric(std::string_view name) const {
  for (const auto& [key, value] : metrics)
    if (key == name) return value;
  throw std::invalid_argument("report has no metric '" + std::string(name) + "'");
}

}  // namespace qr
