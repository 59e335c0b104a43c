#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

namespace donorqed::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

std::optional<double> prefix_scale(std::string_view p) {
  static const std::pair<std::string_view, double> table[] = {
      {"", 1.0},    {"f", 1e-15}, {"p", 1e-12}, {"n", 1e-9}, {"u", 1e-6}, {"\xC2\xB5", 1e-6},
      {"m", 1e-3},  {"k", 1e3},   {"M", 1e6},   {"G", 1e9},  {"T", 1e12},
  };
  for (const auto& [name, scale] : table)
    if (name == p) return scale;
  return std::nullopt;
}

}  // namespace

double parse_quantity(std::string_view text, std::string_view unit) {
  const auto s = trim(text);
  if (s.empty()) throw ConfigError("empty value");
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc()) {
    // Bare "pi" for angles.
    if (unit == "rad" && s == "pi") return std::numbers::pi;
    throw ConfigError("not a number: '" + std::string(s) + "'");
  }
  auto suffix = trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)));
  if (!std::isfinite(v)) throw ConfigError("non-finite value: '" + std::string(s) + "'");
  if (suffix.empty()) return v;
  if (unit == "rad" && suffix == "pi") return v * std::numbers::pi;
  if (!unit.empty() && suffix.size() >= unit.size() && suffix.substr(suffix.size() - unit.size()) == unit) {
    if (const auto scale = prefix_scale(suffix.substr(0, suffix.size() - unit.size()))) return v * *scale;
  }
  throw ConfigError("bad unit in '" + std::string(s) + "'" +
                    (unit.empty() ? std::string(" (expected a plain number)") : " (expected " + std::string(unit) + ")"));
}

std::vector<double> parse_grid(std::string_view text, std::string_view unit) {
  const auto s = trim(text);
  if (s.empty()) throw ConfigError("empty grid");
  if (s.find(':') != std::string_view::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3 && !(parts.size() == 4 && parts[3] == "log"))
      throw ConfigError("grid must be start:stop:count or start:stop:count:log, got '" + std::string(s) + "'");
    const double a = parse_quantity(parts[0], unit);
    const double b = parse_quantity(parts[1], unit);
    long long n = 0;
    const auto c = parts[2];
    if (std::from_chars(c.data(), c.data() + c.size(), n).ptr != c.data() + c.size() || n < 1)
      throw ConfigError("grid count must be a positive integer, got '" + std::string(c) + "'");
    const bool log = parts.size() == 4;
    if (log && !(a > 0.0 && b > 0.0)) throw ConfigError("log grid needs positive bounds");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      g[static_cast<std::size_t>(i)] = log ? a * std::pow(b / a, f) : a + (b - a) * f;
    }
    if (n > 1) g.back() = b;
    return g;
  }
  std::vector<double> g;
  for (auto p : split(s, ',')) g.push_back(parse_quantity(p, unit));
  return g;
}

std::vector<long long> parse_int_list(std::string_view text) {
  std::vector<long long> out;
  for (auto p : split(trim(text), ',')) {
    long long v = 0;
    if (p.empty() || std::from_chars(p.data(), p.data() + p.size(), v).ptr != p.data() + p.size())
      throw ConfigError("not an integer: '" + std::string(p) + "'");
    out.push_back(v);
  }
  return out;
}

Params::Params(std::string section, std::vector<ParamSpec> specs) : section_(std::move(section)), specs_(std::move(specs)) {
  for (const auto& s : specs_) {
    if (s.default_value.empty()) {
      values_[s.key] = nullptr;
      continue;
    }
    values_[s.key] = convert(s, Json(s.default_value));
  }
}

const ParamSpec& Params::spec(const std::string& key) const {
  for (const auto& s : specs_)
    if (s.key == key) return s;
  throw ConfigError(section_ + ": unknown key '" + key + "'");
}

Json Params::convert(const ParamSpec& s, const Json& raw) const {
  const std::string where = section_ + "." + s.key + ": ";
  try {
    if (raw.is_null()) return nullptr;
    switch (s.kind) {
      case Kind::Number:
        if (raw.is_number()) return raw.get<double>();
        if (raw.is_string()) return parse_quantity(raw.get<std::string>(), s.unit);
        break;
      case Kind::Integer:
        if (raw.is_number_integer()) return raw.get<long long>();
        if (raw.is_string()) {
          const auto v = parse_int_list(raw.get<std::string>());
          if (v.size() == 1) return v[0];
        }
        break;
      case Kind::Text:
        if (raw.is_string()) return raw;
        break;
      case Kind::Choice:
        if (raw.is_string()) {
          const auto v = raw.get<std::string>();
          if (std::find(s.choices.begin(), s.choices.end(), v) != s.choices.end()) return v;
          std::string list;
          for (const auto& c : s.choices) list += (list.empty() ? "" : ", ") + c;
          throw ConfigError(where + "'" + v + "' is not one of {" + list + "}");
        }
        break;
      case Kind::Flag:
        if (raw.is_boolean()) return raw;
        if (raw.is_string()) {
          const auto v = raw.get<std::string>();
          if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
          if (v == "false" || v == "off" || v == "0" || v == "no") return false;
        }
        break;
      case Kind::Grid:
        if (raw.is_string()) {
          parse_grid(raw.get<std::string>(), s.unit);  // validate now
          return raw;
        }
        if (raw.is_number()) return raw.get<double>();
        if (raw.is_array()) {
          Json out = Json::array();
          for (const auto& v : raw) {
            if (v.is_number()) out.push_back(v.get<double>());
            else if (v.is_string()) out.push_back(parse_quantity(v.get<std::string>(), s.unit));
            else throw ConfigError(where + "grid entries must be numbers");
          }
          return out;
        }
        break;
      case Kind::IntList:
        if (raw.is_string()) {
          Json out = Json::array();
          for (auto v : parse_int_list(raw.get<std::string>())) out.push_back(v);
          return out;
        }
        if (raw.is_number_integer()) return Json::array({raw.get<long long>()});
        if (raw.is_array()) {
          for (const auto& v : raw)
            if (!v.is_number_integer()) throw ConfigError(where + "list entries must be integers");
          return raw;
        }
        break;
    }
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(section_ + ".", 0) == 0) throw;
    throw ConfigError(where + msg);
  }
  throw ConfigError(where + "value of the wrong type: " + raw.dump());
}

void Params::apply_document(const Json& doc_in, const std::vector<std::string>& known_sections) {
  const Json& doc = (doc_in.is_object() && doc_in.contains("config")) ? doc_in.at("config") : doc_in;
  if (!doc.is_object()) throw ConfigError("config: top level must be an object of sections");
  for (const auto& [name, body] : doc.items()) {
    if (std::find(known_sections.begin(), known_sections.end(), name) == known_sections.end())
      throw ConfigError("config: unknown section '" + name + "'");
    if (!body.is_object()) throw ConfigError("config: section '" + name + "' must be an object");
  }
  if (!doc.contains(section_)) return;
  for (const auto& [key, raw] : doc.at(section_).items()) values_[key] = convert(spec(key), raw);
}

void Params::apply_text(const std::string& key, const std::string& value) {
  values_[key] = convert(spec(key), Json(value));
}

double Params::number(const std::string& key) const {
  const auto v = optional_number(key);
  if (!v) throw ConfigError(section_ + "." + key + ": value required");
  return *v;
}

std::optional<double> Params::optional_number(const std::string& key) const {
  spec(key);
  const auto& v = values_.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

long long Params::integer(const std::string& key) const {
  spec(key);
  const auto& v = values_.at(key);
  if (v.is_null()) throw ConfigError(section_ + "." + key + ": value required");
  return v.get<long long>();
}

std::string Params::text(const std::string& key) const {
  spec(key);
  const auto& v = values_.at(key);
  return v.is_null() ? std::string() : v.get<std::string>();
}

bool Params::flag(const std::string& key) const {
  spec(key);
  const auto& v = values_.at(key);
  return !v.is_null() && v.get<bool>();
}

std::vector<double> Params::grid(const std::string& key) const {
  const auto& s = spec(key);
  const auto& v = values_.at(key);
  if (v.is_null()) throw ConfigError(section_ + "." + key + ": value required");
  if (v.is_string()) return parse_grid(v.get<std::string>(), s.unit);
  if (v.is_number()) return {v.get<double>()};
  return v.get<std::vector<double>>();
}

std::vector<long long> Params::int_list(const std::string& key) const {
  spec(key);
  const auto& v = values_.at(key);
  if (v.is_null()) throw ConfigError(section_ + "." + key + ": value required");
  return v.get<std::vector<long long>>();
}

Json Params::resolved() const {
  Json out = Json::object();
  for (const auto& s : specs_) out[s.key] = values_.at(s.key);
  return out;
}

}  // namespace donorqed::cli
