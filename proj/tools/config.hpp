#pragma once

// Typed, unit-aware parameters for the command-line tool. Values come from
// built-in defaults, then a JSON config section, then command-line flags.

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace donorqed::cli {

using Json = nlohmann::ordered_json;

/// Bad user input; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse "70uT", "1.66 GHz", "4e-6", "2pi" against a base unit ("T", "Hz",
/// "rad", ...). An empty unit accepts bare numbers only.
double parse_quantity(std::string_view text, std::string_view unit);

/// Grid syntax: "start:stop:count", "start:stop:count:log", "a,b,c" or a
/// single value. Each number may carry a unit suffix.
std::vector<double> parse_grid(std::string_view text, std::string_view unit);

std::vector<long long> parse_int_list(std::string_view text);

enum class Kind { Number, Integer, Text, Choice, Flag, Grid, IntList };

struct ParamSpec {
  std::string key;
  Kind kind = Kind::Number;
  std::string unit;                  // SI base unit for Number / Grid
  std::string default_value;         // textual; empty = unset
  std::string help;
  std::vector<std::string> choices;  // for Kind::Choice
};

class Params {
 public:
  Params(std::string section, std::vector<ParamSpec> specs);

  const std::string& section() const { return section_; }
  const std::vector<ParamSpec>& specs() const { return specs_; }

  /// Apply the command's section of a config document. A document carrying
  /// a "config" member (an emitted report) is unwrapped first. Unknown
  /// sections and unknown keys are rejected.
  void apply_document(const Json& doc, const std::vector<std::string>& known_sections);
  void apply_text(const std::string& key, const std::string& value);

  double number(const std::string& key) const;
  std::optional<double> optional_number(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::string text(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> grid(const std::string& key) const;
  std::vector<long long> int_list(const std::string& key) const;

  /// Resolved values, re-loadable as this command's config section.
  Json resolved() const;

 private:
  const ParamSpec& spec(const std::string& key) const;
  Json convert(const ParamSpec& s, const Json& raw) const;

  std::string section_;
  std::vector<ParamSpec> specs_;
  std::map<std::string, Json> values_;
};

}  // namespace donorqed::cli
