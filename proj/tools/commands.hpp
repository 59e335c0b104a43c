#pragma once

#include "config.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace donorqed::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3 };

struct Outcome {
  std::string csv;                 // primary tabular output, if any
  Json results = Json::object();   // summary numbers for the report
  bool json_primary = false;       // commands whose main output is the JSON result
  std::optional<std::uint64_t> seed;
  std::string failure;             // non-empty: numerical failure (exit 3)
};

struct Command {
  std::string section;   // config section name, e.g. "pulse.hahn"
  std::string group;     // parent subcommand ("pulse") or empty
  std::string name;      // leaf subcommand name ("hahn")
  std::string help;
  std::vector<ParamSpec> params;
  std::function<Outcome(const Params&)> run;
};

const std::vector<Command>& command_table();

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace donorqed::cli
