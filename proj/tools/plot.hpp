#pragma once

#include "donorqed/io.hpp"

#include <string>

namespace donorqed::cli {

/// Known CSV schemas. `Auto` picks one from the header.
enum class PlotKind { Auto, BreitRabi, Clock, Trace, Absorption, Cavity, Population, Ladder };

PlotKind parse_plot_kind(const std::string& name);

/// Detect the schema; throws ConfigError for an unknown header.
PlotKind detect_plot_kind(const io::CsvTable& table);

/// Static SVG rendering of a table produced by one of the subcommands.
std::string render_svg(const io::CsvTable& table, PlotKind kind, const std::string& title);

}  // namespace donorqed::cli
