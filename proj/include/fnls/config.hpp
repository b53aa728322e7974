#pragma once

// Run configuration: a sectioned "key = value" document whose single section
// names the subcommand, e.g.
//
//   [smoothing]
//   seed = 3
//   alpha = 1
//   horizon = 1
//
// Every key of the subcommand's table is filled (defaults for absent keys)
// and validated before anything runs. '#' or ';' starts a comment (at the
// start of a line or after whitespace); list values are comma separated.

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fnls {

enum class Subcommand {
  simulate,
  normal_form,
  verify,
  smoothing,
  growth,
  quintic,
  sensitivity,
  convergence,
};

std::string to_string(Subcommand s);
std::optional<Subcommand> parse_subcommand(std::string_view name);
const std::vector<Subcommand>& all_subcommands();

enum class OutputFormat { csv, json };

using ParamValue = std::variant<long long, double, bool, std::string, std::vector<double>>;

struct RunConfig {
  Subcommand subcommand = Subcommand::simulate;
  std::map<std::string, ParamValue> params;
  std::string output_dir = ".";
  OutputFormat format = OutputFormat::csv;

  double real(const std::string& key) const;
  long long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  const std::vector<double>& list(const std::string& key) const;
  std::uint64_t seed() const;

  /// {"subcommand": ..., "parameters": {...}} with every filled value.
  nlohmann::json echo() const;
};

/// Parses and validates. Throws ParseError (syntax, with line and column) or
/// ValidationError (unknown key, missing section, violated precondition).
RunConfig parse_config(std::string_view text);

/// Re-runs validation, e.g. after a command-line override.
void validate_config(const RunConfig& cfg);

/// Keys accepted by a subcommand section, in table order.
std::vector<std::string> config_keys(Subcommand s);

}  // namespace fnls
