// fnls <subcommand> --config <file> [--out <dir>] [--format csv|json] [--seed N]
//
// Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 I/O failure.

#include "fnls/app.hpp"
#include "fnls/errors.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string blurb(fnls::Subcommand s) {
  switch (s) {
    case fnls::Subcommand::simulate: return "evolve a datum and record mass, energy, H^s";
    case fnls::Subcommand::normal_form: return "normal-form terms and identity residual along a run";
    case fnls::Subcommand::verify: return "multiplier and lemma sums by truncation level";
    case fnls::Subcommand::smoothing: return "nonlinear smoothing residual in H^{s+a}";
    case fnls::Subcommand::growth: return "long-time H^s growth";
    case fnls::Subcommand::quintic: return "quintic resonant sums, collapsed vs direct";
    case fnls::Subcommand::sensitivity: return "identity residual vs mask constant c";
    case fnls::Subcommand::convergence: return "time-step refinement orders";
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral fractional NLS lab"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".", format = "csv";
  long long seed = -1;
  for (fnls::Subcommand s : fnls::all_subcommands()) {
    CLI::App* sub = app.add_subcommand(fnls::to_string(s), blurb(s));
    sub->add_option("--config", config_path, "config file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "override the config seed")->check(CLI::NonNegativeNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  const std::string name = app.get_subcommands().front()->get_name();

  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw fnls::IoError("cannot read config '" + config_path + "'");
    std::stringstream text;
    text << in.rdbuf();
    fnls::RunConfig cfg = fnls::parse_config(text.str());
    if (fnls::to_string(cfg.subcommand) != name)
      throw fnls::ValidationError("subcommand", "config section [" +
                                                    fnls::to_string(cfg.subcommand) +
                                                    "] does not match '" + name + "'");
    if (seed >= 0) {
      cfg.params["seed"] = seed;
      fnls::validate_config(cfg);
    }
    cfg.output_dir = out_dir;
    cfg.format = format == "json" ? fnls::OutputFormat::json : fnls::OutputFormat::csv;
    const fnls::Report report = fnls::execute(cfg);
    for (const auto& path : fnls::emit_report(report, cfg.format == fnls::OutputFormat::json,
                                              cfg.output_dir, name))
      std::cout << path.string() << "\n";
    return 0;
  } catch (const fnls::ParseError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "fnls: " << e.what() << "\n";
    return fnls::exit_code_for(e);
  }
}
