// qtoa: arrival-time distributions for wave packets scattering off 1D barriers.
// Natural units (hbar = 1) with a configurable mass.

#include "app/commands.hpp"
#include "app/config.hpp"

#include "qtoa/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace {

constexpr int kExitEngine = 1;
constexpr int kExitConfig = 2;

} // namespace

int main(int argc, char** argv) {
  using namespace qtoa::app;

  CLI::App cli{"Quantum time-of-arrival distributions for 1D scattering"};
  cli.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string format = "csv";
  unsigned threads = 1;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config_path, "INI experiment configuration");
    if (needs_config)
      opt->required();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sub->add_option("--threads", threads, "worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };

  const std::map<std::string, std::string> commands{
      {"transmit", "arrival distribution of the transmitted channel (r-)"},
      {"reflect", "arrival distribution of the reflected channel (l-)"},
      {"incoming", "arrival distribution of an incoming channel (r+ or l+)"},
      {"sweep", "transmission peak versus barrier width and height"},
      {"portrait", "classical phase-space trajectories of a sech^2 barrier"},
      {"selfcheck", "run the built-in invariant checks"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    subs[name] = cli.add_subcommand(name, help);
    add_common(subs[name], name != "selfcheck");
  }

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  RunOptions options;
  options.out_dir = out_dir;
  options.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
  options.threads = threads;

  try {
    if (subs["selfcheck"]->parsed()) {
      const int failures = run_selfcheck(options, std::cout);
      return failures == 0 ? 0 : kExitEngine;
    }
    const ExperimentConfig config = load_config(config_path);
    if (subs["transmit"]->parsed()) run_transmit(config, options);
    else if (subs["reflect"]->parsed()) run_reflect(config, options);
    else if (subs["incoming"]->parsed()) run_incoming(config, options);
    else if (subs["sweep"]->parsed()) run_sweep(config, options);
    else if (subs["portrait"]->parsed()) run_portrait(config, options);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const qtoa::Error& e) {
    std::cerr << "engine error: " << e.what() << '\n';
    return kExitEngine;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitEngine;
  }
  return 0;
}
