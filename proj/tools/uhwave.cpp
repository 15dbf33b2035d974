// uhwave: synthesize / asymptotics / invert / verify on a scenario file.

#include <iostream>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "uhwave/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Ultrahyperbolic Klein-Gordon field synthesis and asymptotics"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  bool deterministic = false;
  double resolution_scale = 0.0;

  const std::pair<const char*, const char*> commands[] = {
      {"synthesize", "evaluate u at the scenario's sample points -> <prefix>_samples.csv"},
      {"asymptotics", "amplitudes U+- and remainder fits per timelike ray -> _amplitudes.csv, _asymptotics.json"},
      {"invert", "density from a given boundary-flat amplitude -> _density.csv, _invert.json"},
      {"verify", "run the scenario's checks, one PASS/FAIL line each -> _verify.json"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "scenario file (INI with JSON values, or JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (default: the scenario's output.dir)");
    sub->add_flag("--deterministic", deterministic, "serial accumulation; bit-identical reruns");
    sub->add_option("--resolution-scale", resolution_scale, "multiply every panel and sphere count")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : uhwave::kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  return uhwave::run_command(command, config, out_dir, deterministic, resolution_scale, std::cout, std::cerr);
}
