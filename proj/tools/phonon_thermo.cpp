#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "phonon_thermo/cli.hpp"

int main(int argc, char** argv) {
  using namespace phonon_thermo;

  CLI::App app{"Steady-state thermometry of a driven two-level probe in an Ohmic phonon bath"};
  app.set_version_flag("--version", std::string(kVersion));

  CliOptions opt;
  std::string config;
  std::string axis;
  std::string variant;
  std::string out;
  double eta = 0.0, temp = 0.0, cutoff = 0.0;

  app.add_option("command", opt.command, "eval | sweep | heatmap | optimize | limits | validate")
      ->required()
      ->check(CLI::IsMember({"eval", "sweep", "heatmap", "optimize", "limits", "validate"}));
  auto* config_opt = app.add_option("--config", config, "JSON configuration file")->check(CLI::ExistingFile);
  auto* axis_opt = app.add_option("--axis", axis, "temperature | coupling | cutoff | drive");
  auto* eta_opt = app.add_option("--eta", eta, "coupling strength override");
  auto* temp_opt = app.add_option("--temp", temp, "temperature override");
  auto* cutoff_opt = app.add_option("--cutoff", cutoff, "cutoff frequency override");
  auto* variant_opt =
      app.add_option("--variant", variant, "steady-state formula")->check(CLI::IsMember({"paper", "rederived"}));
  auto* out_opt = app.add_option("--out", out, "output directory");
  app.add_flag("--svg", opt.svg, "also write SVG figures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*config_opt) opt.config_path = config;
  if (*axis_opt) opt.axis = axis;
  if (*eta_opt) opt.eta = eta;
  if (*temp_opt) opt.temp = temp;
  if (*cutoff_opt) opt.cutoff = cutoff;
  if (*variant_opt) opt.variant = variant;
  if (*out_opt) opt.out = out;

  return run_command(opt, std::cout, std::cerr);
}
