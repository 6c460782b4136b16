#include <iostream>

#include <CLI11.hpp>

#include "detshock/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Detached bow shock solver for steady irrotational flow"};
  app.require_subcommand(1);
  detshock::CommandOptions opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Config file (key = value)")
        ->required();
    sub->add_option("--out", opt.out_dir, "Output directory");
    sub->add_option("--override", opt.overrides, "Override key=value")
        ->take_all()
        ->allow_extra_args(false);
  };
  auto* polar = app.add_subcommand("polar", "Shock polar, branches and detachment angle");
  auto* solve = app.add_subcommand("solve", "Free-boundary solve with self-verification");
  auto* verify = app.add_subcommand("verify", "Re-verify shock.csv and field.csv");
  auto* sweep = app.add_subcommand("sweep", "Sweep over L_list or eps_list");
  for (auto* s : {polar, solve, verify, sweep}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : detshock::kExitConfig;
  }
  if (polar->parsed()) return detshock::cmd_polar(opt, std::cout, std::cerr);
  if (solve->parsed()) return detshock::cmd_solve(opt, std::cout, std::cerr);
  if (verify->parsed()) return detshock::cmd_verify(opt, std::cout, std::cerr);
  return detshock::cmd_sweep(opt, std::cout, std::cerr);
}
