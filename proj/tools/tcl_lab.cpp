#include <iostream>

#include "CLI11.hpp"
#include "tcl/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"tcl-lab: ensembles of thermostatically controlled loads"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;

  for (const auto& name : tcl::cli::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "YAML experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides TCL_LAB_OUT_DIR and the config)");
    sub->add_option("--seed", seed, "Monte Carlo seed (overrides mc.seed)");
  }
  CLI11_PARSE(app, argc, argv);

  const auto* sub = app.get_subcommands().front();
  try {
    const auto cfg = tcl::cli::parse_config(config_path);
    tcl::cli::RunOptions opt;
    if (!out_dir.empty()) opt.out_dir = out_dir;
    if (sub->count("--seed")) opt.seed = seed;
    const auto res = tcl::cli::run(sub->get_name(), cfg, opt);
    std::cout << "outputs in " << res.directory.string() << '\n';
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "tcl-lab: " << e.what() << '\n';
    return 2;
  }
}
