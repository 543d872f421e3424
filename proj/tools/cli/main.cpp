#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace mopkit::cli;
  CLI::App app{"mopkit: multiple orthogonal polynomials and their ensembles"};
  app.set_version_flag("--version", MOPKIT_VERSION);
  app.require_subcommand(1);

  std::string config;
  RunFlags flags;
  std::string out;
  std::uint64_t seed = 0;
  int grid = 0, samples = 0;

  const char* descriptions[][2] = {
      {"mop", "type II polynomial, roots and orthogonality residuals"},
      {"typeI", "type I polynomials and residuals"},
      {"kernel", "correlation kernel on a grid"},
      {"density", "mean density K_n(x, x) / n on a grid"},
      {"sample", "MCMC samples of the ensemble"},
      {"verify", "Monte Carlo and oracle checks with a pass/fail report"},
      {"equilibrium", "vector equilibrium measures"},
      {"compare", "zero-counting measures against the equilibrium along a ray"},
  };
  std::vector<CLI::App*> runs;
  for (const auto& d : descriptions) {
    CLI::App* sub = app.add_subcommand(d[0], d[1]);
    sub->add_option("config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--grid", grid, "grid size")->check(CLI::PositiveNumber);
    sub->add_option("--samples", samples, "kept MCMC samples")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", flags.quiet, "suppress progress output");
    runs.push_back(sub);
  }
  CLI::App* val = app.add_subcommand("validate", "check a config without running anything");
  val->add_option("config", config, "experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  if (val->parsed()) return validate(config, std::cout, std::cerr);
  for (CLI::App* sub : runs) {
    if (!sub->parsed()) continue;
    if (sub->count("--out")) flags.out = out;
    if (sub->count("--seed")) flags.seed = seed;
    if (sub->count("--grid")) flags.grid = grid;
    if (sub->count("--samples")) flags.samples = samples;
    return run(*parse_command(sub->get_name()), config, flags, std::cout, std::cerr);
  }
  return kExitValidation;
}
