#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adam3/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"adaptive momentum min-max optimization toolkit"};
  app.require_subcommand(1);

  std::string config_path;

  auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
  run->add_option("config", config_path, "path to the config file")->required();

  auto* sweep = app.add_subcommand("sweep", "batch-size x seed sweep from a base config");
  std::vector<std::size_t> batches{1, 4, 16};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  sweep->add_option("config", config_path, "path to the base config file")->required();
  sweep->add_option("--batch-sizes", batches, "batch sizes to sweep");
  sweep->add_option("--seeds", seeds, "seeds to sweep");

  auto* theory = app.add_subcommand("theory", "print the admissibility bounds");
  adam3::cli::TheoryArgs targs;
  bool as_json = false;
  theory->add_option("--G0", targs.ac.g0, "scaler floor constant");
  theory->add_option("--L", targs.ac.l_smooth, "smoothness constant");
  theory->add_option("--Ginf", targs.ac.g_inf, "sup-norm gradient bound");
  theory->add_option("--sigma2", targs.ac.sigma2, "gradient variance");
  theory->add_option("--kappa", targs.kappa, "momentum schedule decay in (0,1)");
  theory->add_option("--eps", targs.eps, "target accuracy");
  theory->add_option("--C1", targs.c1, "iteration constant");
  theory->add_option("--C2", targs.c2, "batch constant");
  theory->add_option("--beta1-1", targs.beta1_1, "initial momentum decay (for u_c)");
  theory->add_option("--beta2", targs.beta2, "second-moment decay (for u_c)");
  theory->add_option("--beta3", targs.beta3, "scaler-cap decay (for u_c)");
  theory->add_flag("--json", as_json, "machine-readable output");

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of a game field");
  std::string game_name = "quadratic";
  double c = 1010.0, k = 0.01, scale = 1.0, h = 1e-5;
  std::vector<double> point{1.0, 1.0};
  gradcheck->add_option("--game", game_name, "quadratic or bilinear");
  gradcheck->add_option("--c", c, "quadratic linear branch");
  gradcheck->add_option("--k", k, "quadratic coupling");
  gradcheck->add_option("--scale", scale, "bilinear scale");
  gradcheck->add_option("--point", point, "evaluation point (two values)")->expected(2);
  gradcheck->add_option("--step", h, "difference step");

  auto* audit = app.add_subcommand("audit", "re-run a config and audit every invariant");
  double d_bound = 0.0;
  audit->add_option("config", config_path, "path to the config file")->required();
  audit->add_option("--D", d_bound, "iterate-norm bound for the |x_k| <= D/2 check");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return adam3::cli::run_command(config_path, std::cout, std::cerr);
  if (sweep->parsed())
    return adam3::cli::sweep_command(config_path, batches, seeds, std::cout, std::cerr);
  if (theory->parsed())
    return adam3::cli::theory_command(targs, as_json, std::cout, std::cerr);
  if (gradcheck->parsed()) {
    adam3::cli::GameConfig gc;
    if (game_name == "quadratic") {
      gc.kind = adam3::cli::GameConfig::Kind::quadratic;
      gc.quadratic = adam3::QuadraticGameParams{c, k};
    } else if (game_name == "bilinear") {
      gc.kind = adam3::cli::GameConfig::Kind::bilinear;
      gc.bilinear_scale = scale;
    } else {
      std::cerr << "config error: unknown game '" << game_name << "'\n";
      return adam3::cli::exit_parse;
    }
    return adam3::cli::gradcheck_command(gc, adam3::Point{point, 1}, h, std::cout, std::cerr);
  }
  if (audit->parsed()) return adam3::cli::audit_command(config_path, d_bound, std::cout, std::cerr);
  return adam3::cli::exit_ok;
}
