// Command-line front end: dispersion, decompose, evolve, sweep, oracle.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "crow/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw crow::ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counterpropagating CV entanglement in a lossy coupled-cavity waveguide"};
  app.require_subcommand(1);
  app.fallthrough();  // allow --config/--out after the subcommand name

  std::string config_path;
  std::string out_dir;
  app.add_option("--config", config_path, "key = value configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");

  crow::RunFlags flags;
  auto* sub_dispersion = app.add_subcommand("dispersion", "band structure CSV");
  sub_dispersion->add_option("--points", flags.points, "number of k samples");
  auto* sub_decompose = app.add_subcommand("decompose", "Schmidt decomposition CSV");
  sub_decompose->add_flag("--dump-phi", flags.dump_phi, "emit the biphoton magnitude matrix");
  sub_decompose->add_flag("--modes", flags.dump_modes, "emit sampled Schmidt mode functions");
  app.add_subcommand("evolve", "photon number and correlation variance time series");
  auto* sub_sweep = app.add_subcommand("sweep", "summary-table sweep over pump configurations");
  sub_sweep->add_option("--configs", flags.configs, "pump configurations (subset of A,B,C)")
      ->delimiter(',');
  sub_sweep->add_option("--k0", flags.k0_over_pi, "k0 values in units of pi/D")->delimiter(',');
  app.add_subcommand("oracle", "independent validation report (JSON)");

  CLI11_PARSE(app, argc, argv);

  crow::RunConfig cfg;
  try {
    cfg = crow::parse_config(config_path.empty() ? "" : read_file(config_path));
  } catch (const crow::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;

  const std::string subcommand = app.get_subcommands().front()->get_name();
  return crow::run(subcommand, cfg, flags, std::cout);
}
