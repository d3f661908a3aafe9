#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "dve/errors.hpp"
#include "dve/run.hpp"

namespace {

// Flags override config-file values; both funnel through the same key
// dispatcher so the precedence is explicit.
struct Flags {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_flag(CLI::App& app, Flags& flags, const std::string& flag,
              const std::string& key, const std::string& help) {
  app.add_option_function<std::string>(
         flag,
         [&flags, key](const std::string& v) {
           flags.overrides.emplace_back(key, v);
         },
         help)
      ->type_name("VALUE");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dve: dual variational solvers for 1-d nonconvex elasticity"};
  app.require_subcommand(1);
  CLI::App* run_cmd = app.add_subcommand(
      "run", "solve a named case or suite and write CSV artifacts");

  Flags flags;
  run_cmd->add_option("--config", flags.config_path,
                      "key=value config file; flags override its values");
  add_flag(*run_cmd, flags, "--case", "case",
           "case name (e.g. stress_free, hat_bifurcation:0.2)");
  add_flag(*run_cmd, flags, "--suite", "suite", "suite name (convexity)");
  add_flag(*run_cmd, flags, "--elements", "elements",
           "comma list of statics mesh sizes");
  add_flag(*run_cmd, flags, "--nx", "nx", "space cells for dynamics");
  add_flag(*run_cmd, flags, "--nt", "nt", "time cells for dynamics");
  add_flag(*run_cmd, flags, "--T", "T", "dynamics final time");
  add_flag(*run_cmd, flags, "--c-u", "c_u", "displacement penalty c_u");
  add_flag(*run_cmd, flags, "--c-e", "c_e", "strain penalty c_e");
  add_flag(*run_cmd, flags, "--c-v", "c_v", "velocity penalty c_v");
  add_flag(*run_cmd, flags, "--rho0", "rho0", "mass density");
  add_flag(*run_cmd, flags, "--tol", "tol", "Newton residual tolerance");
  add_flag(*run_cmd, flags, "--max-iter", "max_iter", "Newton iteration cap");
  add_flag(*run_cmd, flags, "--samples", "samples",
           "sample count for the convexity suite");
  add_flag(*run_cmd, flags, "--seed", "seed", "random seed");
  add_flag(*run_cmd, flags, "--out-dir", "out_dir", "artifact directory");
  bool compare_primal = false;
  run_cmd->add_flag("--compare-primal", compare_primal,
                    "also evolve the explicit primal reference integrator");

  CLI11_PARSE(app, argc, argv);

  try {
    dve::RunConfig config;
    if (!flags.config_path.empty()) {
      config = dve::parse_config_file(flags.config_path);
    }
    for (const auto& [key, value] : flags.overrides) {
      dve::apply_override(config, key, value);
    }
    if (compare_primal) config.compare_primal = true;
    return dve::run(config, std::cout);
  } catch (const dve::ConfigError& err) {
    std::cerr << "config error [" << err.field() << "]: " << err.what()
              << "\n";
    return 1;
  } catch (const dve::SolveError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
