#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dualion/config.hpp"
#include "dualion/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"dualion: dual-type 171Yb+ qubit simulator"};
  std::string config_path;
  std::optional<std::string> experiment;
  std::optional<std::string> seed;
  std::optional<std::string> shots;
  std::optional<std::string> out_dir;
  bool emit_reference = false;
  app.add_option("--config", config_path, "configuration file");
  app.add_option("--experiment", experiment, "experiment kind (overrides the config)");
  app.add_option("--seed", seed, "master seed, unsigned 64-bit");
  app.add_option("--shots", shots, "shots per sweep point");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--emit-reference-config", emit_reference,
               "print every config key with its default and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dualion::kExitConfigError;
  }

  if (emit_reference) {
    std::cout << dualion::reference_config();
    return dualion::kExitSuccess;
  }

  dualion::RunConfig config;
  try {
    if (!config_path.empty()) config = dualion::load_config(config_path);
    if (experiment) dualion::set_value(config, "run", "experiment", *experiment);
    if (seed) dualion::set_value(config, "run", "seed", *seed);
    if (shots) dualion::set_value(config, "run", "shots", *shots);
    if (out_dir) dualion::set_value(config, "run", "output_dir", *out_dir);
    dualion::validate(config);
  } catch (const dualion::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return dualion::kExitConfigError;
  }
  return dualion::run_with_exit_code(config);
}
