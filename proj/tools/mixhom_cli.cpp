#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "mixhom/app.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mixed local/nonlocal diffusion laboratory"};
  app.set_version_flag("--version", "mixhom 1.0");

  std::string command;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;

  app.add_option("command", command, "partition | solve-coupled | solve-limit | simulate-n | simulate-limit | sweep | compare")
      ->required()
      ->check(CLI::IsMember(mixhom::command_names()));
  app.add_option("--config", config_path, "JSON experiment configuration")->required();
  app.add_option("--out", out_dir, "output directory (default: output.directory from the config)");
  app.add_option("--seed", seed, "override particles.seed");
  app.add_flag("--quiet", quiet, "suppress progress lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : mixhom::exit_code(mixhom::ErrorKind::config);
  }

  try {
    mixhom::ExperimentConfig config = mixhom::load_config(config_path);
    if (seed) config.particles.seed = *seed;
    if (out_dir.empty()) out_dir = config.output_directory;
    std::ofstream null_sink;
    std::ostream& log = quiet ? null_sink : std::cout;
    const auto entries = mixhom::run_command(command, config, out_dir, log);
    if (!quiet) {
      for (const auto& e : entries) std::cout << e.digest << "  " << e.filename << " (" << e.rows << " rows)\n";
    }
  } catch (const mixhom::Error& e) {
    std::cerr << "mixhom: " << e.what() << "\n";
    return mixhom::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "mixhom: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
