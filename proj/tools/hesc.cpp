#include "hesc/parallel.hpp"
#include "hesc/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  CLI::App app{"hesc: high-energy scattering and X-ray transform reconstruction"};
  std::string subcommand;
  std::string config;
  std::string out;
  int threads = 0;

  const std::vector<std::string> choices(std::begin(hesc::kSubcommands), std::end(hesc::kSubcommands));
  app.add_option("subcommand", subcommand, "evolve | scatter | limit-scan | sinogram | reconstruct | xray-oracle")
      ->required()
      ->check(CLI::IsMember(choices));
  app.add_option("--config", config, "experiment configuration file")->required();
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--threads", threads, "worker threads (default: HESC_THREADS or 1)")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  hesc::set_thread_count(hesc::resolve_threads(threads));
  return hesc::run_pipeline(config, subcommand, out, std::cerr);
}
