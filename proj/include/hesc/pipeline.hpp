#pragma once

#include "hesc/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace hesc {

inline constexpr std::string_view kSubcommands[] = {"evolve",    "scatter",     "limit-scan",
                                                    "sinogram",  "reconstruct", "xray-oracle"};

/// Writes the artifacts of one subcommand into out_dir and returns their
/// file names (manifest excluded). Throws hesc::Error.
std::vector<std::string> run_subcommand(const ExperimentConfig& cfg, std::string_view subcommand,
                                        const std::filesystem::path& out_dir, std::ostream& log);

/// "<sha256 hex>  <name>" per artifact, sorted by name, written to
/// out_dir / "manifest.sha256".
void write_manifest(const std::filesystem::path& out_dir, std::vector<std::string> artifacts);

std::string sha256_file(const std::filesystem::path& path);

/// Loads the config, runs the subcommand, writes the manifest. Returns 0 on
/// success or the exit code of the error class (config 2, convergence 3,
/// numeric precondition 4, io 5).
int run_pipeline(const std::filesystem::path& config_path, std::string_view subcommand,
                 const std::filesystem::path& out_dir, std::ostream& log);

/// Thread count from --threads, else HESC_THREADS, else 1.
int resolve_threads(int requested);

}  // namespace hesc
