#pragma once

#include "hesc/grid.hpp"
#include "hesc/kinematics.hpp"
#include "hesc/potentials.hpp"
#include "hesc/reconstruction.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hesc {

struct GridSettings {
  int n = 128;
  double length = 64.0;
  friend bool operator==(const GridSettings&, const GridSettings&) = default;
};

struct ScatteringSettings {
  double pbar = 16.0;     // boost magnitude for scatter / sinogram runs
  double angle = 0.0;     // boost direction for scatter / evolve / limit-scan
  std::vector<double> pbar_list{8.0, 16.0, 32.0, 64.0};
  double r_initial = 0.0;  // 0: four times the 99% radius of the potential
  double r_max = 1024.0;
  double epsilon = 1e-4;
  double dr_max = 0.05;
  double dt = 0.0;         // 0: automatic step
  double t_total = 1.0;    // evolve only
  double safety = 0.1;
  double mask_threshold = 1e-3;
  bool dollard = false;
  friend bool operator==(const ScatteringSettings&, const ScatteringSettings&) = default;
};

struct ReconstructionSettings {
  int angles = 64;
  int offsets = 128;
  double s_max = 8.0;
  double roi_radius = 4.0;
  int raster = 128;
  double eps_reg = 1e-3;
  Provenance source = Provenance::oracle;
  double jitter = 0.0;  // packet centre offsets drawn uniformly from [-jitter, jitter]^2
  friend bool operator==(const ReconstructionSettings&, const ReconstructionSettings&) = default;
};

/// Sections [grid] [dispersion] [packet] [potential] [scattering]
/// [reconstruction] of `key = value` lines, plus a top-level `seed`. The
/// potential section takes one `term = ...` line per term.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  GridSettings grid;
  Dispersion dispersion;
  PacketSpec packet;
  ScalarPotential potential;
  ScatteringSettings scattering;
  ReconstructionSettings reconstruction;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws ConfigError naming the offending key.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

}  // namespace hesc
