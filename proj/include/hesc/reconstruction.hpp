#pragma once

#include "hesc/grid.hpp"
#include "hesc/potentials.hpp"
#include "hesc/scattering.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace hesc {

enum class Provenance { oracle, physics };

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view text);

/// Samples W(s_j, omega_k) of the X-ray transform. Row k belongs to the line
/// direction omega_k = (cos a_k, sin a_k), a_k = k pi / K; column j to the
/// perpendicular offset s_j = x . perp(omega_k), uniform on [-s_max, s_max].
struct Sinogram {
  std::vector<double> angles;
  std::vector<double> offsets;
  std::vector<double> values;       // row-major K x J
  std::vector<std::uint8_t> flags;  // 1 where a cell was inpainted
  Provenance provenance = Provenance::oracle;

  static Sinogram layout(int angles, int offsets, double s_max, Provenance provenance);

  int K() const { return static_cast<int>(angles.size()); }
  int J() const { return static_cast<int>(offsets.size()); }
  double s_max() const { return offsets.empty() ? 0.0 : offsets.back(); }
  double ds() const { return offsets.size() < 2 ? 0.0 : offsets[1] - offsets[0]; }
  Vec2 direction(int k) const { return hesc::direction(angles[k]); }
  double& at(int k, int j) { return values[std::size_t(k) * offsets.size() + j]; }
  double at(int k, int j) const { return values[std::size_t(k) * offsets.size() + j]; }

  /// sum_j W(s_j, omega_k) ds for every row; equal across rows for an
  /// integrable V (all equal int V d^2x).
  std::vector<double> row_totals() const;
};

/// Direct xray_oracle evaluation.
Sinogram assemble_sinogram(const ScalarPotential& potential, int angles, int offsets, double s_max);

/// Bins each extracted field over the lines x . perp(omega) = s with weight
/// |phi0|^2 on its mask. Rows follow the angle of omega folded into [0, pi).
/// Empty cells are flagged and filled by linear interpolation along s.
Sinogram assemble_sinogram(const std::vector<PhaseProfile>& fields, int offsets, double s_max);

/// |phi0|^2 integrated along omega, binned on `count` offsets of spacing ds
/// centred on index count / 2, normalized to unit sum.
std::vector<double> collapse_density(const WavePacket& packet, Vec2 omega, double ds, int count);

/// Fourier-domain Tikhonov division of a row by a centred density profile.
/// The filter conj(d) / (|d|^2 + eps^2 max|d|^2) is scaled by (1 + eps^2) so a
/// single-cell density is reproduced exactly.
std::vector<double> deconvolve_packet(const std::vector<double>& measured, const std::vector<double>& density,
                                      double eps_reg = 1e-3);

/// M x M raster with the sample layout of Grid2D(M, 2 half_width).
struct ReconField {
  int M = 128;
  double half_width = 4.0;
  double roi_radius = 4.0;
  std::vector<double> values;

  static ReconField raster(int M, double roi_radius);
  double cell() const { return 2.0 * half_width / M; }
  Vec2 point(int i, int j) const {
    return {-half_width + i * cell(), -half_width + j * cell()};
  }
  std::size_t index(int i, int j) const { return std::size_t(i) * M + j; }
};

/// Hann-windowed ramp filter per row, linear interpolation back-projection,
/// weight pi / K.
ReconField fbp_invert(const Sinogram& sino, const ReconField& recon);

struct ReconError {
  double rms_rel = 0.0;
  double max_abs = 0.0;
};

ReconError recon_error(const ReconField& estimate, const ScalarPotential& truth, double roi_radius);

}  // namespace hesc
