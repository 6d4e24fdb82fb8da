#pragma once

#include "hesc/grid.hpp"
#include "hesc/reconstruction.hpp"
#include "hesc/scattering.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace hesc {

/// QF2D1: one ASCII header line
///   QF2D1 n=<n> L=<length> kind=<position|momentum>
/// followed by n * n little-endian float64 (re, im) pairs in stored index order.
void write_field(const WavePacket& field, const std::filesystem::path& path);
WavePacket read_field(const std::filesystem::path& path);

/// Real raster as a position-kind QF2D1 file with zero imaginary parts.
void write_field(const ReconField& field, const std::filesystem::path& path);
/// Real field sampled on a Grid2D (extracted phase profiles).
void write_field(const Grid2D& grid, const std::vector<double>& values, const std::filesystem::path& path);

void write_sinogram(const Sinogram& sino, const std::filesystem::path& path);
Sinogram read_sinogram(const std::filesystem::path& path);

/// One row per result: pbar_x,pbar_y,re_element,im_element,converged,r_final.
void write_scattering_csv(const std::vector<ScatteringResult>& results, const std::filesystem::path& path);

/// Limit scan plot data: pbar,value_re,value_im,oracle_re,oracle_im,delta.
void emit_plotdata(const std::vector<LimitEntry>& scan, const std::filesystem::path& path);
void emit_plotdata(const Sinogram& sino, const std::filesystem::path& path);

}  // namespace hesc
