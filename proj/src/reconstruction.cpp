#include "hesc/reconstruction.hpp"

#include "hesc/error.hpp"
#include "hesc/fft.hpp"
#include "hesc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hesc {
namespace {

constexpr double kPi = std::numbers::pi;

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

std::string_view to_string(Provenance p) { return p == Provenance::oracle ? "oracle" : "physics"; }

Provenance parse_provenance(std::string_view text) {
  if (text == "oracle") return Provenance::oracle;
  if (text == "physics") return Provenance::physics;
  throw InvalidArgument("unknown provenance '" + std::string(text) + "'");
}

Sinogram Sinogram::layout(int angles, int offsets, double s_max, Provenance provenance) {
  if (angles < 1 || offsets < 2 || !(s_max > 0.0)) throw InvalidArgument("sinogram needs K >= 1, J >= 2, s_max > 0");
  Sinogram s;
  s.provenance = provenance;
  for (int k = 0; k < angles; ++k) s.angles.push_back(k * kPi / angles);
  for (int j = 0; j < offsets; ++j) s.offsets.push_back(-s_max + j * 2.0 * s_max / (offsets - 1));
  s.offsets.back() = s_max;
  s.values.assign(std::size_t(angles) * offsets, 0.0);
  s.flags.assign(s.values.size(), 0);
  return s;
}

std::vector<double> Sinogram::row_totals() const {
  std::vector<double> out(angles.size(), 0.0);
  for (int k = 0; k < K(); ++k) {
    double sum = 0.0;
    for (int j = 0; j < J(); ++j) sum += at(k, j);
    out[k] = sum * ds();
  }
  return out;
}

Sinogram assemble_sinogram(const ScalarPotential& potential, int angles, int offsets, double s_max) {
  Sinogram s = Sinogram::layout(angles, offsets, s_max, Provenance::oracle);
  parallel_for(std::size_t(angles), thread_count(), [&](std::size_t k) {
    const Vec2 omega = s.direction(int(k));
    const Vec2 normal = perp(omega);
    for (int j = 0; j < offsets; ++j) s.at(int(k), j) = xray_oracle(potential, omega, normal * s.offsets[j]);
  });
  return s;
}

Sinogram assemble_sinogram(const std::vector<PhaseProfile>& fields, int offsets, double s_max) {
  struct Row {
    double angle;
    const PhaseProfile* field;
  };
  std::vector<Row> rows;
  for (const auto& f : fields) {
    double a = std::atan2(f.omega.y, f.omega.x);
    if (a < 0.0) a += 2.0 * kPi;
    if (a >= kPi) a -= kPi;
    rows.push_back({a, &f});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.angle < b.angle; });

  Sinogram s = Sinogram::layout(static_cast<int>(rows.size()), offsets, s_max, Provenance::physics);
  const double ds = s.ds();
  for (int k = 0; k < s.K(); ++k) {
    s.angles[k] = rows[k].angle;
    const PhaseProfile& f = *rows[k].field;
    const Vec2 normal = perp(direction(rows[k].angle));
    std::vector<double> num(offsets, 0.0), den(offsets, 0.0);
    const Grid2D& g = f.grid;
    for (int i = 0; i < g.n(); ++i)
      for (int j = 0; j < g.n(); ++j) {
        const std::size_t idx = g.index(i, j);
        if (!f.mask[idx]) continue;
        const double u = (dot(g.position(i, j), normal) + s_max) / ds;
        const long bin = std::lround(u);
        if (bin < 0 || bin >= offsets) continue;
        num[bin] += f.weight[idx] * f.field[idx];
        den[bin] += f.weight[idx];
      }

    std::vector<int> valid;
    for (int j = 0; j < offsets; ++j)
      if (den[j] > 0.0) valid.push_back(j);
    if (valid.empty()) throw MaskEmpty("no masked samples in sinogram row " + std::to_string(k));
    for (int j = 0; j < offsets; ++j) {
      if (den[j] > 0.0) {
        s.at(k, j) = num[j] / den[j];
        continue;
      }
      s.flags[std::size_t(k) * offsets + j] = 1;
      const auto hi = std::lower_bound(valid.begin(), valid.end(), j);
      if (hi == valid.begin()) {
        s.at(k, j) = num[valid.front()] / den[valid.front()];
      } else if (hi == valid.end()) {
        s.at(k, j) = num[valid.back()] / den[valid.back()];
      } else {
        const int a = *(hi - 1), b = *hi;
        const double fa = num[a] / den[a], fb = num[b] / den[b];
        s.at(k, j) = fa + (fb - fa) * double(j - a) / double(b - a);
      }
    }
  }
  return s;
}

std::vector<double> collapse_density(const WavePacket& packet, Vec2 omega, double ds, int count) {
  if (count < 1 || !(ds > 0.0)) throw InvalidArgument("collapse_density needs count >= 1 and ds > 0");
  const WavePacket pos = packet.in(Representation::position);
  const Grid2D& g = pos.grid();
  const Vec2 normal = perp(omega);
  std::vector<double> out(count, 0.0);
  double total = 0.0;
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) {
      const long bin = std::lround(dot(g.position(i, j), normal) / ds) + count / 2;
      if (bin < 0 || bin >= count) continue;
      const double w = std::norm(pos[g.index(i, j)]);
      out[bin] += w;
      total += w;
    }
  if (!(total > 0.0)) throw InvalidArgument("density has no mass on the offset range");
  for (double& v : out) v /= total;
  return out;
}

std::vector<double> deconvolve_packet(const std::vector<double>& measured, const std::vector<double>& density,
                                      double eps_reg) {
  if (measured.empty() || density.empty()) throw InvalidArgument("empty row or density");
  double total = 0.0;
  for (double d : density) total += d;
  if (!(total > 0.0)) throw InvalidArgument("density must have positive total");

  const int size = next_pow2(2 * static_cast<int>(std::max(measured.size(), density.size())));
  std::vector<cplx> g(size), d(size), gh(size), dh(size);
  std::copy(measured.begin(), measured.end(), g.begin());
  // Density centre (index count / 2) moves to index 0 for a zero-phase kernel.
  const int centre = static_cast<int>(density.size()) / 2;
  for (int i = 0; i < static_cast<int>(density.size()); ++i) d[((i - centre) % size + size) % size] = density[i] / total;
  fft::forward_1d(size, g, gh);
  fft::forward_1d(size, d, dh);

  double peak = 0.0;
  for (const cplx& v : dh) peak = std::max(peak, std::norm(v));
  const double floor = eps_reg * eps_reg * peak;
  const double gain = 1.0 + eps_reg * eps_reg;
  for (int i = 0; i < size; ++i) gh[i] *= gain * std::conj(dh[i]) / (std::norm(dh[i]) + floor);
  fft::backward_1d(size, gh, g);
  std::vector<double> out(measured.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = g[i].real() / size;
  return out;
}

ReconField ReconField::raster(int M, double roi_radius) {
  if (M < 1 || !(roi_radius > 0.0)) throw InvalidArgument("raster needs M >= 1 and a positive ROI radius");
  ReconField r;
  r.M = M;
  r.half_width = roi_radius;
  r.roi_radius = roi_radius;
  r.values.assign(std::size_t(M) * M, 0.0);
  return r;
}

ReconField fbp_invert(const Sinogram& sino, const ReconField& recon) {
  const int K = sino.K(), J = sino.J();
  if (K < 2) throw InvalidArgument("back-projection needs at least two angles");
  if (recon.roi_radius > sino.s_max() * (1.0 + 1e-12))
    throw InsufficientCoverage("ROI radius " + std::to_string(recon.roi_radius) + " exceeds offset span " +
                               std::to_string(sino.s_max()));
  const double ds = sino.ds();
  const int size = next_pow2(2 * J);

  // Band-limited ramp kernel sampled at the offset spacing, then windowed.
  std::vector<cplx> kernel(size), kernel_hat(size);
  for (int i = 0; i < size; ++i) {
    const int n = i < size / 2 ? i : i - size;
    if (n == 0)
      kernel[i] = 1.0 / (4.0 * ds * ds);
    else if (n % 2 != 0)
      kernel[i] = -1.0 / (kPi * kPi * double(n) * double(n) * ds * ds);
  }
  fft::forward_1d(size, kernel, kernel_hat);
  for (int i = 0; i < size; ++i) {
    const int f = i < size / 2 ? i : i - size;
    kernel_hat[i] *= 0.5 * (1.0 + std::cos(2.0 * kPi * std::abs(f) / size));
  }

  std::vector<std::vector<double>> filtered(K, std::vector<double>(J));
  parallel_for(std::size_t(K), thread_count(), [&](std::size_t k) {
    std::vector<cplx> row(size), row_hat(size);
    for (int j = 0; j < J; ++j) row[j] = sino.at(int(k), j);
    fft::forward_1d(size, row, row_hat);
    for (int i = 0; i < size; ++i) row_hat[i] *= kernel_hat[i];
    fft::backward_1d(size, row_hat, row);
    for (int j = 0; j < J; ++j) filtered[k][j] = row[j].real() * ds / size;
  });

  ReconField out = recon;
  out.values.assign(std::size_t(out.M) * out.M, 0.0);
  const double s0 = sino.offsets.front();
  std::vector<Vec2> normals(K);
  for (int k = 0; k < K; ++k) normals[k] = perp(sino.direction(k));
  parallel_for(std::size_t(out.M), thread_count(), [&](std::size_t i) {
    for (int j = 0; j < out.M; ++j) {
      const Vec2 x = out.point(int(i), j);
      double sum = 0.0;
      for (int k = 0; k < K; ++k) {
        const double u = (dot(x, normals[k]) - s0) / ds;
        const int j0 = static_cast<int>(std::floor(u));
        if (j0 < 0 || j0 >= J - 1) continue;
        const double frac = u - j0;
        sum += (1.0 - frac) * filtered[k][j0] + frac * filtered[k][j0 + 1];
      }
      out.values[out.index(int(i), j)] = sum * kPi / K;
    }
  });
  return out;
}

ReconError recon_error(const ReconField& estimate, const ScalarPotential& truth, double roi_radius) {
  double err2 = 0.0, ref2 = 0.0, max_abs = 0.0;
  for (int i = 0; i < estimate.M; ++i)
    for (int j = 0; j < estimate.M; ++j) {
      const Vec2 x = estimate.point(i, j);
      if (norm(x) > roi_radius) continue;
      const double t = truth.value(x);
      const double d = estimate.values[estimate.index(i, j)] - t;
      err2 += d * d;
      ref2 += t * t;
      max_abs = std::max(max_abs, std::abs(d));
    }
  return {ref2 > 0.0 ? std::sqrt(err2 / ref2) : std::sqrt(err2), max_abs};
}

}  // namespace hesc
