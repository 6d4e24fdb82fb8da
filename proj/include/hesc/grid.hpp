#pragma once

#include "hesc/kinematics.hpp"
#include "hesc/vec2.hpp"

#include <complex>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace hesc {

using cplx = std::complex<double>;

/// Periodic n x n grid on [-L/2, L/2)^2. Sample (i, j) sits at
/// x = (-L/2 + i dx, -L/2 + j dx) and is stored at index i * n + j. Momentum
/// samples use the same layout in FFT order: index k maps to the signed
/// integer k (k < n/2) or k - n, times dp = 2 pi / L.
class Grid2D {
 public:
  Grid2D(int n, double length);

  int n() const { return n_; }
  double length() const { return length_; }
  double dx() const { return length_ / n_; }
  double dp() const;
  double nyquist() const;  // largest |p| per axis, pi n / L
  std::size_t size() const { return std::size_t(n_) * std::size_t(n_); }
  std::size_t index(int i, int j) const { return std::size_t(i) * std::size_t(n_) + std::size_t(j); }

  double x(int i) const { return -0.5 * length_ + i * dx(); }
  int signed_index(int k) const { return k < n_ / 2 ? k : k - n_; }
  double p(int k) const { return signed_index(k) * dp(); }
  Vec2 position(int i, int j) const { return {x(i), x(j)}; }
  Vec2 momentum(int k, int l) const { return {p(k), p(l)}; }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  int n_;
  double length_;
};

enum class Representation { position, momentum };

/// Complex field on a Grid2D in one of the two representations. The discrete
/// transform realizes the unitary convention (2 pi)^{-1} int e^{-i p.x}.
class WavePacket {
 public:
  WavePacket(Grid2D grid, Representation rep, std::vector<cplx> samples);
  static WavePacket zeros(const Grid2D& grid, Representation rep);

  const Grid2D& grid() const { return grid_; }
  Representation representation() const { return rep_; }
  std::span<const cplx> samples() const { return samples_; }
  const cplx& operator[](std::size_t idx) const { return samples_[idx]; }

  /// L2 norm with the measure of the current representation.
  double norm() const;
  WavePacket in(Representation rep) const;
  WavePacket with_samples(std::vector<cplx> samples) const { return {grid_, rep_, std::move(samples)}; }
  WavePacket scaled(cplx factor) const;

 private:
  Grid2D grid_;
  Representation rep_;
  std::vector<cplx> samples_;
};

enum class FourierDirection { forward, inverse };

/// forward yields the momentum representation, inverse the position one.
/// A packet already in the requested representation is returned unchanged.
WavePacket fourier_transform(const WavePacket& packet, FourierDirection direction);

// Raw transforms between the two sample layouts of a grid.
void to_momentum(const Grid2D& grid, std::span<const cplx> position, std::span<cplx> momentum);
void to_position(const Grid2D& grid, std::span<const cplx> momentum, std::span<cplx> position);

enum class Envelope { gaussian, bump };

/// Momentum-space envelope phi0^ centred at the origin, translated in
/// position by `center` and boosted in momentum by `boost`.
///   gaussian: exp(-|p|^2 / (2 width^2))  (position width 1 / width)
///   bump:     exp(-1 / (1 - |p / width|^2)) on |p| < width, zero outside
struct PacketSpec {
  Envelope envelope = Envelope::bump;
  double width = 1.0;
  Vec2 center;
  Vec2 boost;

  friend bool operator==(const PacketSpec&, const PacketSpec&) = default;
};

inline constexpr double kSupportThreshold = 1e-12;
inline constexpr double kNyquistMargin = 1.25;

/// Radius outside which the envelope carries density below 1e-12 of its
/// peak (gaussian) or vanishes identically (bump).
double effective_support_radius(const PacketSpec& spec);
double envelope_value(const PacketSpec& spec, Vec2 p_relative);

WavePacket make_packet(const Grid2D& grid, const PacketSpec& spec);

struct Ball {
  Vec2 center;
  double radius = 0.0;
};
struct ComplementBall {
  Vec2 center;
  double radius = 0.0;
};
/// Points with (x - point) . normal >= 0; points on the line count half.
struct HalfPlane {
  Vec2 point;
  Vec2 normal{1.0, 0.0};
};
using Region = std::variant<Ball, ComplementBall, HalfPlane>;

double probability_mass(const WavePacket& packet, const Region& region, Representation space);

struct SupportRatio {
  double ratio = 0.0;
  bool pass = false;
};

/// inf v(p)/v(pbar) over grid momenta whose density exceeds 1e-12 of the max.
SupportRatio momentum_support_ratio(const WavePacket& packet, const Dispersion& disp, Vec2 pbar);
/// Same ratio over the exact support disc of a packet spec (radius
/// effective_support_radius, centred on spec.boost).
SupportRatio momentum_support_ratio(const PacketSpec& spec, const Dispersion& disp);

/// Multiplication by the indicator of {H0(p) >= E} in momentum space.
WavePacket energy_projection(const WavePacket& packet, const Dispersion& disp, double energy);

/// Discrete L2 inner product, conjugate-linear in the first argument.
cplx inner_product(const WavePacket& a, const WavePacket& b);

/// Multiplies the momentum representation by f(p); returns a packet in the
/// representation of the input.
template <class F>
WavePacket apply_momentum_multiplier(const WavePacket& packet, F&& f) {
  WavePacket mom = packet.in(Representation::momentum);
  const Grid2D& g = mom.grid();
  std::vector<cplx> out(mom.samples().begin(), mom.samples().end());
  for (int k = 0; k < g.n(); ++k)
    for (int l = 0; l < g.n(); ++l) out[g.index(k, l)] *= f(g.momentum(k, l));
  return mom.with_samples(std::move(out)).in(packet.representation());
}

template <class F>
WavePacket apply_position_multiplier(const WavePacket& packet, F&& f) {
  WavePacket pos = packet.in(Representation::position);
  const Grid2D& g = pos.grid();
  std::vector<cplx> out(pos.samples().begin(), pos.samples().end());
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) out[g.index(i, j)] *= f(g.position(i, j));
  return pos.with_samples(std::move(out)).in(packet.representation());
}

}  // namespace hesc
