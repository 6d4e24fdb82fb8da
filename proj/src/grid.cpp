#include "hesc/grid.hpp"

#include "hesc/error.hpp"
#include "hesc/fft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace hesc {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Grid2D::Grid2D(int n, double length) : n_(n), length_(length) {
  if (n < 2 || (n & (n - 1)) != 0) throw InvalidArgument("grid size must be a power of two, got " + std::to_string(n));
  if (!(length > 0.0) || !std::isfinite(length)) throw InvalidArgument("grid length must be positive");
}

double Grid2D::dp() const { return kTwoPi / length_; }
double Grid2D::nyquist() const { return std::numbers::pi * n_ / length_; }

WavePacket::WavePacket(Grid2D grid, Representation rep, std::vector<cplx> samples)
    : grid_(grid), rep_(rep), samples_(std::move(samples)) {
  if (samples_.size() != grid_.size()) throw InvalidArgument("sample count does not match grid");
}

WavePacket WavePacket::zeros(const Grid2D& grid, Representation rep) {
  return {grid, rep, std::vector<cplx>(grid.size())};
}

double WavePacket::norm() const {
  double sum = 0.0;
  for (const cplx& a : samples_) sum += std::norm(a);
  const double cell = rep_ == Representation::position ? grid_.dx() : grid_.dp();
  return std::sqrt(sum) * cell;
}

WavePacket WavePacket::in(Representation rep) const {
  if (rep == rep_) return *this;
  std::vector<cplx> out(samples_.size());
  if (rep == Representation::momentum)
    to_momentum(grid_, samples_, out);
  else
    to_position(grid_, samples_, out);
  return {grid_, rep, std::move(out)};
}

WavePacket WavePacket::scaled(cplx factor) const {
  std::vector<cplx> out(samples_);
  for (cplx& a : out) a *= factor;
  return {grid_, rep_, std::move(out)};
}

namespace {

// (-1)^(k + l) from the -L/2 origin of the position axes.
void apply_checkerboard(const Grid2D& g, std::span<cplx> data, double scale) {
  const int n = g.n();
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) data[g.index(k, l)] *= ((k + l) & 1) ? -scale : scale;
}

}  // namespace

void to_momentum(const Grid2D& grid, std::span<const cplx> position, std::span<cplx> momentum) {
  fft::forward(grid.n(), position, momentum);
  apply_checkerboard(grid, momentum, grid.dx() * grid.dx() / kTwoPi);
}

void to_position(const Grid2D& grid, std::span<const cplx> momentum, std::span<cplx> position) {
  std::vector<cplx> tmp(momentum.begin(), momentum.end());
  apply_checkerboard(grid, tmp, 1.0);
  fft::backward(grid.n(), tmp, position);
  const double scale = grid.dp() * grid.dp() / kTwoPi;
  for (cplx& a : position) a *= scale;
}

WavePacket fourier_transform(const WavePacket& packet, FourierDirection direction) {
  return packet.in(direction == FourierDirection::forward ? Representation::momentum : Representation::position);
}

double effective_support_radius(const PacketSpec& spec) {
  if (spec.envelope == Envelope::bump) return spec.width;
  // density exp(-r^2 / width^2) drops below 1e-12 of its peak
  return spec.width * std::sqrt(-std::log(kSupportThreshold));
}

double envelope_value(const PacketSpec& spec, Vec2 p) {
  const double u2 = norm2(p) / (spec.width * spec.width);
  if (spec.envelope == Envelope::gaussian) return std::exp(-0.5 * u2);
  if (u2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u2));
}

WavePacket make_packet(const Grid2D& grid, const PacketSpec& spec) {
  if (!(spec.width > 0.0)) throw InvalidArgument("packet width must be positive");
  const double reach = effective_support_radius(spec) + norm(spec.boost);
  if (kNyquistMargin * reach > grid.nyquist())
    throw NyquistViolation("support radius + |pbar| = " + std::to_string(reach) + " exceeds Nyquist " +
                           std::to_string(grid.nyquist()) + " / 1.25");

  std::vector<cplx> mom(grid.size());
  double sum = 0.0;
  for (int k = 0; k < grid.n(); ++k) {
    for (int l = 0; l < grid.n(); ++l) {
      const Vec2 rel = grid.momentum(k, l) - spec.boost;
      const double amp = envelope_value(spec, rel);
      // translation by center: phase exp(-i (p - pbar) . x0)
      mom[grid.index(k, l)] = std::polar(amp, -dot(rel, spec.center));
      sum += amp * amp;
    }
  }
  const double norm = std::sqrt(sum) * grid.dp();
  for (cplx& a : mom) a /= norm;
  return WavePacket(grid, Representation::momentum, std::move(mom)).in(Representation::position);
}

double probability_mass(const WavePacket& packet, const Region& region, Representation space) {
  const WavePacket w = packet.in(space);
  const Grid2D& g = w.grid();
  const double cell = space == Representation::position ? g.dx() : g.dp();
  const double tol = 1e-12 * g.length();

  auto weight = [&](Vec2 pt) -> double {
    return std::visit(
        [&](const auto& r) -> double {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, Ball>) {
            return norm(pt - r.center) < r.radius ? 1.0 : 0.0;
          } else if constexpr (std::is_same_v<R, ComplementBall>) {
            return norm(pt - r.center) >= r.radius ? 1.0 : 0.0;
          } else {
            const double side = dot(pt - r.point, r.normal) / norm(r.normal);
            if (std::abs(side) <= tol) return 0.5;
            return side > 0.0 ? 1.0 : 0.0;
          }
        },
        region);
  };

  double sum = 0.0;
  for (int i = 0; i < g.n(); ++i) {
    for (int j = 0; j < g.n(); ++j) {
      const Vec2 pt = space == Representation::position ? g.position(i, j) : g.momentum(i, j);
      const double wgt = weight(pt);
      if (wgt != 0.0) sum += wgt * std::norm(w[g.index(i, j)]);
    }
  }
  return sum * cell * cell;
}

SupportRatio momentum_support_ratio(const WavePacket& packet, const Dispersion& disp, Vec2 pbar) {
  const double vbar = norm(disp.velocity(pbar));
  if (!(vbar > 0.0)) throw ZeroVelocity("v(pbar) = 0");
  const WavePacket mom = packet.in(Representation::momentum);
  const Grid2D& g = mom.grid();
  double peak = 0.0;
  for (const cplx& a : mom.samples()) peak = std::max(peak, std::norm(a));
  double ratio = std::numeric_limits<double>::infinity();
  for (int k = 0; k < g.n(); ++k)
    for (int l = 0; l < g.n(); ++l)
      if (std::norm(mom[g.index(k, l)]) > kSupportThreshold * peak)
        ratio = std::min(ratio, norm(disp.velocity(g.momentum(k, l))) / vbar);
  return {ratio, ratio >= 2.0 / 3.0};
}

SupportRatio momentum_support_ratio(const PacketSpec& spec, const Dispersion& disp) {
  const double vbar = norm(disp.velocity(spec.boost));
  if (!(vbar > 0.0)) throw ZeroVelocity("v(pbar) = 0");
  // Speed is increasing in |p| for both kinds; the slowest point of the disc
  // is the one closest to the origin.
  const double closest = std::max(0.0, norm(spec.boost) - effective_support_radius(spec));
  const double ratio = norm(disp.velocity(Vec2{closest, 0.0})) / vbar;
  return {ratio, ratio >= 2.0 / 3.0};
}

WavePacket energy_projection(const WavePacket& packet, const Dispersion& disp, double energy) {
  return apply_momentum_multiplier(packet, [&](Vec2 p) { return disp.energy(p) >= energy ? 1.0 : 0.0; });
}

cplx inner_product(const WavePacket& a, const WavePacket& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch("inner product of packets on different grids");
  const WavePacket bb = b.in(a.representation());
  cplx sum = 0.0;
  for (std::size_t i = 0; i < a.samples().size(); ++i) sum += std::conj(a[i]) * bb[i];
  const double cell = a.representation() == Representation::position ? a.grid().dx() : a.grid().dp();
  return sum * (cell * cell);
}

}  // namespace hesc
