#pragma once

#include "hesc/vec2.hpp"

#include <string_view>

namespace hesc {

enum class DispersionKind { nonrelativistic, relativistic };

/// Kinetic energy law H0(p) in units hbar = c = 1.
///   nonrelativistic: H0 = p^2 / 2m
///   relativistic:    H0 = sqrt(p^2 + m^2)
struct Dispersion {
  DispersionKind kind = DispersionKind::nonrelativistic;
  double mass = 1.0;

  double energy(Vec2 p) const;
  /// Group velocity grad H0(p).
  Vec2 velocity(Vec2 p) const;
  /// H2(pbar, p) = H0(pbar + p) - H0(pbar) - grad H0(pbar) . p, evaluated
  /// without the catastrophic cancellation of the literal difference.
  double remainder(Vec2 pbar, Vec2 p) const;

  friend bool operator==(const Dispersion&, const Dispersion&) = default;
};

std::string_view to_string(DispersionKind kind);
DispersionKind parse_dispersion_kind(std::string_view text);

double h0_eval(const Dispersion& disp, Vec2 p);
Vec2 velocity_eval(const Dispersion& disp, Vec2 p);
double h2_remainder(const Dispersion& disp, Vec2 pbar, Vec2 p);

struct BoostSpec {
  Vec2 pbar;
  Vec2 omega;   // unit direction of pbar
  double speed; // |grad H0(pbar)|
};

/// Throws ZeroVelocity for pbar = 0.
BoostSpec make_boost(const Dispersion& disp, Vec2 pbar);

struct TimescaleReport {
  double interaction_time = 0.0;  // R / v(pbar)
  double ratio_bound = 0.0;       // sup_{|p| <= support} |H2(pbar, p)| / v(pbar)
  double radius = 0.0;            // R
};

/// Interaction-time versus spreading diagnostic. H2 is convex for both
/// dispersion kinds and vanishes at p = 0, so the supremum sits on the rim of
/// the support disc; the rim is scanned and the best bracket refined.
TimescaleReport timescale_ratio(const Dispersion& disp, Vec2 pbar, double support_radius,
                                double interaction_radius);

}  // namespace hesc
