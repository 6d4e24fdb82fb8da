#include "hesc/kinematics.hpp"

#include "hesc/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace hesc {

double Dispersion::energy(Vec2 p) const {
  if (kind == DispersionKind::nonrelativistic) return norm2(p) / (2.0 * mass);
  return std::sqrt(norm2(p) + mass * mass);
}

Vec2 Dispersion::velocity(Vec2 p) const {
  if (kind == DispersionKind::nonrelativistic) return p * (1.0 / mass);
  return p * (1.0 / std::sqrt(norm2(p) + mass * mass));
}

double Dispersion::remainder(Vec2 pbar, Vec2 p) const {
  if (kind == DispersionKind::nonrelativistic) return norm2(p) / (2.0 * mass);
  // a = H0(pbar), b = H0(pbar + p); b - a = (2 pbar.p + p^2) / (a + b).
  const double m2 = mass * mass;
  const double a = std::sqrt(norm2(pbar) + m2);
  const double b = std::sqrt(norm2(pbar + p) + m2);
  const double s = a + b;
  const double pp = dot(pbar, p);
  const double q = 2.0 * pp + norm2(p);
  return (norm2(p) - pp * q / (a * s)) / s;
}

std::string_view to_string(DispersionKind kind) {
  return kind == DispersionKind::nonrelativistic ? "NR" : "Rel";
}

DispersionKind parse_dispersion_kind(std::string_view text) {
  if (text == "NR" || text == "nr" || text == "nonrelativistic") return DispersionKind::nonrelativistic;
  if (text == "Rel" || text == "rel" || text == "relativistic") return DispersionKind::relativistic;
  throw ConfigError("unknown dispersion kind '" + std::string(text) + "'");
}

double h0_eval(const Dispersion& disp, Vec2 p) { return disp.energy(p); }
Vec2 velocity_eval(const Dispersion& disp, Vec2 p) { return disp.velocity(p); }
double h2_remainder(const Dispersion& disp, Vec2 pbar, Vec2 p) { return disp.remainder(pbar, p); }

BoostSpec make_boost(const Dispersion& disp, Vec2 pbar) {
  const double magnitude = norm(pbar);
  if (magnitude == 0.0) throw ZeroVelocity("boost momentum is zero");
  const double speed = norm(disp.velocity(pbar));
  if (!(speed > 0.0)) throw ZeroVelocity("v(pbar) vanishes");
  return BoostSpec{pbar, pbar * (1.0 / magnitude), speed};
}

TimescaleReport timescale_ratio(const Dispersion& disp, Vec2 pbar, double support_radius,
                                double interaction_radius) {
  const BoostSpec boost = make_boost(disp, pbar);
  auto rim = [&](double angle) {
    return std::abs(disp.remainder(pbar, support_radius * direction(angle)));
  };

  constexpr int samples = 2048;
  const double step = 2.0 * std::numbers::pi / samples;
  int best = 0;
  double best_value = -1.0;
  for (int k = 0; k < samples; ++k) {
    const double v = rim(k * step);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  // Golden-section refinement inside the bracketing samples.
  double lo = (best - 1) * step;
  double hi = (best + 1) * step;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo);
  double d = lo + g * (hi - lo);
  double fc = rim(c);
  double fd = rim(d);
  for (int it = 0; it < 80; ++it) {
    if (fc > fd) {
      hi = d; d = c; fd = fc;
      c = hi - g * (hi - lo); fc = rim(c);
    } else {
      lo = c; c = d; fc = fd;
      d = lo + g * (hi - lo); fd = rim(d);
    }
  }
  best_value = std::max({best_value, fc, fd});

  TimescaleReport report;
  report.radius = interaction_radius;
  report.interaction_time = interaction_radius / boost.speed;
  report.ratio_bound = best_value / boost.speed;
  return report;
}

}  // namespace hesc
