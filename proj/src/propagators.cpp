#include "hesc/propagators.hpp"

#include "hesc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

namespace hesc {
namespace {

constexpr double kPi = std::numbers::pi;

double largest_eigenvalue(double a, double b, double c) {
  const double mean = 0.5 * (a + c);
  const double half = 0.5 * (a - c);
  return mean + std::sqrt(half * half + b * b);
}

double max_energy(const Grid2D& g, const Dispersion& disp) {
  double m = 0.0;
  for (int k = 0; k < g.n(); ++k)
    for (int l = 0; l < g.n(); ++l) m = std::max(m, std::abs(disp.energy(g.momentum(k, l))));
  return m;
}

double max_remainder(const Grid2D& g, const Dispersion& disp, Vec2 pbar) {
  double m = 0.0;
  for (int k = 0; k < g.n(); ++k)
    for (int l = 0; l < g.n(); ++l) m = std::max(m, std::abs(disp.remainder(pbar, g.momentum(k, l))));
  return m;
}

int step_count(double span, double dt) {
  return std::max(1, static_cast<int>(std::ceil(std::abs(span) / dt - 1e-9)));
}

template <class F>
std::vector<cplx> momentum_phases(const Grid2D& g, F&& phase) {
  std::vector<cplx> out(g.size());
  for (int k = 0; k < g.n(); ++k)
    for (int l = 0; l < g.n(); ++l) out[g.index(k, l)] = std::polar(1.0, phase(g.momentum(k, l)));
  return out;
}

template <class F>
std::vector<cplx> position_phases(const Grid2D& g, F&& phase) {
  std::vector<cplx> out(g.size());
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) out[g.index(i, j)] = std::polar(1.0, phase(g.position(i, j)));
  return out;
}

void multiply(std::vector<cplx>& data, const std::vector<cplx>& factor) {
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= factor[i];
}

// Advances position samples by one momentum-diagonal factor.
class KineticStep {
 public:
  KineticStep(const Grid2D& g, std::vector<cplx> factor) : grid_(g), factor_(std::move(factor)), mom_(g.size()) {}

  void apply(std::vector<cplx>& psi) {
    to_momentum(grid_, psi, mom_);
    multiply(mom_, factor_);
    to_position(grid_, mom_, psi);
  }

 private:
  Grid2D grid_;
  std::vector<cplx> factor_;
  std::vector<cplx> mom_;
};

std::vector<cplx> position_samples(const WavePacket& packet) {
  const WavePacket pos = packet.in(Representation::position);
  return {pos.samples().begin(), pos.samples().end()};
}

}  // namespace

PacketMoments packet_moments(const WavePacket& packet, const Dispersion& disp, Vec2 pbar) {
  PacketMoments m;
  const WavePacket pos = packet.in(Representation::position);
  const WavePacket mom = packet.in(Representation::momentum);
  const Grid2D& g = pos.grid();

  double total = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) {
      const double w = std::norm(pos[g.index(i, j)]);
      const Vec2 x = g.position(i, j);
      total += w;
      sx += w * x.x; sy += w * x.y;
      sxx += w * x.x * x.x; sxy += w * x.x * x.y; syy += w * x.y * x.y;
    }
  if (!(total > 0.0)) throw InvalidArgument("packet has zero norm");
  m.center = {sx / total, sy / total};
  m.position_spread = std::sqrt(std::max(0.0, largest_eigenvalue(sxx / total - m.center.x * m.center.x,
                                                                  sxy / total - m.center.x * m.center.y,
                                                                  syy / total - m.center.y * m.center.y)));

  total = sx = sy = sxx = sxy = syy = 0;
  for (int k = 0; k < g.n(); ++k)
    for (int l = 0; l < g.n(); ++l) {
      const double w = std::norm(mom[g.index(k, l)]);
      const Vec2 v = disp.velocity(pbar + g.momentum(k, l));
      total += w;
      sx += w * v.x; sy += w * v.y;
      sxx += w * v.x * v.x; sxy += w * v.x * v.y; syy += w * v.y * v.y;
    }
  m.velocity = {sx / total, sy / total};
  m.velocity_spread = std::sqrt(std::max(0.0, largest_eigenvalue(sxx / total - m.velocity.x * m.velocity.x,
                                                                  sxy / total - m.velocity.x * m.velocity.y,
                                                                  syy / total - m.velocity.y * m.velocity.y)));
  return m;
}

void check_containment(const Grid2D& grid, const PacketMoments& m, double t0, double t1, double safety) {
  const double half = 0.5 * grid.length();
  // Both terms are convex in t, so the endpoints bound the whole window.
  for (double t : {t0, t1, 0.0}) {
    if (t < std::min(t0, t1) || t > std::max(t0, t1)) continue;
    const double reach = norm(m.center + m.velocity * t) + 3.0 * (m.position_spread + m.velocity_spread * std::abs(t)) +
                         safety * grid.length();
    if (!(reach < half))
      throw ContainmentViolation("packet reaches " + std::to_string(reach) + " at t = " + std::to_string(t) +
                                 ", box half-width " + std::to_string(half));
  }
}

WavePacket free_evolve(const WavePacket& packet, const Dispersion& disp, double t) {
  if (t == 0.0) return packet;
  return apply_momentum_multiplier(packet, [&](Vec2 p) { return std::polar(1.0, -t * disp.energy(p)); });
}

WavePacket interacting_evolve(const WavePacket& packet, const Dispersion& disp, const ScalarPotential& potential,
                              const EvolutionConfig& cfg) {
  if (!std::isfinite(cfg.t_total)) throw InvalidArgument("t_total must be finite");
  if (cfg.t_total == 0.0) return packet;
  const Grid2D& g = packet.grid();
  const double h0_max = max_energy(g, disp);
  double dt = cfg.dt;
  if (!(dt > 0.0)) {
    const double sup = potential.sup_bound();
    dt = 0.5 * std::min(sup > 0.0 ? 0.5 / sup : std::numeric_limits<double>::infinity(), kPi / h0_max);
  }
  if (dt * h0_max > kPi)
    throw StepTooLarge("dt * max|H0| = " + std::to_string(dt * h0_max) + " exceeds pi");

  check_containment(g, packet_moments(packet, disp), 0.0, cfg.t_total, cfg.safety);

  const int steps = step_count(cfg.t_total, dt);
  const double h = cfg.t_total / steps;
  KineticStep kinetic(g, momentum_phases(g, [&](Vec2 p) { return -h * disp.energy(p); }));
  const auto half = position_phases(g, [&](Vec2 x) { return -0.5 * h * potential.value(x); });
  const auto full = position_phases(g, [&](Vec2 x) { return -h * potential.value(x); });

  std::vector<cplx> psi = position_samples(packet);
  multiply(psi, half);
  for (int s = 0; s < steps; ++s) {
    kinetic.apply(psi);
    multiply(psi, s + 1 == steps ? half : full);
  }
  return WavePacket(g, Representation::position, std::move(psi)).in(packet.representation());
}

WavePacket translation_evolve(const WavePacket& packet, Vec2 omega, double r) {
  if (r == 0.0) return packet;
  return apply_momentum_multiplier(packet, [&](Vec2 p) { return std::polar(1.0, -r * dot(omega, p)); });
}

LineIntegralCache::Field LineIntegralCache::get(const Grid2D& grid, const ScalarPotential& potential, Vec2 omega,
                                                double r1, double r2) {
  Key key{grid.n(), grid.length(), omega.x, omega.y, r1, r2, describe(potential)};
  {
    std::shared_lock lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  auto values = std::make_shared<std::vector<double>>(grid.size());
  for (int i = 0; i < grid.n(); ++i)
    for (int j = 0; j < grid.n(); ++j)
      (*values)[grid.index(i, j)] = line_integral(potential, omega, grid.position(i, j), r1, r2);
  std::unique_lock lock(mutex_);
  return entries_.try_emplace(std::move(key), std::move(values)).first->second;
}

std::size_t LineIntegralCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

void LineIntegralCache::clear() {
  std::unique_lock lock(mutex_);
  entries_.clear();
}

LineIntegralCache& default_line_cache() {
  static LineIntegralCache cache;
  return cache;
}

WavePacket line_phase_apply(const WavePacket& packet, const ScalarPotential& potential, Vec2 omega, double vbar,
                            double r_minus, double r_plus, LineIntegralCache& cache) {
  if (!(vbar > 0.0)) throw ZeroVelocity("line phase needs a positive speed");
  if ((!std::isfinite(r_minus) || !std::isfinite(r_plus)) && !potential.line_integrable())
    throw DivergentLineIntegral("infinite window over a potential without integrable line profile");
  if (potential.empty() || r_minus == r_plus) return packet;
  const auto integrals = cache.get(packet.grid(), potential, omega, r_minus, r_plus);
  const WavePacket pos = packet.in(Representation::position);
  std::vector<cplx> out(pos.samples().begin(), pos.samples().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::polar(1.0, -(*integrals)[i] / vbar);
  return pos.with_samples(std::move(out)).in(packet.representation());
}

WavePacket generator_evolve(const WavePacket& packet, const ScalarPotential& potential, Vec2 omega, double vbar,
                            double r_minus, double r_plus, double dr) {
  if (!(vbar > 0.0)) throw ZeroVelocity("generator evolution needs a positive speed");
  if (!(dr > 0.0) || r_plus < r_minus) throw InvalidArgument("need dr > 0 and r- <= r+");
  if (r_plus == r_minus) return packet;
  const Grid2D& g = packet.grid();
  const int steps = step_count(r_plus - r_minus, dr);
  const double h = (r_plus - r_minus) / steps;

  KineticStep shift(g, momentum_phases(g, [&](Vec2 p) { return -h * dot(omega, p); }));
  const auto half = position_phases(g, [&](Vec2 x) { return -0.5 * h * potential.value(x) / vbar; });
  const auto full = position_phases(g, [&](Vec2 x) { return -h * potential.value(x) / vbar; });

  std::vector<cplx> psi = position_samples(translation_evolve(packet, omega, r_minus));
  multiply(psi, half);
  for (int s = 0; s < steps; ++s) {
    shift.apply(psi);
    multiply(psi, s + 1 == steps ? half : full);
  }
  const WavePacket out(g, Representation::position, std::move(psi));
  return translation_evolve(out, omega, -r_plus).in(packet.representation());
}

WavePacket dollard_evolve(const WavePacket& packet, const Dispersion& disp, const ScalarPotential& long_part,
                          double t) {
  return apply_momentum_multiplier(packet, [&](Vec2 p) {
    return std::polar(1.0, -t * disp.energy(p) - dollard_phase(long_part, p, disp.mass, 0.0, t));
  });
}

WavePacket dollard_evolve_adjoint(const WavePacket& packet, const Dispersion& disp,
                                  const ScalarPotential& long_part, double t) {
  return apply_momentum_multiplier(packet, [&](Vec2 p) {
    return std::polar(1.0, t * disp.energy(p) + dollard_phase(long_part, p, disp.mass, 0.0, t));
  });
}

std::vector<RegionMass> forbidden_region_mass(const WavePacket& phi0, const Dispersion& disp, Vec2 pbar,
                                              const std::vector<double>& times, double safety) {
  const BoostSpec boost = make_boost(disp, pbar);
  if (times.empty()) return {};
  const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
  if (*lo < 0.0) throw InvalidArgument("times must be nonnegative");
  PacketMoments m = packet_moments(phi0, disp, pbar);
  m.velocity = m.velocity - boost.omega * boost.speed;
  check_containment(phi0.grid(), m, 0.0, *hi, safety);

  const WavePacket mom = phi0.in(Representation::momentum);
  std::vector<RegionMass> out;
  out.reserve(times.size());
  for (double t : times) {
    const WavePacket chi =
        apply_momentum_multiplier(mom, [&](Vec2 p) { return std::polar(1.0, -t * disp.remainder(pbar, p)); });
    const double reach = t * boost.speed;
    out.push_back({t, probability_mass(chi, Ball{boost.omega * (-reach), 0.5 * reach}, Representation::position)});
  }
  return out;
}

std::vector<RegionMass> forbidden_region_mass_lab(const WavePacket& packet, const Dispersion& disp, Vec2 pbar,
                                                  const std::vector<double>& times, double safety) {
  const BoostSpec boost = make_boost(disp, pbar);
  if (times.empty()) return {};
  const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
  if (*lo < 0.0) throw InvalidArgument("times must be nonnegative");
  check_containment(packet.grid(), packet_moments(packet, disp), 0.0, *hi, safety);
  std::vector<RegionMass> out;
  for (double t : times) {
    const WavePacket psi = free_evolve(packet, disp, t);
    out.push_back({t, probability_mass(psi, Ball{{}, 0.5 * t * boost.speed}, Representation::position)});
  }
  return out;
}

double comoving_step(const Grid2D& grid, const Dispersion& disp, const BoostSpec& boost,
                     const ScalarPotential& potential, double dr_max) {
  const double sup = potential.sup_bound();
  const double inf = std::numeric_limits<double>::infinity();
  const double k_max = max_remainder(grid, disp, boost.pbar);
  return 0.5 * std::min({sup > 0.0 ? 0.5 / sup : inf, k_max > 0.0 ? kPi / k_max : inf,
                         dr_max > 0.0 ? dr_max / boost.speed : inf});
}

WavePacket comoving_scatter(const WavePacket& phi0, const Dispersion& disp, const BoostSpec& boost,
                            const ScalarPotential& potential, const ComovingWindow& window,
                            const ScalarPotential& dollard_long) {
  if (!(window.t_minus <= window.t_plus)) throw InvalidArgument("need t- <= t+");
  if (!(boost.speed > 0.0)) throw ZeroVelocity("v(pbar) = 0");
  const Grid2D& g = phi0.grid();
  const Vec2 pbar = boost.pbar;
  const double t0 = window.t_minus, t1 = window.t_plus;

  const double dt = window.dt > 0.0 ? window.dt : comoving_step(g, disp, boost, potential, window.dr_max);
  const double k_max = max_remainder(g, disp, pbar);
  if (dt * k_max > kPi) throw StepTooLarge("dt * max|H2| = " + std::to_string(dt * k_max) + " exceeds pi");

  PacketMoments m = packet_moments(phi0, disp, pbar);
  m.velocity = {};
  check_containment(g, m, t0, t1, window.safety);

  const bool dollard = !dollard_long.empty();
  auto free_phase = [&](Vec2 p, double t) {
    double phase = -t * disp.remainder(pbar, p);
    if (dollard) phase -= dollard_phase(dollard_long, pbar + p, disp.mass, 0.0, t);
    return phase;
  };

  const WavePacket mom0 = phi0.in(Representation::momentum);
  std::vector<cplx> mom(mom0.samples().begin(), mom0.samples().end());
  multiply(mom, momentum_phases(g, [&](Vec2 p) { return free_phase(p, t0); }));

  std::vector<cplx> psi(g.size());
  to_position(g, mom, psi);
  if (t1 > t0 && !potential.empty()) {
    const int steps = step_count(t1 - t0, dt);
    const double h = (t1 - t0) / steps;
    KineticStep kinetic(g, momentum_phases(g, [&](Vec2 p) { return -h * disp.remainder(pbar, p); }));
    const Vec2 velocity = boost.omega * boost.speed;
    auto kick = [&](double t, double weight) {
      const Vec2 shift = velocity * t;
      for (int i = 0; i < g.n(); ++i)
        for (int j = 0; j < g.n(); ++j)
          psi[g.index(i, j)] *= std::polar(1.0, -weight * potential.value(g.position(i, j) + shift));
    };
    kick(t0, 0.5 * h);
    for (int s = 0; s < steps; ++s) {
      kinetic.apply(psi);
      kick(t0 + (s + 1) * h, s + 1 == steps ? 0.5 * h : h);
    }
  } else if (t1 > t0) {
    KineticStep kinetic(g, momentum_phases(g, [&](Vec2 p) { return -(t1 - t0) * disp.remainder(pbar, p); }));
    kinetic.apply(psi);
  }

  to_momentum(g, psi, mom);
  multiply(mom, momentum_phases(g, [&](Vec2 p) { return -free_phase(p, t1); }));
  return WavePacket(g, Representation::momentum, std::move(mom)).in(phi0.representation());
}

}  // namespace hesc
