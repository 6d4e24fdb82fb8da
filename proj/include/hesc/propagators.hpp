#pragma once

#include "hesc/grid.hpp"
#include "hesc/kinematics.hpp"
#include "hesc/potentials.hpp"

#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

namespace hesc {

/// Fixed-step Strang splitting. dt <= 0 selects the automatic step
/// 0.5 * min(0.5 / sup|V|, pi / max|H0|). t_total may be negative.
struct EvolutionConfig {
  double dt = 0.0;
  double t_total = 0.0;
  double safety = 0.1;  // box margin as a fraction of L
};

/// Position centroid, velocity centroid and rms spreads of a packet.
struct PacketMoments {
  Vec2 center;
  Vec2 velocity;
  double position_spread = 0.0;  // sqrt of the largest eigenvalue of cov(x)
  double velocity_spread = 0.0;  // same for cov(v)
};

PacketMoments packet_moments(const WavePacket& packet, const Dispersion& disp, Vec2 pbar = {});

/// Throws ContainmentViolation unless |x(t)| + 3 sigma(t) + safety L < L/2 for
/// t in [t0, t1], with x(t) the classical centre and sigma(t) <= sigma0 + sigma_v |t|.
void check_containment(const Grid2D& grid, const PacketMoments& m, double t0, double t1, double safety);

WavePacket free_evolve(const WavePacket& packet, const Dispersion& disp, double t);

WavePacket interacting_evolve(const WavePacket& packet, const Dispersion& disp, const ScalarPotential& potential,
                              const EvolutionConfig& cfg);

/// Rigid translation by r omega (momentum multiplier exp(-i r omega.p)).
WavePacket translation_evolve(const WavePacket& packet, Vec2 omega, double r);

/// Per-grid-point line integrals int_{r1}^{r2} V(x + omega r) dr, shared
/// between threads. Lookups take a shared lock; a missing entry is computed
/// outside the lock and inserted only if no other thread got there first.
class LineIntegralCache {
 public:
  using Field = std::shared_ptr<const std::vector<double>>;

  Field get(const Grid2D& grid, const ScalarPotential& potential, Vec2 omega, double r1, double r2);
  std::size_t size() const;
  void clear();

 private:
  using Key = std::tuple<int, double, double, double, double, double, std::string>;
  mutable std::shared_mutex mutex_;
  std::map<Key, Field> entries_;
};

LineIntegralCache& default_line_cache();

/// Position multiplier exp{(-i / vbar) int_{r-}^{r+} V(x + omega r) dr}.
WavePacket line_phase_apply(const WavePacket& packet, const ScalarPotential& potential, Vec2 omega, double vbar,
                            double r_minus, double r_plus, LineIntegralCache& cache = default_line_cache());

/// exp(i r+ omega.p) exp(-i (r+ - r-) [omega.p + V / vbar]) exp(-i r- omega.p)
/// by Strang splitting with step dr; the exact result is line_phase_apply.
WavePacket generator_evolve(const WavePacket& packet, const ScalarPotential& potential, Vec2 omega, double vbar,
                            double r_minus, double r_plus, double dr);

/// Momentum multiplier exp{-i t H0(p) - i int_0^t V_l(s p / m) ds}.
WavePacket dollard_evolve(const WavePacket& packet, const Dispersion& disp, const ScalarPotential& long_part,
                          double t);
/// Adjoint of dollard_evolve at the same t.
WavePacket dollard_evolve_adjoint(const WavePacket& packet, const Dispersion& disp,
                                  const ScalarPotential& long_part, double t);

struct RegionMass {
  double t = 0.0;
  double mass = 0.0;
};

/// Mass of exp(-i t H0) e^{i pbar x} phi0 inside |x| < t v(pbar) / 2, computed
/// in coordinates moving with v(pbar) so that large pbar needs no larger grid.
/// phi0 is the unboosted packet centred at the origin.
std::vector<RegionMass> forbidden_region_mass(const WavePacket& phi0, const Dispersion& disp, Vec2 pbar,
                                              const std::vector<double>& times, double safety = 0.1);

/// Same quantity on the lab grid; `packet` already carries the boost.
std::vector<RegionMass> forbidden_region_mass_lab(const WavePacket& packet, const Dispersion& disp, Vec2 pbar,
                                                  const std::vector<double>& times, double safety = 0.1);

struct ComovingWindow {
  double t_minus = 0.0;
  double t_plus = 0.0;
  double dt = 0.0;  // <= 0: comoving_step with dr_max
  double dr_max = 0.05;
  double safety = 0.1;
};

/// 0.5 * min(0.5 / sup|V|, pi / max|K|, dr_max / v(pbar)) with
/// K(p) = H2(pbar, p) over the grid momenta.
double comoving_step(const Grid2D& grid, const Dispersion& disp, const BoostSpec& boost,
                     const ScalarPotential& potential, double dr_max);

/// e^{-i pbar x} S(t+, t-) e^{i pbar x} phi0. The interacting evolution runs
/// in coordinates moving with v(pbar), where the generator becomes
/// H2(pbar, p) + V(x + v t omega); free factors reduce to exp(-/+ i t H2).
/// A non-empty dollard_long replaces the free factors by the Dollard ones.
WavePacket comoving_scatter(const WavePacket& phi0, const Dispersion& disp, const BoostSpec& boost,
                            const ScalarPotential& potential, const ComovingWindow& window,
                            const ScalarPotential& dollard_long = {});

}  // namespace hesc
