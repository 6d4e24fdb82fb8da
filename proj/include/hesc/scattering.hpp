#pragma once

#include "hesc/error.hpp"
#include "hesc/grid.hpp"
#include "hesc/kinematics.hpp"
#include "hesc/potentials.hpp"
#include "hesc/propagators.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace hesc {

struct ConvergenceStep {
  double r = 0.0;  // window half-width r+ = -r-
  cplx element;
};

class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, std::vector<ConvergenceStep> log)
      : Error(ErrorClass::convergence, "NotConverged", what), log_(std::move(log)) {}
  const std::vector<ConvergenceStep>& log() const noexcept { return log_; }

 private:
  std::vector<ConvergenceStep> log_;
};

/// Window lengths are in separation units; times are t = r / v(pbar).
struct ScatteringConfig {
  Dispersion disp;
  ScalarPotential potential;
  BoostSpec boost;
  double r_minus = -16.0;
  double r_plus = 16.0;
  double epsilon = 1e-4;
  double r_max = 1024.0;
  EvolutionConfig evolution;  // dt <= 0 picks the automatic step
  double dr_max = 0.05;       // cap on v(pbar) dt for the moving-frame engine
  bool dollard = false;       // use Dollard free factors built from the long part
  bool require_convergence = true;

  double t_minus() const { return r_minus / boost.speed; }
  double t_plus() const { return r_plus / boost.speed; }
  void validate() const;
};

ScatteringConfig make_scattering_config(const Dispersion& disp, const ScalarPotential& potential, Vec2 pbar);

struct ScatteringResult {
  cplx element;
  std::optional<WavePacket> out_field;  // e^{-i pbar x} S Phi_pbar, frame of phi0
  std::vector<ConvergenceStep> log;
  bool converged = false;
  BoostSpec boost{};
  double r_final = 0.0;
};

/// Lab frame: e^{i t+ H0} U(t+ - t-) e^{-i t- H0} phi, with phi already boosted.
WavePacket finite_time_S(const WavePacket& phi, const ScatteringConfig& cfg);
/// Lab frame Dollard operator [U_D(t+)]* U(t+ - t-) U_D(t-) phi.
WavePacket finite_time_SD(const WavePacket& phi, const ScatteringConfig& cfg);

/// e^{-i pbar x} S(t+, t-) e^{i pbar x} phi0 (or S_D when cfg.dollard) for an
/// unboosted phi0, via the moving-frame engine.
WavePacket boosted_S(const WavePacket& phi0, const ScatteringConfig& cfg);

/// <probe0, e^{-i pbar x} S e^{i pbar x} source0> with the window doubled
/// until consecutive elements differ by less than epsilon / v(pbar).
ScatteringResult converged_S_element(const WavePacket& probe0, const WavePacket& source0,
                                     const ScatteringConfig& cfg);

/// inf over the grid support of phi0 of |v(pbar + p)| / v(pbar).
SupportRatio boosted_support_ratio(const WavePacket& phi0, const Dispersion& disp, Vec2 pbar);

struct OracleValue {
  cplx value;
  double refinement_error = 0.0;  // |I(dx) - I(2 dx)|
};

/// int d^2x conj(probe)(x) source(x) W(x) for W(x) = int V(x + omega r) dr.
OracleValue born_oracle(const WavePacket& probe0, const WavePacket& source0, const ScalarPotential& potential,
                        Vec2 omega);
/// Same overlap against int [V(x + omega r) - V(omega r)] dr.
OracleValue difference_oracle(const WavePacket& probe0, const WavePacket& source0,
                              const ScalarPotential& potential, Vec2 omega);
/// <probe, exp(-i W) source>.
OracleValue eikonal_oracle(const WavePacket& probe0, const WavePacket& source0, const ScalarPotential& potential,
                           Vec2 omega);

struct LimitEntry {
  Vec2 pbar;
  cplx value;
  cplx oracle;
  double delta = 0.0;
  cplx raw;              // <probe, (S - 1) source> before scaling
  double oracle_error = 0.0;
  double r_final = 0.0;
  bool converged = false;
};

struct LimitScanInput {
  Grid2D grid{128, 64.0};
  PacketSpec probe;   // unboosted; boost is taken from each scan entry
  PacketSpec source;
  ScatteringConfig base;  // dispersion, potential, initial window, epsilon
};

/// v(pbar) <probe_pbar, i(S - 1) source_pbar> against the first-order oracle.
std::vector<LimitEntry> nr_limit_scan(const LimitScanInput& in, const std::vector<Vec2>& pbars);
/// <probe_pbar, S source_pbar> against <probe, exp(-i W) source>.
std::vector<LimitEntry> rel_limit_check(const LimitScanInput& in, const std::vector<Vec2>& pbars);
/// Dollard-corrected elements minus the long-range difference integral,
/// against the short-range oracle.
std::vector<LimitEntry> long_range_limit_scan(const LimitScanInput& in, const std::vector<Vec2>& pbars);

struct PhaseProfile {
  Grid2D grid{2, 1.0};
  Vec2 omega;
  double speed = 0.0;
  std::vector<double> field;         // extracted W on the mask, 0 elsewhere
  std::vector<std::uint8_t> mask;
  std::vector<double> weight;        // |phi0|^2
  ScatteringResult run;
};

PhaseProfile phase_profile_extract(const WavePacket& phi0, const ScatteringConfig& cfg, double mask_threshold);

/// Least-squares slope of log delta against log |pbar|. Returns -inf when a
/// delta is exactly zero; throws DegenerateFit for fewer than three entries,
/// negative deltas or a single |pbar|.
double error_slope_fit(const std::vector<std::pair<double, double>>& pbar_delta);

/// || (exp(-i r H2(pbar, p) / v) - 1) phi0 ||: the distance between the
/// evolutions generated by omega.p + H2 / v and by omega.p over length r.
double generator_replacement_defect(const WavePacket& phi0, const Dispersion& disp, Vec2 pbar, double r);

/// || F(H0(pbar + p) >= energy) phi0 - phi0 ||.
double energy_filter_residual(const WavePacket& phi0, const Dispersion& disp, Vec2 pbar, double energy);

}  // namespace hesc
