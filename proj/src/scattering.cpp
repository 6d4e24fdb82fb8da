#include "hesc/scattering.hpp"

#include "hesc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hesc {

void ScatteringConfig::validate() const {
  if (!(r_minus <= 0.0 && 0.0 <= r_plus)) throw InvalidArgument("window must satisfy r- <= 0 <= r+");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (!(boost.speed > 0.0)) throw ZeroVelocity("v(pbar) = 0");
  if (!(r_max >= r_plus)) throw InvalidArgument("r_max below the initial window");
}

ScatteringConfig make_scattering_config(const Dispersion& disp, const ScalarPotential& potential, Vec2 pbar) {
  ScatteringConfig cfg;
  cfg.disp = disp;
  cfg.potential = potential;
  cfg.boost = make_boost(disp, pbar);
  return cfg;
}

WavePacket finite_time_S(const WavePacket& phi, const ScatteringConfig& cfg) {
  cfg.validate();
  const double t0 = cfg.t_minus(), t1 = cfg.t_plus();
  if (t0 == 0.0 && t1 == 0.0) return phi;
  WavePacket psi = free_evolve(phi, cfg.disp, t0);
  psi = interacting_evolve(psi, cfg.disp, cfg.potential, {cfg.evolution.dt, t1 - t0, cfg.evolution.safety});
  return free_evolve(psi, cfg.disp, -t1);
}

WavePacket finite_time_SD(const WavePacket& phi, const ScatteringConfig& cfg) {
  cfg.validate();
  const double t0 = cfg.t_minus(), t1 = cfg.t_plus();
  if (t0 == 0.0 && t1 == 0.0) return phi;
  const ScalarPotential lr = cfg.potential.long_part();
  WavePacket psi = dollard_evolve(phi, cfg.disp, lr, t0);
  psi = interacting_evolve(psi, cfg.disp, cfg.potential, {cfg.evolution.dt, t1 - t0, cfg.evolution.safety});
  return dollard_evolve_adjoint(psi, cfg.disp, lr, t1);
}

WavePacket boosted_S(const WavePacket& phi0, const ScatteringConfig& cfg) {
  cfg.validate();
  ComovingWindow window;
  window.t_minus = cfg.t_minus();
  window.t_plus = cfg.t_plus();
  window.dt = cfg.evolution.dt;
  window.dr_max = cfg.dr_max;
  window.safety = cfg.evolution.safety;
  const ScalarPotential lr = cfg.dollard ? cfg.potential.long_part() : ScalarPotential{};
  return comoving_scatter(phi0, cfg.disp, cfg.boost, cfg.potential, window, lr);
}

SupportRatio boosted_support_ratio(const WavePacket& phi0, const Dispersion& disp, Vec2 pbar) {
  const double vbar = norm(disp.velocity(pbar));
  if (!(vbar > 0.0)) throw ZeroVelocity("v(pbar) = 0");
  const WavePacket mom = phi0.in(Representation::momentum);
  const Grid2D& g = mom.grid();
  double peak = 0.0;
  for (const cplx& a : mom.samples()) peak = std::max(peak, std::norm(a));
  double ratio = std::numeric_limits<double>::infinity();
  for (int k = 0; k < g.n(); ++k)
    for (int l = 0; l < g.n(); ++l)
      if (std::norm(mom[g.index(k, l)]) > kSupportThreshold * peak)
        ratio = std::min(ratio, norm(disp.velocity(pbar + g.momentum(k, l))) / vbar);
  return {ratio, ratio >= 2.0 / 3.0};
}

ScatteringResult converged_S_element(const WavePacket& probe0, const WavePacket& source0,
                                     const ScatteringConfig& cfg) {
  cfg.validate();
  if (!(cfg.r_plus > 0.0 || cfg.r_minus < 0.0)) throw InvalidArgument("convergence needs a nonempty window");
  for (const WavePacket* w : {&probe0, &source0})
    if (!boosted_support_ratio(*w, cfg.disp, cfg.boost.pbar).pass)
      throw InvalidArgument("packet support reaches momenta slower than 2/3 v(pbar)");

  const double tol = cfg.epsilon / cfg.boost.speed;
  ScatteringResult result;
  result.boost = cfg.boost;

  auto run = [&](double scale) {
    ScatteringConfig c = cfg;
    c.r_minus *= scale;
    c.r_plus *= scale;
    WavePacket out = boosted_S(source0, c);
    const cplx element = inner_product(probe0, out);
    result.log.push_back({c.r_plus, element});
    result.element = element;
    result.r_final = c.r_plus;
    result.out_field = std::move(out);
    return element;
  };

  cplx previous = run(1.0);
  for (double scale = 2.0;; scale *= 2.0) {
    if (cfg.r_plus * scale > cfg.r_max) {
      if (cfg.require_convergence)
        throw NotConverged("window reached r_max = " + std::to_string(cfg.r_max) + " before the element settled",
                           result.log);
      return result;
    }
    const cplx current = run(scale);
    if (std::abs(current - previous) < tol) {
      result.converged = true;
      return result;
    }
    previous = current;
  }
}

namespace {

template <class F>
OracleValue overlap_quadrature(const WavePacket& probe0, const WavePacket& source0, F&& weight) {
  if (!(probe0.grid() == source0.grid())) throw GridMismatch("oracle packets on different grids");
  const WavePacket a = probe0.in(Representation::position);
  const WavePacket b = source0.in(Representation::position);
  const Grid2D& g = a.grid();
  double peak = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) peak = std::max(peak, std::abs(std::conj(a[i]) * b[i]));
  cplx fine = 0.0, coarse = 0.0;
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) {
      const std::size_t idx = g.index(i, j);
      const cplx w = std::conj(a[idx]) * b[idx];
      if (std::abs(w) <= 1e-15 * peak) continue;
      const cplx term = w * weight(g.position(i, j));
      fine += term;
      if (i % 2 == 0 && j % 2 == 0) coarse += term;
    }
  const double cell = g.dx() * g.dx();
  fine *= cell;
  coarse *= 4.0 * cell;
  return {fine, std::abs(fine - coarse)};
}

}  // namespace

OracleValue born_oracle(const WavePacket& probe0, const WavePacket& source0, const ScalarPotential& potential,
                        Vec2 omega) {
  return overlap_quadrature(probe0, source0, [&](Vec2 x) { return cplx(xray_oracle(potential, omega, x)); });
}

OracleValue difference_oracle(const WavePacket& probe0, const WavePacket& source0,
                              const ScalarPotential& potential, Vec2 omega) {
  if (potential.empty()) return {};
  return overlap_quadrature(probe0, source0, [&](Vec2 x) { return cplx(xray_difference(potential, omega, x)); });
}

OracleValue eikonal_oracle(const WavePacket& probe0, const WavePacket& source0, const ScalarPotential& potential,
                           Vec2 omega) {
  return overlap_quadrature(probe0, source0,
                            [&](Vec2 x) { return std::polar(1.0, -xray_oracle(potential, omega, x)); });
}

namespace {

enum class ScanKind { born, eikonal, dollard };

std::vector<LimitEntry> run_scan(const LimitScanInput& in, const std::vector<Vec2>& pbars, ScanKind kind) {
  PacketSpec probe = in.probe, source = in.source;
  probe.boost = source.boost = {};
  const WavePacket probe0 = make_packet(in.grid, probe);
  const WavePacket source0 = make_packet(in.grid, source);
  const cplx overlap = inner_product(probe0, source0);
  const ScalarPotential short_part = in.base.potential.short_part();
  const ScalarPotential long_part = in.base.potential.long_part();

  std::vector<LimitEntry> entries(pbars.size());
  parallel_for(pbars.size(), thread_count(), [&](std::size_t i) {
    ScatteringConfig cfg = in.base;
    cfg.boost = make_boost(cfg.disp, pbars[i]);
    cfg.dollard = kind == ScanKind::dollard;
    const ScatteringResult res = converged_S_element(probe0, source0, cfg);
    const double vbar = cfg.boost.speed;
    const Vec2 omega = cfg.boost.omega;

    LimitEntry& e = entries[i];
    e.pbar = pbars[i];
    e.raw = res.element - overlap;
    e.r_final = res.r_final;
    e.converged = res.converged;
    OracleValue oracle;
    switch (kind) {
      case ScanKind::born:
        e.value = vbar * cplx(0.0, 1.0) * e.raw;
        oracle = born_oracle(probe0, source0, short_part, omega);
        break;
      case ScanKind::eikonal:
        e.value = res.element;
        oracle = eikonal_oracle(probe0, source0, short_part, omega);
        break;
      case ScanKind::dollard: {
        const OracleValue diff = difference_oracle(probe0, source0, long_part, omega);
        e.value = vbar * cplx(0.0, 1.0) * e.raw - diff.value;
        oracle = born_oracle(probe0, source0, short_part, omega);
        oracle.refinement_error += diff.refinement_error;
        break;
      }
    }
    e.oracle = oracle.value;
    e.oracle_error = oracle.refinement_error;
    e.delta = std::abs(e.value - e.oracle);
  });
  return entries;
}

}  // namespace

std::vector<LimitEntry> nr_limit_scan(const LimitScanInput& in, const std::vector<Vec2>& pbars) {
  if (in.base.disp.kind != DispersionKind::nonrelativistic)
    throw InvalidArgument("nr_limit_scan needs the nonrelativistic dispersion");
  return run_scan(in, pbars, ScanKind::born);
}

std::vector<LimitEntry> rel_limit_check(const LimitScanInput& in, const std::vector<Vec2>& pbars) {
  if (in.base.disp.kind != DispersionKind::relativistic)
    throw InvalidArgument("rel_limit_check needs the relativistic dispersion");
  if (!in.base.potential.long_part().empty())
    throw InvalidArgument("relativistic runs take short-range potentials only");
  return run_scan(in, pbars, ScanKind::eikonal);
}

std::vector<LimitEntry> long_range_limit_scan(const LimitScanInput& in, const std::vector<Vec2>& pbars) {
  if (in.base.disp.kind != DispersionKind::nonrelativistic)
    throw InvalidArgument("the Dollard correction is defined for the nonrelativistic dispersion");
  const ScalarPotential lr = in.base.potential.long_part();
  if (!lr.empty() && !classify_potential(lr).long_ok)
    throw InvalidArgument("long-range part violates the derivative decay bounds");
  return run_scan(in, pbars, ScanKind::dollard);
}

PhaseProfile phase_profile_extract(const WavePacket& phi0, const ScatteringConfig& cfg, double mask_threshold) {
  cfg.validate();
  const WavePacket pos = phi0.in(Representation::position);
  const Grid2D& g = pos.grid();
  PhaseProfile out;
  out.grid = g;
  out.omega = cfg.boost.omega;
  out.speed = cfg.boost.speed;
  out.field.assign(g.size(), 0.0);
  out.mask.assign(g.size(), 0);
  out.weight.resize(g.size());

  double peak = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) peak = std::max(peak, std::abs(pos[i]));
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.weight[i] = std::norm(pos[i]);
    if (std::abs(pos[i]) > mask_threshold * peak) {
      out.mask[i] = 1;
      ++count;
    }
  }
  if (count == 0) throw MaskEmpty("no grid point above the mask threshold");

  const ScalarPotential short_part = cfg.potential.short_part();
  double w_max = 0.0;
  for (int i = 0; i < g.n(); i += 2)
    for (int j = 0; j < g.n(); j += 2)
      if (out.mask[g.index(i, j)])
        w_max = std::max(w_max, std::abs(xray_oracle(short_part, out.omega, g.position(i, j))));
  if (!(w_max / out.speed < 0.5 * std::numbers::pi))
    throw PhaseWrapRisk("max|W| / v(pbar) = " + std::to_string(w_max / out.speed) + " is not below pi/2");

  out.run = converged_S_element(phi0, phi0, cfg);
  const WavePacket psi = out.run.out_field->in(Representation::position);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (out.mask[i]) out.field[i] = -out.speed * std::arg(psi[i] / pos[i]);
  return out;
}

double error_slope_fit(const std::vector<std::pair<double, double>>& pbar_delta) {
  if (pbar_delta.size() < 3) throw DegenerateFit("slope fit needs at least three entries");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [p, d] : pbar_delta) {
    if (!(d >= 0.0) || !(p > 0.0)) throw DegenerateFit("slope fit needs |pbar| > 0 and delta >= 0");
    if (d == 0.0) return -std::numeric_limits<double>::infinity();
    const double lx = std::log(p), ly = std::log(d);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  const double n = static_cast<double>(pbar_delta.size());
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 1e-12 * n * sxx)) throw DegenerateFit("all |pbar| equal");
  return (n * sxy - sx * sy) / denom;
}

double generator_replacement_defect(const WavePacket& phi0, const Dispersion& disp, Vec2 pbar, double r) {
  const double vbar = norm(disp.velocity(pbar));
  if (!(vbar > 0.0)) throw ZeroVelocity("v(pbar) = 0");
  const WavePacket mom = phi0.in(Representation::momentum);
  const Grid2D& g = mom.grid();
  double sum = 0.0;
  for (int k = 0; k < g.n(); ++k)
    for (int l = 0; l < g.n(); ++l) {
      const double phase = -r * disp.remainder(pbar, g.momentum(k, l)) / vbar;
      sum += std::norm(std::polar(1.0, phase) - 1.0) * std::norm(mom[g.index(k, l)]);
    }
  return std::sqrt(sum) * g.dp();
}

double energy_filter_residual(const WavePacket& phi0, const Dispersion& disp, Vec2 pbar, double energy) {
  const WavePacket mom = phi0.in(Representation::momentum);
  const Grid2D& g = mom.grid();
  double sum = 0.0;
  for (int k = 0; k < g.n(); ++k)
    for (int l = 0; l < g.n(); ++l)
      if (disp.energy(pbar + g.momentum(k, l)) < energy) sum += std::norm(mom[g.index(k, l)]);
  return std::sqrt(sum) * g.dp();
}

}  // namespace hesc
