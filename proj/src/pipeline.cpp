#include "hesc/pipeline.hpp"

#include "hesc/error.hpp"
#include "hesc/field_io.hpp"
#include "hesc/parallel.hpp"
#include "hesc/propagators.hpp"
#include "hesc/reconstruction.hpp"
#include "hesc/scattering.hpp"
#include "hesc/text.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace hesc {
namespace {

using text::format_number;
namespace fs = std::filesystem;

std::atomic<int> g_threads{1};

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << body;
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

PacketSpec unboosted(const ExperimentConfig& cfg) {
  PacketSpec spec = cfg.packet;
  spec.boost = {};
  return spec;
}

ScatteringConfig scattering_config(const ExperimentConfig& cfg, Vec2 pbar) {
  const auto& s = cfg.scattering;
  ScatteringConfig sc = make_scattering_config(cfg.dispersion, cfg.potential, pbar);
  double r0 = s.r_initial;
  if (r0 <= 0.0) r0 = cfg.potential.empty() ? 16.0 : 4.0 * classify_potential(cfg.potential).r99;
  r0 = std::min(r0, s.r_max);
  sc.r_minus = -r0;
  sc.r_plus = r0;
  sc.epsilon = s.epsilon;
  sc.r_max = s.r_max;
  sc.evolution = {s.dt, 0.0, s.safety};
  sc.dr_max = s.dr_max;
  sc.dollard = s.dollard;
  return sc;
}

std::vector<PhaseProfile> physics_profiles(const ExperimentConfig& cfg, const Grid2D& grid, int angles,
                                           std::ostream& log) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> jitter(-cfg.reconstruction.jitter, cfg.reconstruction.jitter);
  std::vector<PacketSpec> specs(angles, unboosted(cfg));
  if (cfg.reconstruction.jitter > 0.0)
    for (auto& spec : specs) {
      spec.center.x += jitter(rng);
      spec.center.y += jitter(rng);
    }
  std::vector<PhaseProfile> profiles(angles);
  parallel_for(std::size_t(angles), thread_count(), [&](std::size_t k) {
    const Vec2 omega = direction(k * std::numbers::pi / angles);
    const ScatteringConfig sc = scattering_config(cfg, omega * cfg.scattering.pbar);
    profiles[k] = phase_profile_extract(make_packet(grid, specs[k]), sc, cfg.scattering.mask_threshold);
  });
  log << "extracted " << angles << " phase profiles\n";
  return profiles;
}

std::vector<std::string> run_evolve(const ExperimentConfig& cfg, const Grid2D& grid, const fs::path& out) {
  PacketSpec spec = cfg.packet;
  spec.boost = direction(cfg.scattering.angle) * cfg.scattering.pbar;
  const WavePacket initial = make_packet(grid, spec);
  const EvolutionConfig ec{cfg.scattering.dt, cfg.scattering.t_total, cfg.scattering.safety};
  const WavePacket final_state = interacting_evolve(initial, cfg.dispersion, cfg.potential, ec);
  write_field(initial, out / "initial.qf2d");
  write_field(final_state, out / "final.qf2d");
  const PacketMoments m0 = packet_moments(initial, cfg.dispersion);
  const PacketMoments m1 = packet_moments(final_state, cfg.dispersion);
  std::ostringstream os;
  os << "t,norm,center_x,center_y,spread\n";
  os << "0," << format_number(initial.norm()) << ',' << format_number(m0.center.x) << ','
     << format_number(m0.center.y) << ',' << format_number(m0.position_spread) << "\n";
  os << format_number(ec.t_total) << ',' << format_number(final_state.norm()) << ',' << format_number(m1.center.x)
     << ',' << format_number(m1.center.y) << ',' << format_number(m1.position_spread) << "\n";
  write_text(out / "evolve.csv", os.str());
  return {"initial.qf2d", "final.qf2d", "evolve.csv"};
}

std::vector<std::string> run_scatter(const ExperimentConfig& cfg, const Grid2D& grid, const fs::path& out) {
  const WavePacket phi0 = make_packet(grid, unboosted(cfg));
  const ScatteringConfig sc = scattering_config(cfg, direction(cfg.scattering.angle) * cfg.scattering.pbar);
  const ScatteringResult res = converged_S_element(phi0, phi0, sc);
  write_scattering_csv({res}, out / "scatter.csv");
  write_field(*res.out_field, out / "out_field.qf2d");
  std::ostringstream os;
  os << "r,re_element,im_element\n";
  for (const auto& step : res.log)
    os << format_number(step.r) << ',' << format_number(step.element.real()) << ','
       << format_number(step.element.imag()) << "\n";
  write_text(out / "convergence.csv", os.str());
  return {"scatter.csv", "out_field.qf2d", "convergence.csv"};
}

std::vector<std::string> run_limit_scan(const ExperimentConfig& cfg, const Grid2D& grid, const fs::path& out,
                                        std::ostream& log) {
  LimitScanInput in{grid, unboosted(cfg), unboosted(cfg),
                    scattering_config(cfg, direction(cfg.scattering.angle) * cfg.scattering.pbar)};
  std::vector<Vec2> pbars;
  for (double p : cfg.scattering.pbar_list) pbars.push_back(direction(cfg.scattering.angle) * p);
  std::vector<LimitEntry> scan;
  if (cfg.dispersion.kind == DispersionKind::relativistic) {
    log << "relativistic limit check\n";
    scan = rel_limit_check(in, pbars);
  } else if (!cfg.potential.long_part().empty()) {
    log << "Dollard-corrected long-range scan\n";
    scan = long_range_limit_scan(in, pbars);
  } else {
    log << "nonrelativistic limit scan\n";
    scan = nr_limit_scan(in, pbars);
  }
  emit_plotdata(scan, out / "limit_scan.csv");
  std::vector<std::string> files{"limit_scan.csv"};
  if (scan.size() >= 3) {
    std::vector<std::pair<double, double>> pd;
    for (const auto& e : scan) pd.emplace_back(norm(e.pbar), e.delta);
    write_text(out / "limit_scan_fit.txt", "slope = " + format_number(error_slope_fit(pd)) + "\n");
    files.push_back("limit_scan_fit.txt");
  }
  return files;
}

Sinogram build_sinogram(const ExperimentConfig& cfg, const Grid2D& grid, Provenance source, std::ostream& log) {
  const auto& r = cfg.reconstruction;
  if (source == Provenance::oracle) return assemble_sinogram(cfg.potential.short_part(), r.angles, r.offsets, r.s_max);
  return assemble_sinogram(physics_profiles(cfg, grid, r.angles, log), r.offsets, r.s_max);
}

std::vector<std::string> run_reconstruct(const ExperimentConfig& cfg, const Grid2D& grid, const fs::path& out,
                                         std::ostream& log) {
  const auto& r = cfg.reconstruction;
  const Sinogram sino = build_sinogram(cfg, grid, r.source, log);
  const ReconField recon = fbp_invert(sino, ReconField::raster(r.raster, r.roi_radius));
  const ReconError err = recon_error(recon, cfg.potential.short_part(), r.roi_radius);
  write_sinogram(sino, out / "sinogram.csv");
  write_field(recon, out / "recon.qf2d");
  write_text(out / "recon_error.csv",
             "rms_rel,max_abs\n" + format_number(err.rms_rel) + "," + format_number(err.max_abs) + "\n");
  return {"sinogram.csv", "recon.qf2d", "recon_error.csv"};
}

std::vector<std::string> run_xray_oracle(const ExperimentConfig& cfg, const fs::path& out) {
  const auto& r = cfg.reconstruction;
  const Sinogram sino = assemble_sinogram(cfg.potential.short_part(), r.angles, r.offsets, r.s_max);
  write_sinogram(sino, out / "sinogram.csv");
  std::ostringstream os;
  os << "k,angle_rad,row_total\n";
  const auto totals = sino.row_totals();
  for (int k = 0; k < sino.K(); ++k)
    os << k << ',' << format_number(sino.angles[k]) << ',' << format_number(totals[k]) << "\n";
  write_text(out / "row_totals.csv", os.str());
  return {"sinogram.csv", "row_totals.csv"};
}

}  // namespace

void set_thread_count(int threads) { g_threads = std::max(1, threads); }
int thread_count() { return g_threads; }

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HESC_THREADS")) {
    const auto v = text::parse_int(env);
    if (v && *v > 0) return static_cast<int>(*v);
  }
  return 1;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw IoError("sha256 unavailable");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest.data(), &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

void write_manifest(const fs::path& out_dir, std::vector<std::string> artifacts) {
  std::sort(artifacts.begin(), artifacts.end());
  std::string body;
  for (const auto& name : artifacts) body += sha256_file(out_dir / name) + "  " + name + "\n";
  write_text(out_dir / "manifest.sha256", body);
}

std::vector<std::string> run_subcommand(const ExperimentConfig& cfg, std::string_view subcommand,
                                        const fs::path& out_dir, std::ostream& log) {
  const Grid2D grid(cfg.grid.n, cfg.grid.length);
  if (subcommand == "evolve") return run_evolve(cfg, grid, out_dir);
  if (subcommand == "scatter") return run_scatter(cfg, grid, out_dir);
  if (subcommand == "limit-scan") return run_limit_scan(cfg, grid, out_dir, log);
  if (subcommand == "sinogram") {
    const Sinogram sino = build_sinogram(cfg, grid, Provenance::physics, log);
    emit_plotdata(sino, out_dir / "sinogram.csv");
    return {"sinogram.csv"};
  }
  if (subcommand == "reconstruct") return run_reconstruct(cfg, grid, out_dir, log);
  if (subcommand == "xray-oracle") return run_xray_oracle(cfg, out_dir);
  throw ConfigError("unknown subcommand '" + std::string(subcommand) + "'");
}

int run_pipeline(const fs::path& config_path, std::string_view subcommand, const fs::path& out_dir,
                 std::ostream& log) {
  try {
    if (std::find(std::begin(kSubcommands), std::end(kSubcommands), subcommand) == std::end(kSubcommands))
      throw ConfigError("unknown subcommand '" + std::string(subcommand) + "'");
    const ExperimentConfig cfg = load_config(config_path);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    auto artifacts = run_subcommand(cfg, subcommand, out_dir, log);
    write_manifest(out_dir, std::move(artifacts));
    log << subcommand << ": wrote " << (out_dir / "manifest.sha256").string() << "\n";
    return 0;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorClass::io);
  }
}

}  // namespace hesc
