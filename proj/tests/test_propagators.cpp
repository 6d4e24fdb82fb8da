#include "hesc/error.hpp"
#include "hesc/propagators.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <thread>

using namespace hesc;

namespace {

double max_diff(const WavePacket& a, const WavePacket& b) {
  const auto pa = a.in(Representation::position);
  const auto pb = b.in(Representation::position);
  double m = 0.0;
  for (std::size_t i = 0; i < pa.grid().size(); ++i) m = std::max(m, std::abs(pa[i] - pb[i]));
  return m;
}

}  // namespace

TEST_CASE("free evolution") {
  const Grid2D g(256, 64.0);
  const Dispersion nr{};
  const PacketSpec spec{Envelope::gaussian, 1.0, {-8.0, 0.0}, {4.0, 0.0}};
  const WavePacket psi = make_packet(g, spec);
  CHECK(max_diff(free_evolve(psi, nr, 0.0), psi) < 1e-14);

  const WavePacket out = free_evolve(psi, nr, 2.0).in(Representation::position);
  double err = 0.0;
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j)
      err = std::max(err, std::abs(out[g.index(i, j)] - oracle::dispersing_gaussian(g.position(i, j), 2.0, 1.0,
                                                                                   spec.boost, spec.center, 1.0)));
  CHECK(err < 1e-8);
  CHECK(std::abs(out.norm() - 1.0) < 1e-12);
  const PacketMoments m = packet_moments(out, nr);
  CHECK(m.center.x == doctest::Approx(0.0).epsilon(1e-9));
  // position variance per axis (1 + t^2) / 2 for unit momentum width
  CHECK(m.position_spread == doctest::Approx(std::sqrt(2.5)).epsilon(1e-9));

  const WavePacket ab = free_evolve(free_evolve(psi, nr, 0.7), nr, 1.1);
  CHECK(max_diff(ab, free_evolve(psi, nr, 1.8)) < 1e-12);
  const Dispersion rel{DispersionKind::relativistic, 1.0};
  CHECK(max_diff(free_evolve(free_evolve(psi, rel, 3.0), rel, -3.0), psi) < 1e-12);
}

TEST_CASE("split-step evolution") {
  const Grid2D g(128, 32.0);
  const Dispersion nr{};
  const WavePacket psi = make_packet(g, {Envelope::gaussian, 1.0, {-2.0, 0.5}, {1.0, 0.0}});
  const ScalarPotential v = ScalarPotential::gaussian(2.0, {0.5, 0.0}, 1.0);

  SUBCASE("no potential reduces to free motion") {
    const WavePacket a = interacting_evolve(psi, nr, {}, {0.01, 1.5, 0.1});
    CHECK(max_diff(a, free_evolve(psi, nr, 1.5)) < 1e-10);
  }
  SUBCASE("norm over a thousand steps") {
    const WavePacket a = interacting_evolve(psi, nr, v, {0.002, 2.0, 0.1});
    CHECK(std::abs(a.norm() - 1.0) < 1e-9);
  }
  SUBCASE("second order in the step") {
    const WavePacket ref = interacting_evolve(psi, nr, v, {0.002, 1.0, 0.1});
    const double e1 = oracle::l2_distance(interacting_evolve(psi, nr, v, {0.016, 1.0, 0.1}), ref);
    const double e2 = oracle::l2_distance(interacting_evolve(psi, nr, v, {0.008, 1.0, 0.1}), ref);
    CHECK(e1 / e2 >= 3.5);
    CHECK(e1 / e2 <= 4.5);
  }
  SUBCASE("forward then backward returns the input") {
    const WavePacket there = interacting_evolve(psi, nr, v, {0.01, 1.2, 0.1});
    const WavePacket back = interacting_evolve(there, nr, v, {0.01, -1.2, 0.1});
    CHECK(max_diff(back, psi) < 1e-8);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(interacting_evolve(psi, nr, v, {0.01, 30.0, 0.1}), ContainmentViolation);
    CHECK_THROWS_AS(interacting_evolve(psi, nr, v, {1.0, 2.0, 0.1}), StepTooLarge);
  }
}

TEST_CASE("translation") {
  const Grid2D g(128, 32.0);
  const WavePacket psi = make_packet(g, {Envelope::gaussian, 1.2, {0.3, -0.2}, {1.0, 2.0}});
  const WavePacket shifted = translation_evolve(psi, {1.0, 0.0}, 5 * g.dx()).in(Representation::position);
  const WavePacket orig = psi.in(Representation::position);
  double err = 0.0;
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j)
      err = std::max(err, std::abs(std::abs(shifted[g.index((i + 5) % g.n(), j)]) - std::abs(orig[g.index(i, j)])));
  CHECK(err < 1e-12);

  const Vec2 omega = direction(0.77);
  const double r = 3.3;
  const WavePacket moved = translation_evolve(psi, omega, r).in(Representation::position);
  CHECK(std::abs(moved.norm() - 1.0) < 1e-12);
  const PacketSpec ref_spec{Envelope::gaussian, 1.2, Vec2{0.3, -0.2} + r * omega, {1.0, 2.0}};
  const WavePacket ref = make_packet(g, ref_spec).in(Representation::position);
  double dmod = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) dmod = std::max(dmod, std::abs(std::abs(moved[i]) - std::abs(ref[i])));
  CHECK(dmod < 1e-8);
}

TEST_CASE("line phase") {
  const Grid2D g(128, 40.0);
  const WavePacket psi = make_packet(g, {Envelope::gaussian, 0.6, {0.5, -0.3}, {}});
  const ScalarPotential v = ScalarPotential::gaussian(1.0, {0.3, 0.2}, 1.0);
  const Vec2 omega = direction(1.1);
  LineIntegralCache cache;
  CHECK(max_diff(line_phase_apply(psi, {}, omega, 16.0, -5.0, 5.0, cache), psi) < 1e-14);
  const WavePacket a = line_phase_apply(psi, v, omega, 16.0, -5.0, 5.0, cache).in(Representation::position);
  const WavePacket p = psi.in(Representation::position);
  double dmod = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) dmod = std::max(dmod, std::abs(std::abs(a[i]) - std::abs(p[i])));
  CHECK(dmod < 1e-12);

  // the generator omega.p + V / v, conjugated by the free translations, is the line phase
  const WavePacket gen = generator_evolve(psi, v, omega, 16.0, -6.0, 9.0, 0.004);
  const WavePacket phase = line_phase_apply(psi, v, omega, 16.0, -6.0, 9.0, cache);
  CHECK(oracle::l2_distance(gen, phase) <= 1e-6);
  CHECK_THROWS_AS(line_phase_apply(psi, ScalarPotential::coulomb(1.0, 1.0), omega, 16.0, -INFINITY, INFINITY, cache),
                  DivergentLineIntegral);
}

TEST_CASE("line integral cache under concurrent readers") {
  const Grid2D g(64, 20.0);
  const ScalarPotential v = ScalarPotential::gaussian(1.0, {}, 1.0);
  LineIntegralCache cache;
  std::vector<LineIntegralCache::Field> got(8);
  std::vector<std::thread> pool;
  for (int t = 0; t < 8; ++t)
    pool.emplace_back([&, t] { got[t] = cache.get(g, v, {1.0, 0.0}, -3.0, 4.0); });
  for (auto& th : pool) th.join();
  CHECK(cache.size() == 1);
  for (const auto& f : got) CHECK(*f == *got[0]);
  cache.clear();
  CHECK(cache.size() == 0);
}

TEST_CASE("Dollard evolution") {
  const Grid2D g(64, 32.0);
  const Dispersion nr{};
  const WavePacket psi = make_packet(g, {Envelope::bump, 2.0, {}, {1.0, 0.0}});
  const ScalarPotential coul = ScalarPotential::coulomb(0.8, 1.0);
  CHECK(max_diff(dollard_evolve(psi, nr, {}, -3.0), free_evolve(psi, nr, -3.0)) < 1e-12);
  const WavePacket d = dollard_evolve(psi, nr, coul, -3.0);
  CHECK(std::abs(d.norm() - 1.0) < 1e-12);
  CHECK(max_diff(energy_projection(dollard_evolve(psi, nr, coul, 2.0), nr, 1.0),
                 dollard_evolve(energy_projection(psi, nr, 1.0), nr, coul, 2.0)) < 1e-12);
  CHECK(max_diff(dollard_evolve_adjoint(d, nr, coul, -3.0), psi) < 1e-12);

  // the correction is the momentum-space phase exp(-i int_0^t V(s p / m) ds)
  const WavePacket ratio_ref = free_evolve(psi, nr, 2.5).in(Representation::momentum);
  const WavePacket with = dollard_evolve(psi, nr, coul, 2.5).in(Representation::momentum);
  double err = 0.0;
  for (int k = 0; k < g.n(); ++k)
    for (int l = 0; l < g.n(); ++l) {
      const std::size_t i = g.index(k, l);
      const double speed = norm(g.momentum(k, l));
      const double expected =
          speed > 0 ? oracle::coulomb_dollard(0.8, 1.0, speed, 0.0, 2.5) : 2.5 * coul({0.0, 0.0});
      err = std::max(err, std::abs(with[i] - ratio_ref[i] * std::polar(1.0, -expected)));
    }
  CHECK(err < 1e-9);
}

TEST_CASE("forbidden region mass") {
  const Grid2D g(256, 100.0);
  const WavePacket phi = make_packet(g, {Envelope::bump, 2.0, {}, {}});
  const Dispersion nr{};
  const double pbar = 16.0;
  std::vector<double> times{0.0};
  for (double s : {4.0, 8.0, 16.0, 32.0}) times.push_back(s / pbar);
  const auto m = forbidden_region_mass(phi, nr, {pbar, 0.0}, times);
  CHECK(m[0].mass == 0.0);
  for (std::size_t i = 2; i < m.size(); ++i) CHECK(m[i].mass < m[i - 1].mass);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 1; i < m.size(); ++i) pts.emplace_back(m[i].t * pbar, m[i].mass);
  CHECK(oracle::loglog_slope(pts) <= -2.0);

  // the moving-frame computation agrees with a lab-frame one where both fit
  const Grid2D lab(256, 64.0);
  const WavePacket centred = make_packet(lab, {Envelope::bump, 2.0, {}, {}});
  const WavePacket boosted = make_packet(lab, {Envelope::bump, 2.0, {}, {6.0, 0.0}});
  const std::vector<double> ts{0.5, 1.0, 2.0};
  const auto a = forbidden_region_mass(centred, nr, {6.0, 0.0}, ts);
  const auto b = forbidden_region_mass_lab(boosted, nr, {6.0, 0.0}, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(a[i].mass == doctest::Approx(b[i].mass).epsilon(1e-6));
}
