#include "hesc/error.hpp"
#include "hesc/grid.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>

using namespace hesc;

namespace {

double max_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("grid spacing and axes") {
  const Grid2D g(64, 20.0);
  CHECK(g.dx() * g.dp() == doctest::Approx(2.0 * std::numbers::pi / 64).epsilon(1e-15));
  CHECK(g.x(0) == -10.0);
  CHECK(g.p(0) == 0.0);
  CHECK(g.p(32) == doctest::Approx(-g.nyquist()));
  for (int k = 1; k < 32; ++k) CHECK(g.p(k) == -g.p(64 - k));
  CHECK_THROWS(Grid2D(48, 10.0));
}

TEST_CASE("unit Gaussian is its own transform") {
  const Grid2D g(64, 20.0);
  std::vector<cplx> pos(g.size());
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j)
      pos[g.index(i, j)] = std::exp(-0.5 * norm2(g.position(i, j))) / std::sqrt(std::numbers::pi);
  const WavePacket psi(g, Representation::position, pos);
  const WavePacket hat = fourier_transform(psi, FourierDirection::forward);
  REQUIRE(hat.representation() == Representation::momentum);
  double err = 0.0;
  for (int k = 0; k < g.n(); ++k)
    for (int l = 0; l < g.n(); ++l)
      err = std::max(err, std::abs(hat[g.index(k, l)] -
                                   std::exp(-0.5 * norm2(g.momentum(k, l))) / std::sqrt(std::numbers::pi)));
  CHECK(err < 1e-8);
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("round trip and Parseval over random packets") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Grid2D g(64, 16.0);
  for (int trial = 0; trial < 100; ++trial) {
    PacketSpec spec;
    spec.envelope = trial % 2 ? Envelope::gaussian : Envelope::bump;
    spec.width = spec.envelope == Envelope::gaussian ? 0.3 + 0.3 * (u(rng) + 1.0) : 0.5 + (u(rng) + 1.0);
    spec.center = {3.0 * u(rng), 3.0 * u(rng)};
    spec.boost = {2.0 * u(rng), 2.0 * u(rng)};
    const WavePacket psi = make_packet(g, spec).in(Representation::position);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-10));
    const WavePacket hat = fourier_transform(psi, FourierDirection::forward);
    CHECK(std::abs(hat.norm() - psi.norm()) < 1e-12);
    const WavePacket back = fourier_transform(hat, FourierDirection::inverse);
    CHECK(max_diff(back.samples(), psi.samples()) < 1e-12);
  }
}

TEST_CASE("boost shifts the momentum density and leaves |phi| alone") {
  const Grid2D g(256, 32.0);
  const PacketSpec rest{Envelope::bump, 1.0, {0.5, -0.25}, {}};
  PacketSpec moving = rest;
  moving.boost = {40 * g.dp(), 0.0};
  const WavePacket a = make_packet(g, rest);
  const WavePacket b = make_packet(g, moving);
  const auto am = a.in(Representation::momentum);
  const auto bm = b.in(Representation::momentum);
  double err = 0.0;
  for (int k = 0; k < g.n(); ++k)
    for (int l = 0; l < g.n(); ++l)
      err = std::max(err, std::abs(std::norm(bm[g.index((k + 40) % g.n(), l)]) - std::norm(am[g.index(k, l)])));
  CHECK(err < 1e-12);

  // periodic images carry exp(i pbar L); L = 10 pi makes that phase trivial for pbar = 10
  const Grid2D h(256, 10.0 * std::numbers::pi);
  PacketSpec ten = rest;
  ten.boost = {10.0, 0.0};
  const auto ap = make_packet(h, rest).in(Representation::position);
  const auto tp = make_packet(h, ten).in(Representation::position);
  double dmod = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) dmod = std::max(dmod, std::abs(std::abs(ap[i]) - std::abs(tp[i])));
  CHECK(dmod < 1e-12);
  CHECK(probability_mass(make_packet(h, ten), HalfPlane{{9.0, 0.0}, {1.0, 0.0}}, Representation::momentum) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Nyquist gate") {
  const Grid2D g(64, 32.0);  // Nyquist 2 pi
  CHECK_THROWS_AS(make_packet(g, {Envelope::bump, 1.0, {}, {5.0, 0.0}}), NyquistViolation);
  CHECK_NOTHROW(make_packet(g, {Envelope::bump, 1.0, {}, {3.0, 0.0}}));
  CHECK_THROWS_AS(make_packet(g, {Envelope::gaussian, 1.0, {}, {}}), NyquistViolation);
}

TEST_CASE("probability mass") {
  const Grid2D g(128, 32.0);
  const WavePacket psi = make_packet(g, {Envelope::gaussian, 0.8, {}, {}});
  CHECK(probability_mass(psi, HalfPlane{{-100.0, 0.0}, {1.0, 0.0}}, Representation::position) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(probability_mass(psi, HalfPlane{{0.0, 0.0}, {1.0, 0.0}}, Representation::position) - 0.5) < 1e-6);
  CHECK(std::abs(probability_mass(psi, HalfPlane{{0.0, 0.0}, {0.0, -1.0}}, Representation::momentum) - 0.5) <
        1e-6);
  CHECK(probability_mass(psi, Ball{{}, 0.0}, Representation::position) == 0.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec2 c{u(rng), u(rng)};
    const double r = 1.0 + std::abs(u(rng));
    for (auto space : {Representation::position, Representation::momentum}) {
      const double in = probability_mass(psi, Ball{c, r}, space);
      const double out = probability_mass(psi, ComplementBall{c, r}, space);
      CHECK(std::abs(in + out - 1.0) < 1e-12);
      const Vec2 nrm = direction(u(rng));
      CHECK(std::abs(probability_mass(psi, HalfPlane{c, nrm}, space) +
                     probability_mass(psi, HalfPlane{c, -nrm}, space) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("momentum support ratio") {
  const Dispersion nr{};
  const Dispersion rel{DispersionKind::relativistic, 1.0};
  const PacketSpec fast{Envelope::bump, 1.0, {}, {10.0, 0.0}};
  const auto a = momentum_support_ratio(fast, nr);
  CHECK(a.ratio == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(a.pass);
  const auto b = momentum_support_ratio(PacketSpec{Envelope::bump, 1.0, {}, {2.0, 0.0}}, nr);
  CHECK(b.ratio == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_FALSE(b.pass);
  CHECK(momentum_support_ratio(PacketSpec{Envelope::bump, 1.0, {}, {3.0, 0.0}}, nr).pass);

  const auto c = momentum_support_ratio(fast, rel);
  const double vbar = norm(rel.velocity({10.0, 0.0}));
  const double brute = oracle::disc_min([&](Vec2 p) { return norm(rel.velocity(p)) / vbar; }, {10.0, 0.0}, 1.0, 400);
  CHECK(std::abs(c.ratio - brute) < 1e-9);

  // grid version against a direct scan of the sampled support
  const Grid2D g(256, 40.0);
  const WavePacket psi = make_packet(g, fast);
  const auto grid_ratio = momentum_support_ratio(psi, rel, {10.0, 0.0});
  const auto mom = psi.in(Representation::momentum);
  double peak = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) peak = std::max(peak, std::norm(mom[i]));
  double lowest = INFINITY;
  for (int k = 0; k < g.n(); ++k)
    for (int l = 0; l < g.n(); ++l)
      if (std::norm(mom[g.index(k, l)]) > 1e-12 * peak)
        lowest = std::min(lowest, norm(rel.velocity(g.momentum(k, l))) / vbar);
  CHECK(std::abs(grid_ratio.ratio - lowest) < 1e-9);
  CHECK_THROWS_AS(momentum_support_ratio(psi, nr, {0.0, 0.0}), ZeroVelocity);
}

TEST_CASE("energy projection") {
  const Grid2D g(64, 32.0);
  const Dispersion nr{};
  const WavePacket psi = make_packet(g, {Envelope::bump, 1.5, {1.0, 0.0}, {1.0, 2.0}});
  CHECK(max_diff(energy_projection(psi, nr, 0.0).samples(), psi.samples()) < 1e-12);
  const double top = 2.0 * g.nyquist() * g.nyquist();
  CHECK(energy_projection(psi, nr, top).norm() == 0.0);
  const WavePacket once = energy_projection(psi, nr, 2.0);
  const WavePacket twice = energy_projection(once, nr, 2.0);
  CHECK(max_diff(once.samples(), twice.samples()) < 1e-12);

  auto multiplier = [](Vec2 p) { return std::polar(1.0 + 0.1 * p.x * p.x, 0.3 * p.y); };
  const WavePacket pm = energy_projection(apply_momentum_multiplier(psi, multiplier), nr, 2.0);
  const WavePacket mp = apply_momentum_multiplier(energy_projection(psi, nr, 2.0), multiplier);
  CHECK(max_diff(pm.samples(), mp.samples()) < 1e-12);
}

TEST_CASE("inner product") {
  const Grid2D g(64, 32.0);
  const WavePacket a = make_packet(g, {Envelope::gaussian, 0.7, {1.0, 0.5}, {0.5, 0.0}});
  const WavePacket b = make_packet(g, {Envelope::bump, 1.2, {-1.0, 0.0}, {0.0, 1.0}});
  CHECK(std::abs(inner_product(a, a) - 1.0) < 1e-10);
  CHECK(inner_product(a, b) == std::conj(inner_product(b, a)));
  CHECK(std::abs(inner_product(a, b)) <= a.norm() * b.norm());
  CHECK_THROWS_AS(inner_product(a, make_packet(Grid2D(32, 32.0), {Envelope::bump, 1.0, {}, {}})), GridMismatch);
}
