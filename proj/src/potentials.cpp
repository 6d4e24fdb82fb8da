#include "hesc/potentials.hpp"

#include "hesc/error.hpp"
#include "hesc/quadrature.hpp"
#include "hesc/text.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace hesc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Vec2 term_center(const PotentialTerm& t) {
  return std::visit([](const auto& s) { return s.center; }, t.shape);
}

double term_value(const PotentialTerm& t, Vec2 x) {
  return std::visit(
      overloaded{
          [&](const GaussianTerm& g) {
            return g.amplitude * std::exp(-norm2(x - g.center) / (2.0 * g.sigma * g.sigma));
          },
          [&](const YukawaTerm& y) {
            const double r2 = norm2(x - y.center);
            return y.charge * std::exp(-y.mu * std::sqrt(r2)) / std::sqrt(r2 + y.core * y.core);
          },
          [&](const CoulombTerm& c) { return c.charge / std::sqrt(norm2(x - c.center) + c.core * c.core); },
      },
      t.shape);
}

Vec2 term_gradient(const PotentialTerm& t, Vec2 x) {
  return std::visit(
      overloaded{
          [&](const GaussianTerm& g) {
            const Vec2 d = x - g.center;
            const double s2 = g.sigma * g.sigma;
            return d * (-g.amplitude * std::exp(-norm2(d) / (2.0 * s2)) / s2);
          },
          [&](const YukawaTerm& y) {
            const Vec2 d = x - y.center;
            const double rho = norm(d);
            if (rho == 0.0) return Vec2{};
            const double q = rho * rho + y.core * y.core;
            const double h = y.charge * std::exp(-y.mu * rho) / std::sqrt(q);
            const double dh = h * (-y.mu - rho / q);
            return d * (dh / rho);
          },
          [&](const CoulombTerm& c) {
            const Vec2 d = x - c.center;
            const double q = norm2(d) + c.core * c.core;
            return d * (-c.charge / (q * std::sqrt(q)));
          },
      },
      t.shape);
}

double term_laplacian(const PotentialTerm& t, Vec2 x) {
  return std::visit(
      overloaded{
          [&](const GaussianTerm& g) {
            const double r2 = norm2(x - g.center);
            const double s2 = g.sigma * g.sigma;
            return (r2 / (s2 * s2) - 2.0 / s2) * g.amplitude * std::exp(-r2 / (2.0 * s2));
          },
          [&](const YukawaTerm& y) {
            const double rho = std::max(norm(x - y.center), 1e-12);
            const double f = 1.0 / std::sqrt(rho * rho + y.core * y.core);
            const double f3 = f * f * f;
            const double g = std::exp(-y.mu * rho);
            const double mu = y.mu;
            return y.charge * g *
                   (mu * mu * f + 2.0 * mu * rho * f3 - 2.0 * f3 + 3.0 * rho * rho * f3 * f * f - mu * f / rho);
          },
          [&](const CoulombTerm& c) {
            const double r2 = norm2(x - c.center);
            const double b2 = c.core * c.core;
            const double q = r2 + b2;
            return c.charge * (r2 - 2.0 * b2) / (q * q * std::sqrt(q));
          },
      },
      t.shape);
}

// Half-width beyond which a term's line profile is negligible (< 1e-14 in
// absolute integral); infinite for Coulomb tails.
double term_reach(const PotentialTerm& t) {
  return std::visit(overloaded{
                        [](const GaussianTerm& g) { return g.sigma * std::sqrt(90.0); },
                        [](const YukawaTerm& y) {
                          const double scale = std::max(std::abs(y.charge), 1e-300) / y.mu;
                          const double reach = (std::log(scale) + 14.0 * std::numbers::ln10) / y.mu;
                          return std::max({reach, 10.0 * y.core, 1.0 / y.mu});
                        },
                        [](const CoulombTerm&) { return kInf; },
                    },
                    t.shape);
}

bool term_line_integrable(const PotentialTerm& t) { return !std::holds_alternative<CoulombTerm>(t.shape); }

// int_{r1}^{r2} f(r) dr for a profile peaked at rc, split at the peak.
template <class F>
double integrate_split(F&& f, double r1, double r2, double rc) {
  if (r2 <= r1) return 0.0;
  if (rc > r1 && rc < r2) return quadrature::integrate(f, r1, rc) + quadrature::integrate(f, rc, r2);
  return quadrature::integrate(f, r1, r2);
}

double term_line_integral(const PotentialTerm& t, Vec2 omega, Vec2 x, double r1, double r2) {
  if (r2 < r1) return -term_line_integral(t, omega, x, r2, r1);
  const double rc = dot(term_center(t) - x, omega);
  const double reach = term_reach(t);
  const double lo = std::max(r1, rc - reach);
  const double hi = std::min(r2, rc + reach);
  auto f = [&](double r) { return term_value(t, x + omega * r); };
  return integrate_split(f, lo, hi, rc);
}

template <class F>
double apply_part(const std::vector<PotentialTerm>& terms, RangePart part, F&& keep) {
  double sum = 0.0;
  for (const auto& t : terms)
    if (t.part == part) sum += keep(t);
  return sum;
}

}  // namespace

ScalarPotential::ScalarPotential(std::vector<PotentialTerm> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    std::visit(overloaded{
                   [](const GaussianTerm& g) {
                     if (!(g.sigma > 0.0)) throw InvalidArgument("gaussian sigma must be positive");
                   },
                   [](const YukawaTerm& y) {
                     if (!(y.mu > 0.0) || !(y.core > 0.0))
                       throw InvalidArgument("yukawa mu and core must be positive");
                   },
                   [](const CoulombTerm& c) {
                     if (!(c.core > 0.0)) throw InvalidArgument("coulomb core must be positive");
                   },
               },
               t.shape);
  }
}

ScalarPotential ScalarPotential::gaussian(double amplitude, Vec2 center, double sigma) {
  return ScalarPotential({PotentialTerm{GaussianTerm{amplitude, center, sigma}, RangePart::short_range}});
}
ScalarPotential ScalarPotential::yukawa(double charge, double mu, double core, Vec2 center) {
  return ScalarPotential({PotentialTerm{YukawaTerm{charge, mu, core, center}, RangePart::short_range}});
}
ScalarPotential ScalarPotential::coulomb(double charge, double core, Vec2 center) {
  return ScalarPotential({PotentialTerm{CoulombTerm{charge, core, center}, RangePart::long_range}});
}

double ScalarPotential::value(Vec2 x) const {
  double sum = 0.0;
  for (const auto& t : terms_) sum += term_value(t, x);
  return sum;
}

Vec2 ScalarPotential::gradient(Vec2 x) const {
  Vec2 sum;
  for (const auto& t : terms_) sum += term_gradient(t, x);
  return sum;
}

double ScalarPotential::laplacian(Vec2 x) const {
  double sum = 0.0;
  for (const auto& t : terms_) sum += term_laplacian(t, x);
  return sum;
}

ScalarPotential ScalarPotential::short_part() const {
  std::vector<PotentialTerm> out;
  for (const auto& t : terms_)
    if (t.part == RangePart::short_range) out.push_back(t);
  return ScalarPotential(std::move(out));
}

ScalarPotential ScalarPotential::long_part() const {
  std::vector<PotentialTerm> out;
  for (const auto& t : terms_)
    if (t.part == RangePart::long_range) out.push_back(t);
  return ScalarPotential(std::move(out));
}

ScalarPotential ScalarPotential::translated(Vec2 shift) const {
  std::vector<PotentialTerm> out = terms_;
  for (auto& t : out) std::visit([&](auto& s) { s.center += shift; }, t.shape);
  return ScalarPotential(std::move(out));
}

ScalarPotential ScalarPotential::rotated(double angle) const {
  const double c = std::cos(angle), s = std::sin(angle);
  std::vector<PotentialTerm> out = terms_;
  for (auto& t : out)
    std::visit([&](auto& sh) { sh.center = Vec2{c * sh.center.x - s * sh.center.y, s * sh.center.x + c * sh.center.y}; },
               t.shape);
  return ScalarPotential(std::move(out));
}

ScalarPotential ScalarPotential::scaled(double factor) const {
  std::vector<PotentialTerm> out = terms_;
  for (auto& t : out)
    std::visit(overloaded{
                   [&](GaussianTerm& g) { g.amplitude *= factor; },
                   [&](YukawaTerm& y) { y.charge *= factor; },
                   [&](CoulombTerm& c) { c.charge *= factor; },
               },
               t.shape);
  return ScalarPotential(std::move(out));
}

ScalarPotential ScalarPotential::with_part(RangePart part) const {
  std::vector<PotentialTerm> out = terms_;
  for (auto& t : out) t.part = part;
  return ScalarPotential(std::move(out));
}

bool ScalarPotential::line_integrable() const {
  return std::all_of(terms_.begin(), terms_.end(), term_line_integrable);
}

double ScalarPotential::sup_bound() const {
  double sum = 0.0;
  for (const auto& t : terms_)
    sum += std::visit(overloaded{
                          [](const GaussianTerm& g) { return std::abs(g.amplitude); },
                          [](const YukawaTerm& y) { return std::abs(y.charge) / y.core; },
                          [](const CoulombTerm& c) { return std::abs(c.charge) / c.core; },
                      },
                      t.shape);
  return sum;
}

ScalarPotential operator+(const ScalarPotential& a, const ScalarPotential& b) {
  std::vector<PotentialTerm> out = a.terms_;
  out.insert(out.end(), b.terms_.begin(), b.terms_.end());
  return ScalarPotential(std::move(out));
}

std::string describe(const PotentialTerm& term) {
  using text::format_number;
  const std::string part = term.part == RangePart::short_range ? "short" : "long";
  return std::visit(
      overloaded{
          [&](const GaussianTerm& g) {
            return "gaussian amplitude=" + format_number(g.amplitude) + " cx=" + format_number(g.center.x) +
                   " cy=" + format_number(g.center.y) + " sigma=" + format_number(g.sigma) + " part=" + part;
          },
          [&](const YukawaTerm& y) {
            return "yukawa charge=" + format_number(y.charge) + " mu=" + format_number(y.mu) +
                   " core=" + format_number(y.core) + " cx=" + format_number(y.center.x) +
                   " cy=" + format_number(y.center.y) + " part=" + part;
          },
          [&](const CoulombTerm& c) {
            return "coulomb charge=" + format_number(c.charge) + " core=" + format_number(c.core) +
                   " cx=" + format_number(c.center.x) + " cy=" + format_number(c.center.y) + " part=" + part;
          },
      },
      term.shape);
}

std::string describe(const ScalarPotential& potential) {
  std::string out;
  for (const auto& t : potential.terms()) {
    if (!out.empty()) out += "; ";
    out += describe(t);
  }
  return out;
}

PotentialTerm parse_term(std::string_view line) {
  const auto words = text::split_whitespace(line);
  if (words.empty()) throw ConfigError("empty potential term");
  const std::string kind(words[0]);
  std::map<std::string, double, std::less<>> values;
  std::string part_text;
  for (std::size_t i = 1; i < words.size(); ++i) {
    const auto eq = words[i].find('=');
    if (eq == std::string_view::npos) throw ConfigError("malformed term field '" + std::string(words[i]) + "'");
    const std::string key(words[i].substr(0, eq));
    const auto value = words[i].substr(eq + 1);
    if (key == "part") {
      part_text = std::string(value);
      continue;
    }
    const auto parsed = text::parse_double(value);
    if (!parsed) throw ConfigError("term field '" + key + "' is not a number");
    values[key] = *parsed;
  }

  auto take = [&](const std::string& key, double fallback) {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    const double v = it->second;
    values.erase(it);
    return v;
  };

  PotentialTerm term;
  if (kind == "gaussian") {
    GaussianTerm g{take("amplitude", 1.0), {take("cx", 0.0), take("cy", 0.0)}, take("sigma", 1.0)};
    if (!(g.sigma > 0.0)) throw ConfigError("sigma must be positive");
    term = {g, RangePart::short_range};
  } else if (kind == "yukawa") {
    YukawaTerm y;
    y.charge = take("charge", 1.0);
    y.mu = take("mu", 1.0);
    y.core = take("core", 0.1);
    y.center = {take("cx", 0.0), take("cy", 0.0)};
    if (!(y.mu > 0.0) || !(y.core > 0.0)) throw ConfigError("mu and core must be positive");
    term = {y, RangePart::short_range};
  } else if (kind == "coulomb") {
    CoulombTerm c;
    c.charge = take("charge", 1.0);
    c.core = take("core", 1.0);
    c.center = {take("cx", 0.0), take("cy", 0.0)};
    if (!(c.core > 0.0)) throw ConfigError("core must be positive");
    term = {c, RangePart::long_range};
  } else {
    throw ConfigError("unknown potential term '" + kind + "'");
  }
  if (!values.empty()) throw ConfigError("unknown term field '" + values.begin()->first + "'");
  if (part_text == "short")
    term.part = RangePart::short_range;
  else if (part_text == "long")
    term.part = RangePart::long_range;
  else if (!part_text.empty())
    throw ConfigError("part must be short or long, got '" + part_text + "'");
  return term;
}

Vec2 VectorPotential::value(Vec2 x) const { return Vec2{a1.value(x), a2.value(x)} + gauge.gradient(x); }

double eval_potential(const ScalarPotential& potential, Vec2 x) { return potential.value(x); }

namespace {

// Least-squares slope of log y against log x over positive samples; -inf when
// the samples underflow (faster than any power).
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(ys[i] > 0.0)) continue;
    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    ++count;
  }
  if (count < static_cast<int>(xs.size()) || count < 2) return -kInf;
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

}  // namespace

ClassifyReport classify_potential(const ScalarPotential& potential, double r_max) {
  ClassifyReport report;
  if (potential.empty()) {
    report.is_short = true;
    report.long_ok = true;
    report.tail_exponent = report.gradient_exponent = report.laplacian_exponent = -kInf;
    return report;
  }

  std::vector<double> angles;
  constexpr int kAngles = 256;
  for (int k = 0; k < kAngles; ++k) angles.push_back(2.0 * std::numbers::pi * k / kAngles);
  for (const auto& t : potential.terms()) {
    const Vec2 c = term_center(t);
    if (norm(c) > 0.0) {
      const double a = std::atan2(c.y, c.x);
      angles.push_back(a);
      angles.push_back(a + std::numbers::pi);
    }
  }

  constexpr int kPerDecade = 60;
  const double r_min = 1e-3;
  const int count = static_cast<int>(std::ceil(std::log10(r_max / r_min) * kPerDecade));
  std::vector<double> radii{0.0};
  for (int i = 0; i <= count; ++i) radii.push_back(r_min * std::pow(r_max / r_min, double(i) / count));

  const std::size_t m = radii.size();
  std::vector<double> shell(m), grad(m), lap(m);
  for (std::size_t i = 0; i < m; ++i) {
    double sv = 0, sg = 0, sl = 0;
    for (double a : angles) {
      const Vec2 x = radii[i] * direction(a);
      sv = std::max(sv, std::abs(potential.value(x)));
      sg = std::max(sg, norm(potential.gradient(x)));
      sl = std::max(sl, std::abs(potential.laplacian(x)));
    }
    shell[i] = sv; grad[i] = sg; lap[i] = sl;
  }
  // sup over |x| >= R: running maximum from the outside in.
  std::vector<double> sup(m);
  double running = 0.0;
  for (std::size_t i = m; i-- > 0;) {
    running = std::max(running, shell[i]);
    sup[i] = running;
  }

  std::vector<double> cumulative(m, 0.0);
  for (std::size_t i = 1; i < m; ++i)
    cumulative[i] = cumulative[i - 1] + 0.5 * (sup[i] + sup[i - 1]) * (radii[i] - radii[i - 1]);
  report.truncated_integral = cumulative.back();

  std::vector<double> xs, ys, gs, ls;
  for (std::size_t i = 0; i < m; ++i) {
    if (radii[i] >= r_max / 10.0 * (1.0 - 1e-12)) {
      xs.push_back(radii[i]);
      ys.push_back(sup[i]);
      gs.push_back(grad[i]);
      ls.push_back(lap[i]);
    }
  }
  report.tail_exponent = loglog_slope(xs, ys);
  report.gradient_exponent = loglog_slope(xs, gs);
  report.laplacian_exponent = loglog_slope(xs, ls);

  report.is_short = report.tail_exponent < -1.0;
  if (report.is_short) {
    const double tail = std::isinf(report.tail_exponent)
                            ? 0.0
                            : sup.back() * r_max / (-report.tail_exponent - 1.0);
    report.short_range_integral = report.truncated_integral + tail;
  } else {
    report.short_range_integral = kInf;
  }
  report.long_ok = report.gradient_exponent < -1.5 && report.laplacian_exponent < -2.0;

  const double total = report.is_short ? report.short_range_integral : report.truncated_integral;
  report.r99 = r_max;
  for (std::size_t i = 1; i < m; ++i) {
    if (cumulative[i] >= 0.99 * total) {
      // linear interpolation inside the crossing interval
      const double need = 0.99 * total - cumulative[i - 1];
      const double step = cumulative[i] - cumulative[i - 1];
      const double frac = step > 0.0 ? need / step : 1.0;
      report.r99 = radii[i - 1] + frac * (radii[i] - radii[i - 1]);
      break;
    }
  }
  return report;
}

double line_integral(const ScalarPotential& potential, Vec2 omega, Vec2 x, double r1, double r2) {
  double sum = 0.0;
  for (const auto& t : potential.terms()) sum += term_line_integral(t, omega, x, r1, r2);
  return sum;
}

double xray_oracle(const ScalarPotential& potential, Vec2 omega, Vec2 x) {
  if (!potential.line_integrable())
    throw DivergentLineIntegral("line integral of a Coulomb-tailed term diverges");
  return line_integral(potential, omega, x, -kInf, kInf);
}

double xray_difference(const ScalarPotential& potential, Vec2 omega, Vec2 x) {
  double sum = 0.0;
  for (const auto& t : potential.terms()) {
    if (term_line_integrable(t)) {
      sum += term_line_integral(t, omega, x, -kInf, kInf) - term_line_integral(t, omega, Vec2{}, -kInf, kInf);
      continue;
    }
    const auto& c = std::get<CoulombTerm>(t.shape);
    auto diff = [&](double r) { return term_value(t, x + omega * r) - term_value(t, omega * r); };
    const double cut = 4.0 * (norm(x) + norm(c.center) + c.core) + 10.0;
    const double inner = quadrature::integrate(diff, -cut, cut, 1e-13);
    const double tails = quadrature::integrate(diff, cut, kInf, 1e-13) + quadrature::integrate(diff, -kInf, -cut, 1e-13);
    if (!std::isfinite(inner + tails))
      throw DivergentLineIntegral("difference integral did not converge");
    sum += inner + tails;
  }
  return sum;
}

double vector_line_integral(const VectorPotential& a, Vec2 omega, Vec2 x) {
  if (!a.a1.line_integrable() || !a.a2.line_integrable() || !a.gauge.line_integrable())
    throw DivergentLineIntegral("vector potential components must be short-range");
  double sum = omega.x * xray_oracle(a.a1, omega, x) + omega.y * xray_oracle(a.a2, omega, x);
  for (const auto& t : a.gauge.terms()) {
    const double rc = dot(term_center(t) - x, omega);
    const double reach = term_reach(t);
    auto f = [&](double r) { return dot(omega, term_gradient(t, x + omega * r)); };
    sum += integrate_split(f, rc - reach, rc + reach, rc);
  }
  return sum;
}

double dollard_phase(const ScalarPotential& vl, Vec2 p, double mass, double t1, double t2) {
  if (vl.empty() || t1 == t2) return 0.0;
  const double speed = norm(p) / mass;
  if (speed == 0.0) return (t2 - t1) * vl.value(Vec2{});
  const Vec2 dir = p * (1.0 / norm(p));
  // t p / m = (speed t) dir: a line integral through the origin in r = speed t.
  return line_integral(vl, dir, Vec2{}, speed * t1, speed * t2) / speed;
}

}  // namespace hesc
