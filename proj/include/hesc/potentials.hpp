#pragma once

#include "hesc/vec2.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hesc {

/// amplitude * exp(-|x - center|^2 / (2 sigma^2))
struct GaussianTerm {
  double amplitude = 1.0;
  Vec2 center;
  double sigma = 1.0;
  friend bool operator==(const GaussianTerm&, const GaussianTerm&) = default;
};

/// charge * exp(-mu |x - center|) / sqrt(|x - center|^2 + core^2)
struct YukawaTerm {
  double charge = 1.0;
  double mu = 1.0;
  double core = 0.1;
  Vec2 center;
  friend bool operator==(const YukawaTerm&, const YukawaTerm&) = default;
};

/// charge / sqrt(|x - center|^2 + core^2)
struct CoulombTerm {
  double charge = 1.0;
  double core = 1.0;
  Vec2 center;
  friend bool operator==(const CoulombTerm&, const CoulombTerm&) = default;
};

enum class RangePart { short_range, long_range };

struct PotentialTerm {
  std::variant<GaussianTerm, YukawaTerm, CoulombTerm> shape;
  RangePart part = RangePart::short_range;
  friend bool operator==(const PotentialTerm&, const PotentialTerm&) = default;
};

/// Sum of analytic terms, each tagged as belonging to the short-range part
/// V^s or the long-range part V^l of the declared split V = V^s + V^l.
class ScalarPotential {
 public:
  ScalarPotential() = default;
  explicit ScalarPotential(std::vector<PotentialTerm> terms);

  static ScalarPotential gaussian(double amplitude, Vec2 center, double sigma);
  static ScalarPotential yukawa(double charge, double mu, double core, Vec2 center = {});
  static ScalarPotential coulomb(double charge, double core, Vec2 center = {});

  const std::vector<PotentialTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  double value(Vec2 x) const;
  double operator()(Vec2 x) const { return value(x); }
  Vec2 gradient(Vec2 x) const;
  double laplacian(Vec2 x) const;

  ScalarPotential short_part() const;
  ScalarPotential long_part() const;
  ScalarPotential translated(Vec2 shift) const;
  ScalarPotential rotated(double angle) const;
  ScalarPotential scaled(double factor) const;
  ScalarPotential with_part(RangePart part) const;

  /// True when every term has an integrable line profile (no Coulomb tail).
  bool line_integrable() const;
  /// Upper bound on sup |V|.
  double sup_bound() const;

  friend ScalarPotential operator+(const ScalarPotential& a, const ScalarPotential& b);
  friend bool operator==(const ScalarPotential&, const ScalarPotential&) = default;

 private:
  std::vector<PotentialTerm> terms_;
};

/// Canonical one-line text of a term, as used by configuration files:
///   gaussian amplitude=<A> cx=<x> cy=<y> sigma=<s> part=<short|long>
///   yukawa charge=<q> mu=<mu> core=<b> cx=.. cy=.. part=..
///   coulomb charge=<q> core=<b> cx=.. cy=.. part=..
std::string describe(const PotentialTerm& term);
PotentialTerm parse_term(std::string_view text);
std::string describe(const ScalarPotential& potential);

/// A = (A1, A2) + grad chi.
struct VectorPotential {
  ScalarPotential a1;
  ScalarPotential a2;
  ScalarPotential gauge;  // chi; contributes its gradient

  Vec2 value(Vec2 x) const;
};

struct ClassifyReport {
  double short_range_integral = 0.0;  // int_0^inf sup_{|x|>=R} |V| dR, +inf when divergent
  double truncated_integral = 0.0;    // same integral cut at r_max
  double tail_exponent = 0.0;         // fitted decay of sup|V| over the last decade
  bool is_short = false;
  bool long_ok = false;               // derivative-decay bounds of the long-range class
  double gradient_exponent = 0.0;
  double laplacian_exponent = 0.0;
  double r99 = 0.0;                   // radius holding 99% of the (truncated) integral
};

/// Numeric probe: sup|V| on logarithmically spaced shells up to r_max, power
/// law fits over the last decade for the tail and for |grad V|, |lap V|.
ClassifyReport classify_potential(const ScalarPotential& potential, double r_max = 1e4);

double eval_potential(const ScalarPotential& potential, Vec2 x);

/// int_{r1}^{r2} V(x + omega r) dr.
double line_integral(const ScalarPotential& potential, Vec2 omega, Vec2 x, double r1, double r2);

/// X-ray transform W(x, omega) = int V(x + omega r) dr over the whole line.
/// Throws DivergentLineIntegral when a term is not integrable along lines.
double xray_oracle(const ScalarPotential& potential, Vec2 omega, Vec2 x);

/// int [V(x + omega r) - V(omega r)] dr, finite for the long-range class.
double xray_difference(const ScalarPotential& potential, Vec2 omega, Vec2 x);

/// int omega . A(x + omega r) dr.
double vector_line_integral(const VectorPotential& a, Vec2 omega, Vec2 x);

/// int_{t1}^{t2} V(t p / m) dt.
double dollard_phase(const ScalarPotential& vl, Vec2 p, double mass, double t1, double t2);

}  // namespace hesc
