#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "radma/model.hpp"

namespace radma {

/// Gamma(N) = 1/4 int_{1/4}^{3/4} ( int_{1/4}^s N tau^{N-1} dtau )^{1/N} ds.
///
/// The inner integral is evaluated in closed form without cancellation; the
/// outer one uses the substitution s - 1/4 = (1/2) y^N, which
/// removes the (s - 1/4)^{1/N} endpoint behaviour, and composite Simpson
/// with 10^4 panels.
double gamma(int N);

enum class LimitKind { zero, finite, infinite, undetermined };
enum class LimitEnd { zero, infinity };

const char* to_string(LimitKind kind);

/// Classification of lim f(v)/|v|^N at one end.
struct LimitClass {
  LimitKind kind = LimitKind::undetermined;
  /// Limit value when finite; for direction-dependent results, the largest
  /// finite directional value.
  double value = 0.0;
  /// The directional estimates disagree; `kind` then reports the largest
  /// directional class (the limsup seen by the envelope).
  bool direction_dependent = false;
  /// Classified from a power-law trend rather than the 1e-6 / 1e6 thresholds.
  bool from_trend = false;
  std::vector<LimitKind> per_direction;

  /// Kind usable for regime decisions: undetermined when direction dependent.
  LimitKind decisive() const noexcept { return direction_dependent ? LimitKind::undetermined : kind; }
};

/// Classifies a sequence of ratios sampled at radii approaching the limit
/// (one value per decade). Rules, applied to the last four values:
///   zero      last < 1e-6 and nonincreasing;
///   infinite  last > 1e6 and nondecreasing;
///   finite    relative spread <= 1e-3 (value = last);
///   zero/inf  consistent power-law trend (same-signed log-slopes with
///             |slope| >= 0.05 per decade, max/min slope <= 2);
///   otherwise undetermined.
LimitClass classify_ratios(std::span<const double> ratios);

/// Ratios f(r d)/r^N along coordinate directions and the uniform direction,
/// r = 10^{-k} (zero) or 10^{k} (infinity), k = 1..8.
LimitClass limit_estimate(const Expr& f, LimitEnd which, int N, int n);

/// max { f(v) : v >= 0, |v|_1 <= t } by Halton sampling of the boundary
/// simplex and the ball, then pattern-search refinement. Sampled, not
/// certified. Returns +inf if f overflows.
double hat_envelope(const Expr& f, double t, int n);

/// hat_envelope on an increasing grid, made nondecreasing by a running max.
std::vector<double> hat_envelope_curve(const Expr& f, std::span<const double> ts, int n);

/// limit_estimate applied to the scalar ratio hat_f(t)/t^N.
LimitClass envelope_limit_estimate(const Expr& f, LimitEnd which, int N, int n);

struct WeakBounds {
  /// min f^i over r/4 <= |v| <= r, all i.
  double m_hat = 0.0;
  /// max f^i over |v| <= r, all i.
  double M_hat = 0.0;
  /// m_hat <= 0: f vanishes somewhere on the annulus.
  bool h2_violation = false;
};

WeakBounds weak_bounds(const ProblemSpec& spec, double r);

/// Sum classification of per-component limits.
LimitKind sum_kind(std::span<const LimitClass> parts);

struct Threshold {
  enum class Meaning { existence_above, existence_below, nonexistence_below, nonexistence_above };
  /// Regime label: "2a", "2b", "2e" or "2f".
  std::string part;
  Meaning meaning = Meaning::existence_above;
  bool emitted = false;
  double value = 0.0;
  std::string reason;
};

struct BoundsReport {
  ProblemSpec spec;
  double r_ref = 1.0;
  double gamma = 0.0;
  std::vector<LimitClass> f0;
  std::vector<LimitClass> finf;
  LimitKind f0_sum = LimitKind::undetermined;
  LimitKind finf_sum = LimitKind::undetermined;
  bool h2_evidence = false;
  /// Sampled sup of f^i / |v|^N, inflated 5%; NaN when not applicable.
  double epsilon = 0.0;
  /// Sampled eta_3 of the large-lambda nonexistence argument, deflated 5%;
  /// NaN when not applicable.
  double eta3 = 0.0;
  /// Radius r_1 chosen for eta3.
  double eta3_radius = 0.0;
  WeakBounds ref_bounds;
  std::vector<Threshold> thresholds;

  WeakBounds bounds_at(double r) const { return weak_bounds(spec, r); }
  double m_hat(double r) const { return bounds_at(r).m_hat; }
  double M_hat(double r) const { return bounds_at(r).M_hat; }
};

/// Computes Gamma, limit classes, eps/eta3 certificates and lambda0 values.
/// All certificates are sampled stand-ins, not rigorous bounds.
BoundsReport build_bounds_report(const ProblemSpec& spec, double r_ref = 1.0);

/// lambda0 for parts (a), (b), (e), (f); inapplicable parts are returned
/// with emitted = false and the unmet hypothesis in `reason`.
std::vector<Threshold> lambda0_thresholds(const ProblemSpec& spec, const BoundsReport& report, double r_ref);

enum class RegimeStatus { holds, undetermined };

struct Regime {
  std::string label;
  std::string prediction;
  RegimeStatus status = RegimeStatus::holds;
  std::string note;
};

struct ClassifyReport {
  BoundsReport bounds;
  /// Regimes whose hypotheses hold (or cannot be decided).
  std::vector<Regime> regimes;

  bool has(const std::string& label) const;
};

ClassifyReport classify(const ProblemSpec& spec, double r_ref = 1.0);

/// Flat key=value serialisation.
void write_bounds_report(std::ostream& os, const BoundsReport& report);
void write_classify_report(std::ostream& os, const ClassifyReport& report);

}  // namespace radma
