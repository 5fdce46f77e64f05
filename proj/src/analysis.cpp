#include "radma/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "radma/fixed_point_operator.hpp"

namespace radma {

double gamma(int N) {
  if (N < 1) throw std::invalid_argument("gamma: N must be >= 1");
  constexpr double a = 0.25;
  constexpr double b = 0.75;
  constexpr int panels = 10000;
  // int_a^s N tau^{N-1} dtau = s^N - a^N = (s - a) sum_j s^{N-1-j} a^j
  auto inner = [N](double s) {
    double sum = 0.0;
    for (int j = 0; j < N; ++j) sum += std::pow(s, N - 1 - j) * std::pow(a, j);
    return (s - a) * sum;
  };
  // s = a + (b - a) y^N, ds = (b - a) N y^{N-1} dy.
  auto integrand = [&](double y) {
    if (y == 0.0) return 0.0;
    double s = a + (b - a) * std::pow(y, N);
    double jac = (b - a) * N * std::pow(y, N - 1);
    return PowerMap{N}.inverse(std::max(inner(s), 0.0)) * jac;
  };
  const double hy = 1.0 / panels;
  double sum = integrand(0.0) + integrand(1.0);
  for (int k = 1; k < panels; ++k) sum += (k % 2 == 1 ? 4.0 : 2.0) * integrand(k * hy);
  return 0.25 * sum * hy / 3.0;
}

const char* to_string(LimitKind kind) {
  switch (kind) {
    case LimitKind::zero: return "zero";
    case LimitKind::finite: return "finite";
    case LimitKind::infinite: return "infinite";
    case LimitKind::undetermined: return "undetermined";
  }
  return "undetermined";
}

namespace {

using Point = std::vector<double>;

double eval_or_inf(const Expr& f, std::span<const double> v) {
  try {
    return f.eval(v);
  } catch (const RangeError& e) {
    if (e.is_overflow()) return std::numeric_limits<double>::infinity();
    throw;
  }
}

double l1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

std::vector<Point> limit_directions(int n) {
  std::vector<Point> dirs;
  for (int i = 0; i < n; ++i) {
    Point d(static_cast<std::size_t>(n), 0.0);
    d[static_cast<std::size_t>(i)] = 1.0;
    dirs.push_back(d);
  }
  if (n > 1) dirs.emplace_back(static_cast<std::size_t>(n), 1.0 / n);
  return dirs;
}

// Points of { v >= 0, |v|_1 = 1 }: vertices, barycentre, then Halton points.
std::vector<Point> boundary_directions(int n, std::size_t total) {
  std::vector<Point> dirs = limit_directions(n);
  if (n == 1) return dirs;
  for (std::size_t idx = 1; dirs.size() < total; ++idx) {
    Point y = simplex_ball_point(idx, n);
    double s = l1(y);
    if (s <= 0.0) continue;
    for (double& x : y) x /= s;
    dirs.push_back(std::move(y));
  }
  return dirs;
}

// Coordinate pattern search for max (sign = +1) or min (sign = -1) of f over
// { v >= 0, r_min <= |v|_1 <= r_max } starting from v.
void pattern_search(const Expr& f, Point& v, double& value, double r_min, double r_max, double sign) {
  const std::size_t n = v.size();
  Point trial(n);
  auto try_point = [&](const Point& p) {
    double fp = eval_or_inf(f, p);
    if (sign * fp > sign * value) {
      value = fp;
      v = p;
      return true;
    }
    return false;
  };
  for (double step = r_max / 8.0; step > r_max * 1e-13; step *= 0.5) {
    bool improved = true;
    int guard = 0;
    while (improved && guard++ < 200) {
      improved = false;
      if (std::isinf(value)) return;
      double size = l1(v);
      for (double dr : {step, -step}) {
        double target = std::clamp(size + dr, r_min, r_max);
        if (target == size) continue;
        if (size > 0.0) {
          for (std::size_t i = 0; i < n; ++i) trial[i] = v[i] * target / size;
        } else {
          std::fill(trial.begin(), trial.end(), target / static_cast<double>(n));
        }
        if (try_point(trial)) {
          improved = true;
          size = l1(v);
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j || v[j] <= 0.0) continue;
          double moved = std::min(step, v[j]);
          trial = v;
          trial[i] += moved;
          trial[j] -= moved;
          if (try_point(trial)) improved = true;
        }
      }
    }
  }
}

double max_over_region(const Expr& f, int n, double r_min, double r_max, double sign) {
  std::vector<Point> candidates;
  const std::vector<Point> dirs = boundary_directions(n, n == 1 ? 1 : 512);
  const int radial = n == 1 ? 257 : 17;
  for (int k = 0; k < radial; ++k) {
    double r = r_min + (r_max - r_min) * static_cast<double>(k) / (radial - 1);
    for (const Point& d : dirs) {
      Point p = d;
      for (double& x : p) x *= r;
      candidates.push_back(std::move(p));
    }
  }
  Point best;
  double best_value = sign > 0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  for (const Point& p : candidates) {
    double fp = eval_or_inf(f, p);
    if (sign * fp > sign * best_value || best.empty()) {
      best_value = fp;
      best = p;
    }
  }
  if (std::isinf(best_value) && best_value > 0 && sign > 0) return best_value;
  pattern_search(f, best, best_value, r_min, r_max, sign);
  return best_value;
}

bool nonincreasing(std::span<const double> x) {
  for (std::size_t j = 1; j < x.size(); ++j) {
    if (x[j] > x[j - 1] * (1.0 + 1e-12)) return false;
  }
  return true;
}

bool nondecreasing(std::span<const double> x) {
  for (std::size_t j = 1; j < x.size(); ++j) {
    if (x[j] < x[j - 1] * (1.0 - 1e-12)) return false;
  }
  return true;
}

int rank(LimitKind k) {
  switch (k) {
    case LimitKind::zero: return 0;
    case LimitKind::finite: return 1;
    case LimitKind::infinite: return 2;
    default: return -1;
  }
}

std::string format_real(double x) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return buf.data();
}

}  // namespace

LimitClass classify_ratios(std::span<const double> ratios) {
  LimitClass c;
  if (ratios.size() < 4) return c;
  std::span<const double> tail = ratios.last(4);
  for (double x : tail) {
    if (std::isnan(x) || x < 0.0) return c;
  }
  const double last = tail.back();
  if (last < 1e-6 && nonincreasing(tail)) {
    c.kind = LimitKind::zero;
    return c;
  }
  if (last > 1e6 && nondecreasing(tail)) {
    c.kind = LimitKind::infinite;
    return c;
  }
  if (std::any_of(tail.begin(), tail.end(), [](double x) { return x == 0.0 || std::isinf(x); })) return c;

  auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  if ((*hi - *lo) <= 1e-3 * *hi) {
    c.kind = LimitKind::finite;
    c.value = last;
    return c;
  }
  std::array<double, 3> slope{};
  for (std::size_t j = 0; j < 3; ++j) slope[j] = std::log10(tail[j + 1] / tail[j]);
  bool same_sign = (slope[0] > 0) == (slope[1] > 0) && (slope[1] > 0) == (slope[2] > 0);
  double smin = std::min({std::abs(slope[0]), std::abs(slope[1]), std::abs(slope[2])});
  double smax = std::max({std::abs(slope[0]), std::abs(slope[1]), std::abs(slope[2])});
  if (same_sign && smin >= 0.05 && smax <= 2.0 * smin) {
    c.kind = slope[0] < 0 ? LimitKind::zero : LimitKind::infinite;
    c.from_trend = true;
  }
  return c;
}

LimitClass limit_estimate(const Expr& f, LimitEnd which, int N, int n) {
  if (f.arity() != n) throw std::invalid_argument("limit_estimate: arity mismatch");
  const PowerMap phi{N};
  LimitClass combined;
  std::vector<LimitClass> parts;
  for (const Point& d : limit_directions(n)) {
    std::vector<double> ratios;
    for (int k = 1; k <= 8; ++k) {
      double r = which == LimitEnd::zero ? std::pow(10.0, -k) : std::pow(10.0, k);
      Point v = d;
      for (double& x : v) x *= r;
      ratios.push_back(eval_or_inf(f, v) / phi.forward(r));
    }
    parts.push_back(classify_ratios(ratios));
    combined.per_direction.push_back(parts.back().kind);
  }

  bool any_undetermined = std::any_of(parts.begin(), parts.end(),
                                      [](const LimitClass& p) { return p.kind == LimitKind::undetermined; });
  if (any_undetermined) return combined;

  const LimitClass* top = &parts.front();
  for (const LimitClass& p : parts) {
    if (rank(p.kind) > rank(top->kind) || (p.kind == top->kind && p.value > top->value)) top = &p;
  }
  combined.kind = top->kind;
  combined.value = top->kind == LimitKind::finite ? top->value : 0.0;
  for (const LimitClass& p : parts) {
    combined.from_trend = combined.from_trend || p.from_trend;
    if (p.kind != top->kind) combined.direction_dependent = true;
    if (p.kind == LimitKind::finite && top->kind == LimitKind::finite &&
        std::abs(p.value - top->value) > 1e-3 * top->value) {
      combined.direction_dependent = true;
    }
  }
  return combined;
}

double hat_envelope(const Expr& f, double t, int n) {
  if (!(t >= 0.0)) throw std::invalid_argument("hat_envelope: t must be >= 0");
  if (f.arity() != n) throw std::invalid_argument("hat_envelope: arity mismatch");
  if (t == 0.0) return eval_or_inf(f, Point(static_cast<std::size_t>(n), 0.0));
  return max_over_region(f, n, 0.0, t, 1.0);
}

std::vector<double> hat_envelope_curve(const Expr& f, std::span<const double> ts, int n) {
  std::vector<double> out;
  double running = -std::numeric_limits<double>::infinity();
  for (double t : ts) {
    running = std::max(running, hat_envelope(f, t, n));
    out.push_back(running);
  }
  return out;
}

LimitClass envelope_limit_estimate(const Expr& f, LimitEnd which, int N, int n) {
  const PowerMap phi{N};
  std::vector<double> ratios;
  for (int k = 1; k <= 8; ++k) {
    double t = which == LimitEnd::zero ? std::pow(10.0, -k) : std::pow(10.0, k);
    ratios.push_back(hat_envelope(f, t, n) / phi.forward(t));
  }
  LimitClass c = classify_ratios(ratios);
  c.per_direction = {c.kind};
  return c;
}

WeakBounds weak_bounds(const ProblemSpec& spec, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("weak_bounds: r must be > 0");
  WeakBounds wb;
  wb.m_hat = std::numeric_limits<double>::infinity();
  wb.M_hat = 0.0;
  for (const Expr& f : spec.f) {
    wb.m_hat = std::min(wb.m_hat, max_over_region(f, spec.n, r / 4.0, r, -1.0));
    wb.M_hat = std::max(wb.M_hat, hat_envelope(f, r, spec.n));
  }
  wb.h2_violation = !(wb.m_hat > 0.0);
  return wb;
}

LimitKind sum_kind(std::span<const LimitClass> parts) {
  bool any_inf = false, any_undet = false, any_finite = false;
  for (const LimitClass& p : parts) {
    switch (p.decisive()) {
      case LimitKind::infinite: any_inf = true; break;
      case LimitKind::undetermined: any_undet = true; break;
      case LimitKind::finite: any_finite = any_finite || p.value > 0.0; break;
      case LimitKind::zero: break;
    }
  }
  if (any_inf) return LimitKind::infinite;
  if (any_undet) return LimitKind::undetermined;
  return any_finite ? LimitKind::finite : LimitKind::zero;
}

namespace {

// Sampling grid for the eps / eta3 certificates: log-spaced radii in
// [1e-6, 1e6] times a direction set, about 10^4 points in total.
struct RatioTable {
  std::vector<double> radii;
  // [component][radius]
  std::vector<std::vector<double>> min_ratio;
  std::vector<std::vector<double>> max_ratio;
};

RatioTable sample_ratios(const ProblemSpec& spec) {
  const std::vector<Point> dirs = boundary_directions(spec.n, spec.n == 1 ? 1 : 16);
  const std::size_t count = 10000 / dirs.size();
  const PowerMap phi{spec.N};
  RatioTable table;
  for (std::size_t k = 0; k < count; ++k) {
    table.radii.push_back(std::pow(10.0, -6.0 + 12.0 * static_cast<double>(k) / static_cast<double>(count - 1)));
  }
  table.min_ratio.assign(spec.f.size(), std::vector<double>(count, std::numeric_limits<double>::infinity()));
  table.max_ratio.assign(spec.f.size(), std::vector<double>(count, 0.0));
  for (std::size_t k = 0; k < count; ++k) {
    const double r = table.radii[k];
    for (const Point& d : dirs) {
      Point v = d;
      for (double& x : v) x *= r;
      for (std::size_t i = 0; i < spec.f.size(); ++i) {
        double ratio = eval_or_inf(spec.f[i], v) / phi.forward(r);
        table.min_ratio[i][k] = std::min(table.min_ratio[i][k], ratio);
        table.max_ratio[i][k] = std::max(table.max_ratio[i][k], ratio);
      }
    }
  }
  return table;
}

bool positive_kind(const LimitClass& c) {
  return c.decisive() == LimitKind::infinite || (c.decisive() == LimitKind::finite && c.value > 0.0);
}

}  // namespace

BoundsReport build_bounds_report(const ProblemSpec& spec, double r_ref) {
  spec.validate();
  BoundsReport report;
  report.spec = spec;
  report.r_ref = r_ref;
  report.gamma = gamma(spec.N);
  for (const Expr& f : spec.f) {
    report.f0.push_back(limit_estimate(f, LimitEnd::zero, spec.N, spec.n));
    report.finf.push_back(limit_estimate(f, LimitEnd::infinity, spec.N, spec.n));
  }
  report.f0_sum = sum_kind(report.f0);
  report.finf_sum = sum_kind(report.finf);
  report.ref_bounds = weak_bounds(spec, r_ref);

  report.h2_evidence = !report.ref_bounds.h2_violation;
  for (const Expr& f : spec.f) {
    ValidationReport vr = validate_nonneg(f, spec.n, 10.0 * r_ref, 1000);
    report.h2_evidence = report.h2_evidence && vr.ok() && vr.h2_evidence;
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  report.epsilon = nan;
  report.eta3 = nan;
  const bool finite_ends = (report.f0_sum == LimitKind::zero || report.f0_sum == LimitKind::finite) &&
                           (report.finf_sum == LimitKind::zero || report.finf_sum == LimitKind::finite);
  const bool positive_ends = (report.f0_sum == LimitKind::finite || report.f0_sum == LimitKind::infinite) &&
                             (report.finf_sum == LimitKind::finite || report.finf_sum == LimitKind::infinite);
  if (finite_ends || positive_ends) {
    RatioTable table = sample_ratios(spec);
    if (finite_ends) {
      double eps = 0.0;
      for (std::size_t i = 0; i < spec.f.size(); ++i) {
        for (double x : table.max_ratio[i]) eps = std::max(eps, x);
        if (report.f0[i].decisive() == LimitKind::finite) eps = std::max(eps, report.f0[i].value);
        if (report.finf[i].decisive() == LimitKind::finite) eps = std::max(eps, report.finf[i].value);
      }
      if (std::isfinite(eps)) report.epsilon = 1.05 * eps;
    }
    if (positive_ends) {
      // f^i >= eta phi(|v|) for |v| <= r1 and f^j >= eta phi(|v|) for
      // |v| >= r1/4; r1 ranges over the sampled radii.
      const std::size_t count = table.radii.size();
      const double decades_per_step = 12.0 / static_cast<double>(count - 1);
      const std::size_t quarter_shift = static_cast<std::size_t>(std::ceil(std::log10(4.0) / decades_per_step));
      double best = 0.0;
      double best_radius = nan;
      for (std::size_t i = 0; i < spec.f.size(); ++i) {
        if (!positive_kind(report.f0[i])) continue;
        std::vector<double> prefix(count);
        double running = report.f0[i].decisive() == LimitKind::finite ? report.f0[i].value
                                                                      : std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < count; ++k) prefix[k] = running = std::min(running, table.min_ratio[i][k]);
        for (std::size_t j = 0; j < spec.f.size(); ++j) {
          if (!positive_kind(report.finf[j])) continue;
          std::vector<double> suffix(count);
          double tail = report.finf[j].decisive() == LimitKind::finite ? report.finf[j].value
                                                                       : std::numeric_limits<double>::infinity();
          for (std::size_t k = count; k-- > 0;) suffix[k] = tail = std::min(tail, table.min_ratio[j][k]);
          for (std::size_t k = 0; k < count; ++k) {
            std::size_t lower = k >= quarter_shift ? k - quarter_shift : 0;
            double eta = std::min(prefix[k], suffix[lower]);
            if (eta > best) {
              best = eta;
              best_radius = table.radii[k];
            }
          }
        }
      }
      if (best > 0.0 && std::isfinite(best)) {
        report.eta3 = 0.95 * best;
        report.eta3_radius = best_radius;
      }
    }
  }
  report.thresholds = lambda0_thresholds(spec, report, r_ref);
  return report;
}

namespace {

Threshold make_threshold(const char* part, Threshold::Meaning meaning) {
  Threshold t;
  t.part = part;
  t.meaning = meaning;
  return t;
}

}  // namespace

std::vector<Threshold> lambda0_thresholds(const ProblemSpec& spec, const BoundsReport& report, double r_ref) {
  const PowerMap phi{spec.N};
  const double n = static_cast<double>(spec.n);
  std::vector<Threshold> out;

  Threshold a = make_threshold("2a", Threshold::Meaning::existence_above);
  if (!(report.f0_sum == LimitKind::zero || report.finf_sum == LimitKind::zero)) {
    a.reason = "needs f0 = 0 or f_inf = 0";
  } else if (!report.h2_evidence) {
    a.reason = "needs (H2): positivity not evidenced";
  } else {
    WeakBounds wb = r_ref == report.r_ref ? report.ref_bounds : weak_bounds(spec, r_ref);
    if (wb.m_hat > 0.0) {
      a.emitted = true;
      a.value = phi.forward(r_ref / (4.0 * report.gamma * phi.inverse(wb.m_hat)));
    } else {
      a.reason = "m_hat <= 0 on the reference annulus";
    }
  }
  out.push_back(a);

  Threshold b = make_threshold("2b", Threshold::Meaning::existence_below);
  if (!(report.f0_sum == LimitKind::infinite || report.finf_sum == LimitKind::infinite)) {
    b.reason = "needs f0 = inf or f_inf = inf";
  } else if (!report.h2_evidence) {
    b.reason = "needs (H2): positivity not evidenced";
  } else {
    WeakBounds wb = r_ref == report.r_ref ? report.ref_bounds : weak_bounds(spec, r_ref);
    if (std::isfinite(wb.M_hat) && wb.M_hat > 0.0) {
      b.emitted = true;
      b.value = phi.forward(r_ref / (n * phi.inverse(wb.M_hat)));
    } else {
      b.reason = "M_hat is not a positive finite value";
    }
  }
  out.push_back(b);

  Threshold e = make_threshold("2e", Threshold::Meaning::nonexistence_below);
  if (std::isnan(report.epsilon)) {
    e.reason = "needs f0 < inf and f_inf < inf with a finite sampled sup";
  } else {
    e.emitted = true;
    e.value = phi.forward(1.0 / (n * phi.inverse(report.epsilon)));
  }
  out.push_back(e);

  Threshold f = make_threshold("2f", Threshold::Meaning::nonexistence_above);
  if (std::isnan(report.eta3)) {
    f.reason = "needs f0 > 0 and f_inf > 0 with a positive sampled eta3";
  } else {
    f.emitted = true;
    f.value = phi.forward(1.0 / (report.gamma * phi.inverse(report.eta3)));
  }
  out.push_back(f);
  return out;
}

bool ClassifyReport::has(const std::string& label) const {
  return std::any_of(regimes.begin(), regimes.end(),
                     [&](const Regime& r) { return r.label == label && r.status == RegimeStatus::holds; });
}

namespace {

// Three-valued predicates on sum classifications.
enum class Tri { no, yes, unknown };

Tri is(LimitKind k, std::initializer_list<LimitKind> accepted) {
  if (k == LimitKind::undetermined) return Tri::unknown;
  return std::find(accepted.begin(), accepted.end(), k) != accepted.end() ? Tri::yes : Tri::no;
}

Tri both(Tri a, Tri b) {
  if (a == Tri::no || b == Tri::no) return Tri::no;
  if (a == Tri::yes && b == Tri::yes) return Tri::yes;
  return Tri::unknown;
}

Tri either(Tri a, Tri b) {
  if (a == Tri::yes || b == Tri::yes) return Tri::yes;
  if (a == Tri::no && b == Tri::no) return Tri::no;
  return Tri::unknown;
}

}  // namespace

ClassifyReport classify(const ProblemSpec& spec, double r_ref) {
  ClassifyReport out;
  out.bounds = build_bounds_report(spec, r_ref);
  const LimitKind z = out.bounds.f0_sum;
  const LimitKind inf = out.bounds.finf_sum;
  using K = LimitKind;

  struct Case {
    const char* label;
    Tri condition;
    bool needs_h2;
    const char* prediction;
  };
  const Case cases[] = {
      {"1a", both(is(z, {K::zero}), is(inf, {K::infinite})), false,
       "nontrivial convex solution for every lambda > 0"},
      {"1b", both(is(z, {K::infinite}), is(inf, {K::zero})), false,
       "nontrivial convex solution for every lambda > 0"},
      {"2a", either(is(z, {K::zero}), is(inf, {K::zero})), true,
       "strictly convex solution for lambda > lambda0"},
      {"2b", either(is(z, {K::infinite}), is(inf, {K::infinite})), true,
       "strictly convex solution for 0 < lambda < lambda0"},
      {"2c", both(is(z, {K::zero}), is(inf, {K::zero})), true,
       "two strictly convex solutions for lambda > lambda0"},
      {"2d", both(is(z, {K::infinite}), is(inf, {K::infinite})), true,
       "two strictly convex solutions for 0 < lambda < lambda0"},
      {"2e", both(is(z, {K::zero, K::finite}), is(inf, {K::zero, K::finite})), true,
       "no strictly convex radial solution for 0 < lambda < lambda0"},
      {"2f", both(is(z, {K::finite, K::infinite}), is(inf, {K::finite, K::infinite})), true,
       "no strictly convex radial solution for lambda > lambda0"},
  };
  for (const Case& c : cases) {
    if (c.condition == Tri::no) continue;
    Regime r;
    r.label = c.label;
    r.prediction = c.prediction;
    if (c.condition == Tri::unknown) {
      r.status = RegimeStatus::undetermined;
      r.note = "limit classification undetermined";
    } else if (c.needs_h2 && !out.bounds.h2_evidence) {
      r.status = RegimeStatus::undetermined;
      r.note = "(H2) not evidenced by sampling";
    }
    out.regimes.push_back(std::move(r));
  }
  return out;
}

namespace {

void write_limit(std::ostream& os, const std::string& key, const LimitClass& c) {
  os << key << '=' << to_string(c.kind) << '\n';
  if (c.kind == LimitKind::finite) os << key << ".value=" << format_real(c.value) << '\n';
  if (c.direction_dependent) os << key << ".direction_dependent=true\n";
  if (c.from_trend) os << key << ".from_trend=true\n";
}

const char* meaning(Threshold::Meaning m) {
  switch (m) {
    case Threshold::Meaning::existence_above: return "existence_for_lambda_above";
    case Threshold::Meaning::existence_below: return "existence_for_lambda_below";
    case Threshold::Meaning::nonexistence_below: return "nonexistence_for_lambda_below";
    case Threshold::Meaning::nonexistence_above: return "nonexistence_for_lambda_above";
  }
  return "";
}

}  // namespace

void write_bounds_report(std::ostream& os, const BoundsReport& report) {
  os << "N=" << report.spec.N << '\n';
  os << "n=" << report.spec.n << '\n';
  os << "gamma=" << format_real(report.gamma) << '\n';
  for (std::size_t i = 0; i < report.f0.size(); ++i) {
    write_limit(os, "f0." + std::to_string(i + 1), report.f0[i]);
    write_limit(os, "finf." + std::to_string(i + 1), report.finf[i]);
  }
  os << "f0=" << to_string(report.f0_sum) << '\n';
  os << "finf=" << to_string(report.finf_sum) << '\n';
  os << "h2_evidence=" << (report.h2_evidence ? "true" : "false") << '\n';
  os << "r_ref=" << format_real(report.r_ref) << '\n';
  os << "m_hat=" << format_real(report.ref_bounds.m_hat) << '\n';
  os << "M_hat=" << format_real(report.ref_bounds.M_hat) << '\n';
  os << "epsilon=" << (std::isnan(report.epsilon) ? std::string("n/a") : format_real(report.epsilon)) << '\n';
  os << "eta3=" << (std::isnan(report.eta3) ? std::string("n/a") : format_real(report.eta3)) << '\n';
  if (!std::isnan(report.eta3)) os << "eta3.radius=" << format_real(report.eta3_radius) << '\n';
  for (const Threshold& t : report.thresholds) {
    const std::string key = "lambda0." + t.part;
    if (t.emitted) {
      os << key << '=' << format_real(t.value) << '\n';
      os << key << ".meaning=" << meaning(t.meaning) << '\n';
    } else {
      os << key << "=omitted\n";
      os << key << ".reason=" << t.reason << '\n';
    }
  }
  os << "certificates=sampled_non_rigorous\n";
}

void write_classify_report(std::ostream& os, const ClassifyReport& report) {
  write_bounds_report(os, report.bounds);
  for (const Regime& r : report.regimes) {
    const std::string key = "regime." + r.label;
    os << key << '=' << (r.status == RegimeStatus::holds ? "holds" : "undetermined") << '\n';
    os << key << ".prediction=" << r.prediction << '\n';
    if (!r.note.empty()) os << key << ".note=" << r.note << '\n';
  }
}

}  // namespace radma
