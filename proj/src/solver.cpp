#include "radma/solver.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "radma/fixed_point_operator.hpp"

namespace radma {

PicardResult picard(const ProblemSpec& spec, const Profile& v0, const PicardOptions& options) {
  spec.validate();
  if (!(options.tol > 0.0)) throw std::invalid_argument("picard: tol must be > 0");
  if (!(options.damping > 0.0 && options.damping <= 1.0)) throw std::invalid_argument("picard: damping must be in (0,1]");
  PicardResult result;
  result.v = v0;
  const double limit = 1e6 * std::max(norm(v0), 1.0);
  for (int iter = 0; iter <= options.max_iter; ++iter) {
    Profile tv;
    try {
      tv = apply_operator(result.v, spec);
    } catch (const RangeError&) {
      result.status = PicardStatus::diverged;
      return result;
    }
    double r = norm(tv - result.v);
    result.residuals.push_back(r);
    result.iterations = iter;
    if (r <= options.tol) {
      result.status = PicardStatus::converged;
      return result;
    }
    if (iter == options.max_iter) break;
    result.v = (1.0 - options.damping) * result.v + options.damping * tv;
    if (!std::isfinite(norm(result.v)) || norm(result.v) > limit) {
      result.status = PicardStatus::diverged;
      return result;
    }
  }
  result.status = PicardStatus::max_iterations;
  return result;
}

namespace {

class Shooter {
 public:
  explicit Shooter(const ProblemSpec& spec)
      : spec_(spec), mesh_(spec.mesh()), phi_{spec.N}, n_(static_cast<std::size_t>(spec.n)) {
    spec.validate();
    x_.resize(n_);
  }

  // Runs the integration; `store` receives v at every node if non-null.
  Eigen::VectorXd run(const Eigen::VectorXd& alpha, Profile* store) {
    if (alpha.size() != spec_.n) throw std::invalid_argument("shoot: alpha has wrong length");
    if ((alpha.array() < 0.0).any()) throw std::invalid_argument("shoot: alpha must be >= 0");
    const int m = mesh_.intervals();
    const double h = mesh_.h();
    std::vector<double> v(n_), w(n_), f(n_);
    std::vector<double> k1v(n_), k1w(n_), k2v(n_), k2w(n_), k3v(n_), k3w(n_), k4v(n_), k4w(n_), tv(n_), tw(n_);
    if (store) store->resize(spec_.n, m + 1);

    for (std::size_t i = 0; i < n_; ++i) v[i] = alpha(static_cast<Eigen::Index>(i));
    if (store) store->col(0) = alpha;
    rhs_f(v, f);
    for (std::size_t i = 0; i < n_; ++i) {
      double c = spec_.lambda * f[i];
      v[i] = alpha(static_cast<Eigen::Index>(i)) - phi_.inverse(c) * h * h / 2.0;
      w[i] = c * phi_.forward(h);
    }
    if (store) store_col(*store, 1, v);

    for (int k = 1; k < m; ++k) {
      const double t = mesh_.node(k);
      derivative(t, v, w, k1v, k1w);
      for (std::size_t i = 0; i < n_; ++i) {
        tv[i] = v[i] + 0.5 * h * k1v[i];
        tw[i] = w[i] + 0.5 * h * k1w[i];
      }
      derivative(t + 0.5 * h, tv, tw, k2v, k2w);
      for (std::size_t i = 0; i < n_; ++i) {
        tv[i] = v[i] + 0.5 * h * k2v[i];
        tw[i] = w[i] + 0.5 * h * k2w[i];
      }
      derivative(t + 0.5 * h, tv, tw, k3v, k3w);
      for (std::size_t i = 0; i < n_; ++i) {
        tv[i] = v[i] + h * k3v[i];
        tw[i] = w[i] + h * k3w[i];
      }
      derivative(t + h, tv, tw, k4v, k4w);
      for (std::size_t i = 0; i < n_; ++i) {
        v[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        w[i] += h / 6.0 * (k1w[i] + 2.0 * k2w[i] + 2.0 * k3w[i] + k4w[i]);
      }
      if (store) store_col(*store, k + 1, v);
    }
    Eigen::VectorXd boundary(spec_.n);
    for (std::size_t i = 0; i < n_; ++i) boundary(static_cast<Eigen::Index>(i)) = v[i];
    return boundary;
  }

 private:
  static void store_col(Profile& p, int k, const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) p(static_cast<Eigen::Index>(i), k) = v[i];
  }

  void rhs_f(const std::vector<double>& v, std::vector<double>& f) {
    for (std::size_t i = 0; i < n_; ++i) x_[i] = std::max(v[i], 0.0);
    for (std::size_t i = 0; i < n_; ++i) f[i] = spec_.f[i].eval(x_);
  }

  void derivative(double t, const std::vector<double>& v, const std::vector<double>& w, std::vector<double>& dv,
                  std::vector<double>& dw) {
    const double weight = spec_.lambda * spec_.N * (spec_.N == 1 ? 1.0 : std::pow(t, spec_.N - 1));
    rhs_f(v, dw);
    for (std::size_t i = 0; i < n_; ++i) {
      dw[i] *= weight;
      dv[i] = -phi_.inverse(std::max(w[i], 0.0));
    }
  }

  const ProblemSpec& spec_;
  Mesh mesh_;
  PowerMap phi_;
  std::size_t n_;
  std::vector<double> x_;
};

}  // namespace

ShootResult shoot(const ProblemSpec& spec, const Eigen::VectorXd& alpha) {
  Shooter shooter(spec);
  ShootResult result;
  result.boundary = shooter.run(alpha, &result.trajectory);
  return result;
}

Eigen::VectorXd shoot_boundary(const ProblemSpec& spec, const Eigen::VectorXd& alpha) {
  Shooter shooter(spec);
  return shooter.run(alpha, nullptr);
}

void SearchWindow::validate() const {
  if (!(r_lo >= 0.0 && r_hi > r_lo && std::isfinite(r_hi))) {
    throw std::invalid_argument("search window: need 0 <= r_lo < r_hi");
  }
}

Solution make_solution(const ProblemSpec& spec, const Eigen::VectorXd& alpha) {
  Solution s;
  s.alpha = alpha;
  Profile trajectory = shoot(spec, alpha).trajectory.cwiseMax(0.0);
  trajectory.col(trajectory.cols() - 1).setZero();
  try {
    s.v = apply_operator(trajectory, spec);
  } catch (const RangeError&) {
    s.v = std::move(trajectory);
  }
  s.norm = norm(s.v);
  return s;
}

namespace {

constexpr double kRootTol = 1e-10;

double scalar_defect(const ProblemSpec& spec, double alpha) {
  try {
    return shoot_boundary(spec, Eigen::VectorXd::Constant(1, alpha))(0);
  } catch (const RangeError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

// Bisection of a continuous g on [a, b] with g(a) g(b) < 0.
template <typename G>
std::optional<double> bisect(G&& g, double a, double b, double ga, double gb) {
  for (int iter = 0; iter < 400; ++iter) {
    double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) return std::abs(ga) <= std::abs(gb) ? a : b;
    double gm = g(mid);
    if (std::isnan(gm)) return std::nullopt;
    if (std::abs(gm) <= kRootTol * std::max(1.0, std::abs(mid))) return mid;
    if ((gm < 0.0) == (ga < 0.0)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
      gb = gm;
    }
  }
  return std::abs(ga) <= std::abs(gb) ? a : b;
}

std::vector<double> alpha_scan_grid(const SearchWindow& window, int grid) {
  std::vector<double> alphas;
  double lo_geo = window.r_lo > 0.0 ? window.r_lo : window.r_hi * 1e-9;
  for (int j = 0; j < grid; ++j) {
    double s = static_cast<double>(j) / (grid - 1);
    alphas.push_back(lo_geo * std::pow(window.r_hi / lo_geo, s));
    double lin = window.r_lo + (window.r_hi - window.r_lo) * s;
    if (lin > 0.0) alphas.push_back(lin);
  }
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
  return alphas;
}

}  // namespace

std::vector<Solution> find_solutions_scalar(const ProblemSpec& spec, const SearchWindow& window, int grid) {
  spec.validate();
  window.validate();
  if (spec.n != 1) throw std::invalid_argument("find_solutions_scalar: requires n = 1");
  if (grid < 8) throw std::invalid_argument("find_solutions_scalar: grid must be >= 8");

  std::vector<double> alphas = alpha_scan_grid(window, grid);
  std::vector<double> g(alphas.size());
  for (std::size_t j = 0; j < alphas.size(); ++j) g[j] = scalar_defect(spec, alphas[j]);

  auto defect = [&](double a) { return scalar_defect(spec, a); };
  std::vector<double> roots;
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    if (g[j] == 0.0) roots.push_back(alphas[j]);
    if (j + 1 == alphas.size() || std::isnan(g[j]) || std::isnan(g[j + 1])) continue;
    if (g[j] != 0.0 && g[j + 1] != 0.0 && (g[j] < 0.0) != (g[j + 1] < 0.0)) {
      if (auto root = bisect(defect, alphas[j], alphas[j + 1], g[j], g[j + 1])) roots.push_back(*root);
    }
  }

  std::vector<Solution> solutions;
  for (double a : roots) {
    if (!(a > 0.0)) continue;
    Eigen::VectorXd alpha = Eigen::VectorXd::Constant(1, a);
    solutions.push_back(make_solution(spec, alpha));
  }
  return deduplicate(std::move(solutions));
}

std::optional<double> locate_parameter(const ProblemSpec& spec, double alpha, double lambda_lo, double lambda_hi) {
  if (spec.n != 1) throw std::invalid_argument("locate_parameter: requires n = 1");
  if (!(lambda_lo > 0.0 && lambda_hi > lambda_lo)) throw std::invalid_argument("locate_parameter: bad bracket");
  auto defect = [&](double lambda) { return scalar_defect(spec.with_lambda(lambda), alpha); };
  double ga = defect(lambda_lo);
  double gb = defect(lambda_hi);
  if (std::isnan(ga) || std::isnan(gb)) return std::nullopt;
  if (ga == 0.0) return lambda_lo;
  if (gb == 0.0) return lambda_hi;
  if ((ga < 0.0) == (gb < 0.0)) return std::nullopt;
  return bisect(defect, lambda_lo, lambda_hi, ga, gb);
}

SystemResult find_solutions_system(const ProblemSpec& spec, const Eigen::VectorXd& alpha0, int max_newton) {
  spec.validate();
  SystemResult result;
  if (alpha0.size() != spec.n) throw std::invalid_argument("find_solutions_system: alpha0 has wrong length");
  if ((alpha0.array() < 0.0).any()) throw std::invalid_argument("find_solutions_system: alpha0 must be >= 0");

  Shooter shooter(spec);
  auto defect = [&](const Eigen::VectorXd& a, Eigen::VectorXd& r) {
    try {
      r = shooter.run(a, nullptr);
      return r.allFinite();
    } catch (const RangeError&) {
      return false;
    }
  };

  Eigen::VectorXd alpha = alpha0;
  Eigen::VectorXd r;
  if (!defect(alpha, r)) {
    result.failure = "range error at initial guess";
    return result;
  }
  const Eigen::Index n = alpha.size();
  auto newton_direction = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& ra, Eigen::VectorXd& direction) {
    Eigen::MatrixXd jac(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXd shifted = a;
      double step = 1e-6 * std::max(1.0, std::abs(a(j)));
      shifted(j) += step;
      Eigen::VectorXd rj;
      if (!defect(shifted, rj)) return false;
      jac.col(j) = (rj - ra) / step;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (lu.isInvertible() && lu.rcond() > 1e-13) {
      direction = lu.solve(-ra);
    } else {
      // Levenberg-Marquardt rescue for a (near) singular Jacobian.
      Eigen::MatrixXd normal = jac.transpose() * jac;
      double mu = 1e-8 * std::max(normal.norm(), 1e-300);
      normal.diagonal().array() += mu;
      Eigen::FullPivLU<Eigen::MatrixXd> lm(normal);
      if (!lm.isInvertible()) return false;
      direction = lm.solve(-jac.transpose() * ra);
    }
    return direction.allFinite();
  };
  // A few extra full steps past the acceptance test, kept only while the
  // defect keeps shrinking, so that solutions agree to near rounding.
  auto polish = [&](Eigen::VectorXd& a, Eigen::VectorXd& ra) {
    for (int extra = 0; extra < 3; ++extra) {
      Eigen::VectorXd direction, trial, rtrial;
      if (!newton_direction(a, ra, direction)) return;
      trial = (a + direction).cwiseMax(0.0);
      if (!defect(trial, rtrial) || !(rtrial.lpNorm<1>() < ra.lpNorm<1>())) return;
      a = trial;
      ra = rtrial;
    }
  };
  for (int iter = 0; iter <= max_newton; ++iter) {
    result.iterations = iter;
    double rnorm = r.lpNorm<1>();
    if (rnorm <= 1e-9 * std::max(1.0, alpha.lpNorm<1>())) {
      if ((alpha.array() < 0.0).any() || alpha.lpNorm<1>() == 0.0) {
        result.failure = "converged to a trivial or negative amplitude";
        return result;
      }
      polish(alpha, r);
      result.converged = true;
      result.solution = make_solution(spec, alpha);
      return result;
    }
    if (iter == max_newton) break;

    Eigen::VectorXd direction;
    if (!newton_direction(alpha, r, direction)) {
      result.failure = "singular Jacobian or range error while forming it";
      return result;
    }

    double scale = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial, rtrial;
    for (int halving = 0; halving < 40; ++halving, scale *= 0.5) {
      trial = (alpha + scale * direction).cwiseMax(0.0);
      if (defect(trial, rtrial) && rtrial.lpNorm<1>() < (1.0 - 1e-4 * scale) * rnorm) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      result.failure = "line search failed (damping could not reduce the defect)";
      return result;
    }
    alpha = trial;
    r = rtrial;
    if (alpha.lpNorm<1>() > 1e12) {
      result.failure = "diverged";
      return result;
    }
  }
  result.failure = "maximum Newton iterations reached";
  return result;
}

std::vector<Solution> deduplicate(std::vector<Solution> solutions) {
  std::stable_sort(solutions.begin(), solutions.end(),
                   [](const Solution& a, const Solution& b) { return a.norm < b.norm; });
  std::vector<Solution> unique;
  for (Solution& s : solutions) {
    if (!unique.empty() && std::abs(s.norm - unique.back().norm) <= 1e-6 * std::max(s.norm, unique.back().norm)) {
      continue;
    }
    unique.push_back(std::move(s));
  }
  return unique;
}

std::vector<Solution> find_all_solutions(const ProblemSpec& spec, const SearchWindow& window,
                                         const SweepOptions& options, const std::vector<Eigen::VectorXd>& warm) {
  window.validate();
  std::vector<Solution> found;
  if (spec.n == 1) {
    found = find_solutions_scalar(spec, window, options.grid);
  } else {
    std::vector<Eigen::VectorXd> seeds = warm;
    double lo = std::max(window.r_lo, window.r_hi * 1e-9) / spec.n;
    double hi = window.r_hi / spec.n;
    for (int j = 0; j < options.seeds; ++j) {
      double s = options.seeds > 1 ? static_cast<double>(j) / (options.seeds - 1) : 0.0;
      seeds.push_back(Eigen::VectorXd::Constant(spec.n, lo * std::pow(hi / lo, s)));
    }
    for (const Eigen::VectorXd& seed : seeds) {
      SystemResult r = find_solutions_system(spec, seed, options.max_newton);
      if (r.converged) found.push_back(std::move(r.solution));
    }
  }
  std::erase_if(found, [&](const Solution& s) { return !window.contains(s.norm); });
  return deduplicate(std::move(found));
}

namespace {

SweepRow make_row(double lambda, const std::vector<Solution>& solutions) {
  SweepRow row;
  row.lambda = lambda;
  for (const Solution& s : solutions) {
    row.norms.push_back(s.norm);
    row.alphas.push_back(s.alpha);
  }
  return row;
}

}  // namespace

SweepTable sweep(const ProblemSpec& spec, const std::vector<double>& lambdas, const SearchWindow& window,
                 const SweepOptions& options) {
  spec.validate();
  window.validate();
  if (lambdas.empty()) throw std::invalid_argument("sweep: empty lambda grid");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] > 0.0) || (k > 0 && !(lambdas[k] > lambdas[k - 1]))) {
      throw std::invalid_argument("sweep: lambda grid must be positive and increasing");
    }
  }

  SweepTable table;
  std::vector<Eigen::VectorXd> warm;
  for (double lambda : lambdas) {
    ProblemSpec at = spec.with_lambda(lambda);
    std::vector<Solution> solutions = find_all_solutions(at, window, options, warm);
    table.rows.push_back(make_row(lambda, solutions));
    warm.clear();
    for (const Solution& s : solutions) warm.push_back(s.alpha);
  }

  if (spec.n == 1 && lambdas.size() > 1) {
    const double probe = std::clamp(options.probe_alpha, std::max(window.r_lo, 1e-300), window.r_hi);
    std::vector<double> g(lambdas.size());
    for (std::size_t k = 0; k < lambdas.size(); ++k) g[k] = scalar_defect(spec.with_lambda(lambdas[k]), probe);
    std::vector<SweepRow> located;
    for (std::size_t k = 0; k + 1 < lambdas.size(); ++k) {
      if (std::isnan(g[k]) || std::isnan(g[k + 1]) || g[k] == 0.0 || g[k + 1] == 0.0) continue;
      if ((g[k] < 0.0) == (g[k + 1] < 0.0)) continue;
      std::optional<double> lambda_star = locate_parameter(spec, probe, lambdas[k], lambdas[k + 1]);
      if (!lambda_star || *lambda_star <= lambdas[k] || *lambda_star >= lambdas[k + 1]) continue;
      ProblemSpec at = spec.with_lambda(*lambda_star);
      std::vector<Solution> solutions = find_solutions_scalar(at, window, options.grid);
      Eigen::VectorXd alpha = Eigen::VectorXd::Constant(1, probe);
      solutions.push_back(make_solution(at, alpha));
      solutions = deduplicate(std::move(solutions));
      std::erase_if(solutions, [&](const Solution& s) { return !window.contains(s.norm); });
      SweepRow row = make_row(*lambda_star, solutions);
      row.located = true;
      located.push_back(std::move(row));
    }
    table.rows.insert(table.rows.end(), located.begin(), located.end());
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const SweepRow& a, const SweepRow& b) { return a.lambda < b.lambda; });
  }
  return table;
}

std::vector<SweepTable::Transition> SweepTable::transitions() const {
  std::vector<Transition> out;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    if (rows[k].count() != rows[k + 1].count()) {
      out.push_back({rows[k].lambda, rows[k + 1].lambda, rows[k].count(), rows[k + 1].count()});
    }
  }
  return out;
}

std::vector<double> lambda_grid(double lo, double hi, int points, bool geometric) {
  if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument("lambda grid: need 0 < lo < hi");
  if (points < 2) throw std::invalid_argument("lambda grid: need at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) {
    double s = static_cast<double>(j) / (points - 1);
    grid[static_cast<std::size_t>(j)] = geometric ? lo * std::pow(hi / lo, s) : lo + (hi - lo) * s;
  }
  grid.back() = hi;
  return grid;
}

void write_sweep_csv(std::ostream& os, const SweepTable& table) {
  std::size_t width = 0;
  for (const SweepRow& row : table.rows) width = std::max(width, row.count());
  os << "lambda,count";
  for (std::size_t j = 0; j < width; ++j) os << ",norm_" << (j + 1);
  os << '\n';
  std::array<char, 32> buf{};
  for (const SweepRow& row : table.rows) {
    std::snprintf(buf.data(), buf.size(), "%.17g", row.lambda);
    os << buf.data() << ',' << row.count();
    for (std::size_t j = 0; j < width; ++j) {
      os << ',';
      if (j < row.count()) {
        std::snprintf(buf.data(), buf.size(), "%.17g", row.norms[j]);
        os << buf.data();
      }
    }
    os << '\n';
  }
}

}  // namespace radma
