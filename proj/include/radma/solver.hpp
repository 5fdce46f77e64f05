#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "radma/model.hpp"

namespace radma {

// ---------------------------------------------------------------------------
// Picard iteration on the discrete operator

struct PicardOptions {
  double tol = 1e-10;
  int max_iter = 500;
  double damping = 1.0;
};

enum class PicardStatus { converged, max_iterations, diverged };

struct PicardResult {
  Profile v;
  PicardStatus status = PicardStatus::max_iterations;
  int iterations = 0;
  std::vector<double> residuals;

  bool converged() const noexcept { return status == PicardStatus::converged; }
};

/// v <- (1 - damping) v + damping T v until norm(T v - v) <= tol.
/// Only attracting fixed points can be reached this way.
PicardResult picard(const ProblemSpec& spec, const Profile& v0, const PicardOptions& options = {});

// ---------------------------------------------------------------------------
// Shooting

struct ShootResult {
  /// v_i(1; alpha), the shooting defect.
  Eigen::VectorXd boundary;
  /// v on the mesh (may go negative past a zero crossing).
  Profile trajectory;
};

/// Integrates w_i' = lambda N t^{N-1} f^i(v), v_i' = -w_i^{1/N} with
/// v(0) = alpha, w(0) = 0 by RK4 on the mesh. The first step uses the
/// series v ~ alpha - (lambda f(alpha))^{1/N} t^2/2, w ~ lambda f(alpha) t^N.
/// f is evaluated at max(v, 0).
ShootResult shoot(const ProblemSpec& spec, const Eigen::VectorXd& alpha);

/// Boundary values only, without storing the trajectory.
Eigen::VectorXd shoot_boundary(const ProblemSpec& spec, const Eigen::VectorXd& alpha);

/// Norm shell r_lo <= |v| <= r_hi searched for solutions.
struct SearchWindow {
  double r_lo = 1e-6;
  double r_hi = 1e3;

  void validate() const;
  bool contains(double r) const noexcept { return r >= r_lo && r <= r_hi; }
};

struct Solution {
  Eigen::VectorXd alpha;
  Profile v;
  double norm = 0.0;
};

/// Profile for a shooting root alpha: the trajectory is clamped at 0, pinned
/// to v(1) = 0 and mapped once through T. The image differs from the
/// trajectory by the (tiny) fixed-point residual but carries no RK4 stage
/// noise, which second differences would otherwise amplify.
Solution make_solution(const ProblemSpec& spec, const Eigen::VectorXd& alpha);

/// Scalar problems: scan alpha over the window on a geometric-plus-linear
/// grid, bracket sign changes of v(1; alpha) and bisect each bracket.
std::vector<Solution> find_solutions_scalar(const ProblemSpec& spec, const SearchWindow& window, int grid = 64);

struct SystemResult {
  bool converged = false;
  Solution solution;
  int iterations = 0;
  std::string failure;
};

/// Damped Newton on R(alpha) = v(1; alpha) with forward-difference Jacobian.
SystemResult find_solutions_system(const ProblemSpec& spec, const Eigen::VectorXd& alpha0, int max_newton = 60);

/// For n = 1: bisection on lambda in [lambda_lo, lambda_hi] for a root of
/// v(1; alpha, lambda) at fixed amplitude alpha. Requires a sign change.
std::optional<double> locate_parameter(const ProblemSpec& spec, double alpha, double lambda_lo, double lambda_hi);

// ---------------------------------------------------------------------------
// Parameter sweep

struct SweepRow {
  double lambda = 0.0;
  std::vector<double> norms;
  std::vector<Eigen::VectorXd> alphas;
  /// Row inserted between grid points by locating where the probe
  /// amplitude solves the problem (scalar problems only).
  bool located = false;

  std::size_t count() const noexcept { return norms.size(); }
};

struct SweepTable {
  std::vector<SweepRow> rows;

  /// Consecutive rows whose counts differ: (lambda_a, lambda_b, count_a, count_b).
  struct Transition {
    double lambda_lo;
    double lambda_hi;
    std::size_t count_lo;
    std::size_t count_hi;
  };
  std::vector<Transition> transitions() const;
};

struct SweepOptions {
  /// Alpha-scan grid for scalar problems.
  int grid = 64;
  /// Ray seeds alpha = c (1,...,1) for systems.
  int seeds = 64;
  int max_newton = 60;
  /// Probe amplitude for locating solutions between grid points (n = 1).
  double probe_alpha = 1.0;
};

/// Deduplicates by norm (relative 1e-6), keeping the lower-norm entry.
std::vector<Solution> deduplicate(std::vector<Solution> solutions);

/// Solutions at a single lambda: scalar scan for n = 1, seeded Newton for
/// n >= 2 (ray seeds plus `warm` starts). Only solutions inside the window.
std::vector<Solution> find_all_solutions(const ProblemSpec& spec, const SearchWindow& window,
                                         const SweepOptions& options = {},
                                         const std::vector<Eigen::VectorXd>& warm = {});

SweepTable sweep(const ProblemSpec& spec, const std::vector<double>& lambdas, const SearchWindow& window,
                 const SweepOptions& options = {});

std::vector<double> lambda_grid(double lo, double hi, int points, bool geometric);

/// "lambda,count,norm_1,...,norm_K" with K the largest count.
void write_sweep_csv(std::ostream& os, const SweepTable& table);

}  // namespace radma
