#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "radma/expr.hpp"

namespace radma {

/// n x (M+1) grid function, row i is component v_i sampled at t_k = k/M.
template <typename Scalar>
using ProfileT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Profile = ProfileT<double>;

/// Uniform mesh of [0,1] with M intervals, M divisible by 4 so that
/// t = 1/4 and t = 3/4 are nodes.
class Mesh {
 public:
  explicit Mesh(int intervals);

  int intervals() const noexcept { return m_; }
  int nodes() const noexcept { return m_ + 1; }
  double h() const noexcept { return 1.0 / m_; }
  double node(int k) const noexcept { return static_cast<double>(k) / m_; }
  int quarter() const noexcept { return m_ / 4; }
  int three_quarter() const noexcept { return 3 * (m_ / 4); }
  Eigen::VectorXd points() const;

 private:
  int m_;
};

struct ProblemSpec {
  int N = 1;
  int n = 1;
  double lambda = 1.0;
  std::vector<Expr> f;
  int M = 2048;

  /// Throws std::invalid_argument on any violated constraint.
  void validate() const;
  Mesh mesh() const { return Mesh(M); }
  ProblemSpec with_lambda(double new_lambda) const;
};

/// Builds and validates a spec from expression strings.
ProblemSpec make_spec(int N, double lambda, const std::vector<std::string>& f, int M = 2048);

/// Sum over components of sup_k |v_i(t_k)|.
template <typename Derived>
typename Derived::Scalar norm(const Eigen::MatrixBase<Derived>& v) {
  if (v.size() == 0) return typename Derived::Scalar(0);
  return v.cwiseAbs().rowwise().maxCoeff().sum();
}

struct ConeReport {
  bool nonnegative = true;
  double min_negative = 0.0;
  double norm = 0.0;
  double tolerance = 0.0;
  /// min over t_k in [1/4,3/4] of sum_i v_i(t_k).
  double middle_min = 0.0;
  /// middle_min - norm/4.
  double slack = 0.0;
  bool quarter_bound = true;
  /// v_i(t) >= min(t,1-t) max v_i, checked on concave components.
  bool concavity_bound = true;
  int concavity_checked = 0;
  double concavity_worst = 0.0;
  /// Informational: every component nonincreasing with v_i(1) = 0.
  bool monotone = true;

  bool passed() const noexcept { return nonnegative && quarter_bound && concavity_bound; }
};

/// Default tolerance 10 h |v|.
double default_cone_tolerance(const Profile& v);

ConeReport cone_check(const Profile& v, double tol);
inline ConeReport cone_check(const Profile& v) { return cone_check(v, default_cone_tolerance(v)); }

struct SolutionPair {
  Profile v;
  Profile u;
  double lambda = 0.0;
  double residual = 0.0;
  bool trivial = false;
  bool convex = true;
  double worst_second_difference = 0.0;
  double origin_slope = 0.0;
  bool flat_at_origin = true;

  bool accepted() const noexcept { return !trivial && convex && flat_at_origin; }
};

/// u = -v plus discrete convexity and u'(0) = 0 checks (second-order
/// one-sided slope). The residual is left at 0; callers that own an
/// operator fill it in.
SolutionPair to_solution(const Profile& v, const ProblemSpec& spec);

struct RadialDeterminant {
  /// det(D^2 u) at t_1..t_{M-1}.
  Eigen::VectorXd interior;
  /// Limit (u''(0))^N at the origin.
  double origin = 0.0;
};

/// det(D^2 u) = (u')^{N-1} u'' / r^{N-1} for a radial component sampled on
/// `mesh`, with central differences. At r = 0 the limit (u''(0))^N is used,
/// where u''(0) = 2(u_1 - u_0)/h^2 from evenness of u.
template <typename Derived>
RadialDeterminant hessian_det_radial(const Eigen::MatrixBase<Derived>& u, int N, const Mesh& mesh) {
  const int m = mesh.intervals();
  const double h = mesh.h();
  RadialDeterminant det;
  det.interior.resize(m - 1);
  for (int k = 1; k < m; ++k) {
    double t = mesh.node(k);
    double du = (u(k + 1) - u(k - 1)) / (2.0 * h);
    double d2u = (u(k + 1) - 2.0 * u(k) + u(k - 1)) / (h * h);
    det.interior(k - 1) = N == 1 ? d2u : std::pow(du / t, N - 1) * d2u;
  }
  det.origin = std::pow(2.0 * (u(1) - u(0)) / (h * h), N);
  return det;
}

struct DeterminantResidual {
  /// max_k |det_k - lambda f^i_k| / max_k |lambda f^i_k|, over interior
  /// nodes and all components.
  double relative = 0.0;
  double absolute = 0.0;
};

/// Compares hessian_det_radial(-v_i) with lambda f^i(v) on interior nodes.
DeterminantResidual determinant_residual(const Profile& v, const ProblemSpec& spec);

/// Evaluates F(i,k) = f^i(v(:,k)) on every node. Negative inputs are
/// rejected with std::domain_error.
Profile evaluate_rhs(const Profile& v, const ProblemSpec& spec);

/// CSV with header "t,v1,...,vn" and 17 significant digits.
void write_profile_csv(std::ostream& os, const Profile& v);
void write_profile_csv(const std::string& path, const Profile& v);

/// Reads a profile CSV. Throws std::runtime_error on malformed input or if
/// the t column is not the uniform mesh k/M.
Profile read_profile_csv(std::istream& is);
Profile read_profile_csv(const std::string& path);

}  // namespace radma
