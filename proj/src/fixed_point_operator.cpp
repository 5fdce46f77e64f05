#include "radma/fixed_point_operator.hpp"

#include <stdexcept>

namespace radma {

InnerWeights inner_weights(const Mesh& mesh, int N) {
  const int m = mesh.intervals();
  const double h = mesh.h();
  InnerWeights w;
  w.left = Eigen::VectorXd::Zero(m + 1);
  w.right = Eigen::VectorXd::Zero(m + 1);
  // With tau = a + h s, N tau^{N-1} = N sum_j C(N-1, j) a^{N-1-j} h^j s^j.
  // Integrating against (1 - s) and s keeps every term positive.
  for (int k = 1; k <= m; ++k) {
    const double a = mesh.node(k - 1);
    double left = 0.0;
    double right = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= N - 1; ++j) {
      double term = binom * std::pow(a, N - 1 - j) * std::pow(h, j);
      right += term / (j + 2);
      left += term * (1.0 / (j + 1) - 1.0 / (j + 2));
      binom = binom * (N - 1 - j) / (j + 1);
    }
    w.left(k) = N * h * left;
    w.right(k) = N * h * right;
  }
  return w;
}

namespace {

Eigen::VectorXd accumulate_row(const Eigen::Ref<const Eigen::RowVectorXd>& rhs, const InnerWeights& weights,
                               double lambda) {
  const Eigen::Index nodes = rhs.size();
  Eigen::VectorXd w(nodes);
  double unit = 0.0;
  w(0) = 0.0;
  for (Eigen::Index k = 1; k < nodes; ++k) {
    unit += weights.left(k) * rhs(k - 1) + weights.right(k) * rhs(k);
    w(k) = lambda * unit;
  }
  return w;
}

}  // namespace

Eigen::VectorXd inner_accumulate(const Profile& v, int i, const ProblemSpec& spec) {
  if (i < 0 || i >= spec.n) throw std::out_of_range("inner_accumulate: component index");
  const Mesh mesh = spec.mesh();
  if (v.cols() != mesh.nodes()) throw std::invalid_argument("inner_accumulate: profile/mesh size mismatch");
  Profile rhs = evaluate_rhs(v, spec);
  return accumulate_row(rhs.row(i), inner_weights(mesh, spec.N), spec.lambda);
}

Profile apply_operator_rhs(const Profile& rhs, const ProblemSpec& spec) {
  const Mesh mesh = spec.mesh();
  const int m = mesh.intervals();
  const double half_h = 0.5 * mesh.h();
  const InnerWeights weights = inner_weights(mesh, spec.N);
  const PowerMap phi{spec.N};
  Profile out(spec.n, m + 1);
  for (int i = 0; i < spec.n; ++i) {
    Eigen::VectorXd w = accumulate_row(rhs.row(i), weights, spec.lambda);
    Eigen::VectorXd slope(m + 1);
    for (int k = 0; k <= m; ++k) slope(k) = phi.inverse(std::max(w(k), 0.0));
    out(i, m) = 0.0;
    for (int k = m - 1; k >= 0; --k) out(i, k) = out(i, k + 1) + half_h * (slope(k) + slope(k + 1));
  }
  return out;
}

Profile apply_operator(const Profile& v, const ProblemSpec& spec) {
  const Mesh mesh = spec.mesh();
  if (v.rows() != spec.n || v.cols() != mesh.nodes()) {
    throw std::invalid_argument("apply_operator: profile shape does not match spec");
  }
  return apply_operator_rhs(evaluate_rhs(v, spec), spec);
}

double residual(const Profile& v, const ProblemSpec& spec) {
  Profile tv = apply_operator(v, spec);
  return norm(tv - v);
}

}  // namespace radma
