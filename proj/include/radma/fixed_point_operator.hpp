#pragma once

#include <Eigen/Core>

#include "radma/model.hpp"

namespace radma {

/// phi(t) = t^N and its inverse t^{1/N} on [0, inf).
struct PowerMap {
  int N = 1;

  double forward(double t) const {
    switch (N) {
      case 1: return t;
      case 2: return t * t;
      case 3: return t * t * t;
      default: return std::pow(t, N);
    }
  }

  double inverse(double t) const {
    switch (N) {
      case 1: return t;
      case 2: return std::sqrt(t);
      case 3: return std::cbrt(t);
      default: return std::pow(t, 1.0 / N);
    }
  }
};

/// Per-cell weights of the product trapezoid rule for the weight N tau^{N-1}:
/// integral over [t_{k-1}, t_k] of N tau^{N-1} g(tau) is approximated by
/// left(k) g(t_{k-1}) + right(k) g(t_k), exact for piecewise linear g.
/// Entries are indexed by the right cell end k = 1..M; index 0 is unused.
struct InnerWeights {
  Eigen::VectorXd left;
  Eigen::VectorXd right;
};

InnerWeights inner_weights(const Mesh& mesh, int N);

/// w(t_k) = lambda * integral_0^{t_k} N tau^{N-1} f^i(v(tau)) dtau.
Eigen::VectorXd inner_accumulate(const Profile& v, int i, const ProblemSpec& spec);

/// Discrete T_lambda: component i is the right-anchored trapezoid sum of
/// phi^{-1}(w_i) from t to 1, so (T v)_i(1) = 0 exactly.
Profile apply_operator(const Profile& v, const ProblemSpec& spec);

/// Same as apply_operator with precomputed right-hand side F(i,k) = f^i(v(t_k)).
Profile apply_operator_rhs(const Profile& rhs, const ProblemSpec& spec);

/// norm(T v - v).
double residual(const Profile& v, const ProblemSpec& spec);

}  // namespace radma
