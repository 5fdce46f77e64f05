#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "radma/model.hpp"

using namespace radma;

namespace {

template <typename F>
Profile sample(int M, int n, F&& fn) {
  Profile v(n, M + 1);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k <= M; ++k) v(i, k) = fn(i, static_cast<double>(k) / M);
  }
  return v;
}

}  // namespace

TEST_CASE("mesh") {
  Mesh mesh(64);
  CHECK(mesh.nodes() == 65);
  CHECK(mesh.h() == 1.0 / 64);
  CHECK(mesh.node(mesh.quarter()) == 0.25);
  CHECK(mesh.node(mesh.three_quarter()) == 0.75);
  CHECK_THROWS(Mesh(8));
  CHECK_THROWS(Mesh(18));
}

TEST_CASE("problem spec validation") {
  CHECK_NOTHROW(make_spec(2, 0.5, {"(v1+v2)^1", "(v1+v2)^3"}));
  CHECK_THROWS(make_spec(0, 1.0, {"v1"}));
  CHECK_THROWS(make_spec(1, -1.0, {"v1"}));
  CHECK_THROWS(make_spec(1, 0.0, {"v1"}));
  CHECK_THROWS(make_spec(1, 1.0, {"v1"}, 30));
  CHECK_THROWS(make_spec(1, 1.0, {}));
  CHECK_THROWS(make_spec(1, 1.0, {"v2"}));
  ProblemSpec s = make_spec(1, 1.0, {"v1"}, 64);
  CHECK(s.with_lambda(3.0).lambda == 3.0);
  CHECK_THROWS(s.with_lambda(-1.0));
}

TEST_CASE("norm") {
  CHECK(norm(sample(64, 1, [](int, double t) { return 1 - t * t; })) == 1.0);
  CHECK(norm(Profile::Zero(2, 65)) == 0.0);
  Profile v = sample(64, 2, [](int i, double t) { return i == 0 ? 1 - t : 2 * (1 - t * t); });
  CHECK(norm(v) == 3.0);
  CHECK(norm(Profile(2.5 * v)) == doctest::Approx(2.5 * norm(v)).epsilon(1e-15));
}

TEST_CASE("cone check") {
  const int M = 64;
  SUBCASE("1 - t^2") {
    ConeReport r = cone_check(sample(M, 1, [](int, double t) { return 1 - t * t; }));
    CHECK(r.passed());
    CHECK(r.middle_min == doctest::Approx(7.0 / 16));
  }
  SUBCASE("1 - t is on the boundary") {
    ConeReport r = cone_check(sample(M, 1, [](int, double t) { return 1 - t; }));
    CHECK(r.passed());
    CHECK(r.slack == doctest::Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("spike fails") {
    ConeReport r = cone_check(sample(M, 1, [](int, double t) { return std::max(0.0, 1 - 4 * t); }));
    CHECK_FALSE(r.passed());
    CHECK_FALSE(r.quarter_bound);
  }
  SUBCASE("negative values fail") {
    ConeReport r = cone_check(sample(M, 1, [](int, double t) { return 0.5 - t; }));
    CHECK_FALSE(r.nonnegative);
  }
  SUBCASE("scaled parabolas always pass") {
    for (double c1 : {0.0, 0.1, 1.0, 7.0}) {
      for (double c2 : {0.0, 3.0, 1e-6}) {
        Profile v = sample(M, 2, [&](int i, double t) { return (i == 0 ? c1 : c2) * (1 - t * t); });
        CHECK(cone_check(v).passed());
      }
    }
  }
}

TEST_CASE("to_solution") {
  ProblemSpec spec = make_spec(1, 1.0, {"1"}, 256);
  SUBCASE("parabola") {
    SolutionPair p = to_solution(sample(256, 1, [](int, double t) { return (1 - t * t) / 2; }), spec);
    CHECK(p.accepted());
    CHECK(p.u(0, 0) == -0.5);
  }
  SUBCASE("zero is trivial") {
    SolutionPair p = to_solution(Profile::Zero(1, 257), spec);
    CHECK(p.trivial);
    CHECK_FALSE(p.accepted());
  }
  SUBCASE("cosine") {
    SolutionPair p = to_solution(sample(256, 1, [](int, double t) { return std::cos(std::numbers::pi * t / 2); }), spec);
    CHECK(p.accepted());
  }
  SUBCASE("cone shape is not flat at the origin") {
    SolutionPair p = to_solution(sample(256, 1, [](int, double t) { return 1 - t; }), spec);
    CHECK_FALSE(p.flat_at_origin);
  }
  SUBCASE("concave u rejected") {
    SolutionPair p = to_solution(sample(256, 1, [](int, double t) { return 1 - std::sqrt(t); }), spec);
    CHECK_FALSE(p.convex);
  }
}

TEST_CASE("radial Hessian determinant") {
  Mesh mesh(128);
  Eigen::VectorXd quad(129), quartic(129);
  for (int k = 0; k <= 128; ++k) {
    double r = mesh.node(k);
    quad(k) = r * r - 1;
    quartic(k) = (std::pow(r, 4) - 1) / 4;
  }
  RadialDeterminant d2 = hessian_det_radial(quad, 2, mesh);
  RadialDeterminant d3 = hessian_det_radial(quad, 3, mesh);
  CHECK(d2.interior.size() == 127);
  for (int k = 0; k < 127; ++k) {
    CHECK(d2.interior(k) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(d3.interior(k) == doctest::Approx(8.0).epsilon(1e-12));
  }
  CHECK(d2.origin == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(d3.origin == doctest::Approx(8.0).epsilon(1e-12));
  RadialDeterminant q = hessian_det_radial(quartic, 2, mesh);
  for (int k = 10; k < 127; ++k) {
    double r = mesh.node(k + 1);
    CHECK(q.interior(k) == doctest::Approx(3 * std::pow(r, 4)).epsilon(4 * mesh.h() * mesh.h() / (r * r)));
  }
}

TEST_CASE("determinant residual of the closed-form solution") {
  for (int N : {1, 2, 3}) {
    ProblemSpec spec = make_spec(N, 2.0, {"1"}, 512);
    double a = std::pow(2.0, 1.0 / N);
    Profile v = sample(512, 1, [&](int, double t) { return a * (1 - t * t) / 2; });
    CHECK(determinant_residual(v, spec).relative <= 1e-10);
  }
}

TEST_CASE("evaluate_rhs rejects negative input") {
  ProblemSpec spec = make_spec(1, 1.0, {"v1"}, 16);
  Profile v = Profile::Constant(1, 17, -1.0);
  CHECK_THROWS_AS(evaluate_rhs(v, spec), std::domain_error);
}

TEST_CASE("profile CSV round trip") {
  Profile v = sample(32, 3, [](int i, double t) { return (i + 1) * std::exp(-t) * (1 - t) / 3.0; });
  std::stringstream ss;
  write_profile_csv(ss, v);
  std::string text = ss.str();
  CHECK(text.rfind("t,v1,v2,v3\n", 0) == 0);
  Profile back = read_profile_csv(ss);
  REQUIRE(back.rows() == 3);
  REQUIRE(back.cols() == 33);
  CHECK((back.array() == v.array()).all());

  std::istringstream bad_t("t,v1\n0,1\n0.5,1\n0.6,1\n");
  CHECK_THROWS(read_profile_csv(bad_t));
  std::istringstream bad_num("t,v1\n0,abc\n");
  CHECK_THROWS(read_profile_csv(bad_num));
  std::istringstream bad_header("x,y\n0,1\n");
  CHECK_THROWS(read_profile_csv(bad_header));
}
