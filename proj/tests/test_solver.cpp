#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "radma/fixed_point_operator.hpp"
#include "radma/solver.hpp"

using namespace radma;

namespace {

const double kPi2over4 = std::numbers::pi * std::numbers::pi / 4;

Profile parabola(int n, int M, double c) {
  Profile v(n, M + 1);
  for (int k = 0; k <= M; ++k) {
    double t = static_cast<double>(k) / M;
    v.col(k).setConstant(c * (1 - t * t));
  }
  return v;
}

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("picard on constant f converges at once") {
  for (int N = 1; N <= 3; ++N) {
    ProblemSpec spec = make_spec(N, 2.0, {"1"}, 512);
    PicardResult r = picard(spec, parabola(1, 512, 3.0));
    REQUIRE(r.converged());
    CHECK(r.iterations <= 2);
    CHECK(r.v(0, 0) == doctest::Approx(std::pow(2.0, 1.0 / N) / 2).epsilon(1e-6));
  }
}

TEST_CASE("picard from the trivial fixed point") {
  ProblemSpec spec = make_spec(1, 1.0, {"v1^2"}, 256);
  PicardResult r = picard(spec, Profile::Zero(1, 257));
  CHECK(r.converged());
  CHECK(r.iterations == 0);
  CHECK(norm(r.v) == 0.0);
}

TEST_CASE("picard cannot reach the unstable superlinear solution") {
  // f = v^2, N = 1: the nontrivial fixed point repels Picard iterates.
  ProblemSpec spec = make_spec(1, 1.0, {"v1^2"}, 2048);
  std::vector<Solution> shot = find_solutions_scalar(spec, SearchWindow{1e-6, 100.0});
  REQUIRE(shot.size() == 1);
  for (double damping : {1.0, 0.5}) {
    PicardResult r = picard(spec, parabola(1, 2048, 2.0), PicardOptions{1e-10, 500, damping});
    bool at_nontrivial = r.converged() && std::abs(r.v(0, 0) - shot[0].alpha(0)) < 1e-3;
    CHECK_FALSE(at_nontrivial);
  }
  // the shooting solution is nevertheless a discrete fixed point of T
  CHECK(residual(shot[0].v, spec) <= 10.0 / 2048 * shot[0].norm);
}

TEST_CASE("picard and shooting agree on a sublinear problem") {
  const double tol = 1e-10;
  for (int N : {1, 2}) {
    ProblemSpec spec = make_spec(N, 1.5, {"v1^0.5"}, 2048);
    PicardResult r = picard(spec, parabola(1, 2048, 2.0), PicardOptions{tol, 500, 1.0});
    REQUIRE(r.converged());
    std::vector<Solution> shot = find_solutions_scalar(spec, SearchWindow{});
    REQUIRE(shot.size() == 1);
    double h = 1.0 / 2048;
    CHECK(std::abs(r.v(0, 0) - shot[0].alpha(0)) <= 100 * tol + 10 * h * h);
    CHECK((r.v - shot[0].v).cwiseAbs().maxCoeff() <= 100 * tol + 10 * h * h);
    CHECK(residual(shot[0].v, spec) <= 10 * h * shot[0].norm);
  }
}

TEST_CASE("picard reports divergence") {
  ProblemSpec spec = make_spec(1, 50.0, {"exp(v1)"}, 256);
  PicardResult r = picard(spec, parabola(1, 256, 1.0));
  CHECK_FALSE(r.converged());
  CHECK(r.status == PicardStatus::diverged);
  CHECK(r.residuals.size() >= static_cast<std::size_t>(r.iterations));
}

TEST_CASE("shooting") {
  SUBCASE("eigenfunction") {
    ProblemSpec spec = make_spec(1, kPi2over4, {"v1"}, 2048);
    ShootResult r = shoot(spec, vec({1.0}));
    CHECK(std::abs(r.boundary(0)) <= 1e-4);
    for (int k = 0; k <= 2048; ++k) {
      CHECK(r.trajectory(0, k) == doctest::Approx(std::cos(std::numbers::pi * k / 4096.0)).epsilon(1e-6));
    }
  }
  SUBCASE("constant f") {
    for (int N = 1; N <= 3; ++N) {
      ProblemSpec spec = make_spec(N, 3.0, {"1"}, 2048);
      CHECK(std::abs(shoot_boundary(spec, vec({std::pow(3.0, 1.0 / N) / 2}))(0)) <= 1e-8);
    }
  }
  SUBCASE("trivial amplitude") {
    ProblemSpec spec = make_spec(2, 1.0, {"v1^3"}, 256);
    ShootResult r = shoot(spec, vec({0.0}));
    CHECK(r.boundary(0) == 0.0);
    CHECK(r.trajectory.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("trajectories are nonincreasing") {
    ProblemSpec spec = make_spec(2, 1.0, {"(v1+v2)^1", "(v1+v2)^3"}, 512);
    ShootResult r = shoot(spec, vec({0.7, 0.4}));
    for (int i = 0; i < 2; ++i) {
      for (int k = 1; k <= 512; ++k) CHECK(r.trajectory(i, k) <= r.trajectory(i, k - 1));
    }
    CHECK(r.boundary(0) == r.trajectory(0, 512));
  }
}

TEST_CASE("scalar solution search") {
  SearchWindow window{1e-6, 100.0};
  CHECK(find_solutions_scalar(make_spec(1, 1.0, {"v1"}), window).empty());

  std::vector<Solution> one = find_solutions_scalar(make_spec(1, 1.0, {"1"}), window);
  REQUIRE(one.size() == 1);
  CHECK(one[0].alpha(0) == doctest::Approx(0.5).epsilon(1e-8));

  std::vector<Solution> sq1 = find_solutions_scalar(make_spec(1, 1.0, {"v1^2"}), window);
  std::vector<Solution> sq4 = find_solutions_scalar(make_spec(1, 4.0, {"v1^2"}), window);
  REQUIRE(sq1.size() == 1);
  REQUIRE(sq4.size() == 1);
  CHECK(sq4[0].alpha(0) == doctest::Approx(sq1[0].alpha(0) / 4).epsilon(1e-8));
  CHECK(sq1[0].v(0, 2048) == 0.0);
  CHECK(sq1[0].norm == doctest::Approx(sq1[0].alpha(0)).epsilon(1e-6));
}

TEST_CASE("scaling law for pure powers") {
  struct Case {
    int N;
    double p;
  };
  for (Case c : {Case{1, 2.0}, Case{1, 0.5}, Case{2, 3.0}, Case{2, 1.0}}) {
    std::string f = "v1^" + std::to_string(c.p);
    std::vector<Solution> base = find_solutions_scalar(make_spec(c.N, 1.0, {f}), SearchWindow{});
    REQUIRE(base.size() == 1);
    for (double lambda : {0.1, 0.3, 3.0, 10.0}) {
      std::vector<Solution> s = find_solutions_scalar(make_spec(c.N, lambda, {f}), SearchWindow{1e-8, 1e4});
      REQUIRE(s.size() == 1);
      double expect = base[0].alpha(0) * std::pow(lambda, -1.0 / (c.p - c.N));
      CHECK(s[0].alpha(0) == doctest::Approx(expect).epsilon(0.01));
    }
  }
}

TEST_CASE("system Newton") {
  SUBCASE("symmetric problem has a symmetric solution") {
    ProblemSpec spec = make_spec(2, 1.0, {"(v1+v2)^3", "(v1+v2)^3"}, 1024);
    SystemResult r = find_solutions_system(spec, vec({0.5, 0.5}));
    REQUIRE(r.converged);
    CHECK(r.solution.alpha(0) == doctest::Approx(r.solution.alpha(1)).epsilon(1e-8));
    Eigen::VectorXd swapped = vec({r.solution.alpha(1), r.solution.alpha(0)});
    CHECK(shoot_boundary(spec, swapped).cwiseAbs().maxCoeff() <= 1e-8);
  }
  SUBCASE("trivial start is rejected") {
    ProblemSpec spec = make_spec(2, 1.0, {"(v1+v2)^3", "(v1+v2)^3"}, 256);
    SystemResult r = find_solutions_system(spec, vec({0.0, 0.0}));
    CHECK_FALSE(r.converged);
    CHECK_FALSE(r.failure.empty());
  }
  SUBCASE("two seeds give two solutions at small lambda") {
    ProblemSpec spec = make_spec(2, 0.05, {"(v1+v2)^1", "(v1+v2)^3"}, 1024);
    SystemResult lo = find_solutions_system(spec, vec({0.01, 0.0}));
    SystemResult hi = find_solutions_system(spec, vec({1.2, 170.0}));
    REQUIRE(lo.converged);
    REQUIRE(hi.converged);
    CHECK(hi.solution.norm > 10 * lo.solution.norm);
    for (const SystemResult* r : {&lo, &hi}) {
      CHECK(r->solution.alpha.minCoeff() > 0.0);
      CHECK(shoot_boundary(spec, r->solution.alpha).cwiseAbs().sum() <= 1e-9 * std::max(1.0, r->solution.alpha.sum()));
    }
  }
}

TEST_CASE("sweeps") {
  SUBCASE("constant f has one solution everywhere") {
    SweepTable t = sweep(make_spec(2, 1.0, {"1"}, 256), lambda_grid(0.1, 10, 6, true), SearchWindow{});
    REQUIRE(t.rows.size() >= 6);
    for (const SweepRow& row : t.rows) CHECK(row.count() == 1);
    CHECK(t.transitions().empty());
  }
  SUBCASE("linear problem: only at the eigenvalue") {
    SweepTable t = sweep(make_spec(1, 1.0, {"v1"}, 2048), lambda_grid(0.5, 10, 12, true), SearchWindow{});
    int nonzero = 0;
    for (const SweepRow& row : t.rows) {
      if (row.count() == 0) continue;
      ++nonzero;
      CHECK(row.located);
      CHECK(row.lambda == doctest::Approx(kPi2over4).epsilon(1e-6));
    }
    CHECK(nonzero == 1);
  }
}

TEST_CASE("parameter location") {
  ProblemSpec spec = make_spec(1, 1.0, {"v1"}, 2048);
  std::optional<double> lam = locate_parameter(spec, 1.0, 1.0, 4.0);
  REQUIRE(lam.has_value());
  CHECK(*lam == doctest::Approx(kPi2over4).epsilon(1e-6));
  CHECK_FALSE(locate_parameter(spec, 1.0, 3.0, 4.0).has_value());
}

TEST_CASE("deduplication keeps the lower representative") {
  auto make = [](double a, double n) {
    Solution s;
    s.alpha = vec({a});
    s.norm = n;
    return s;
  };
  std::vector<Solution> out = deduplicate({make(2.0, 1.0 + 1e-8), make(1.0, 1.0), make(5.0, 5.0)});
  REQUIRE(out.size() == 2);
  CHECK(out[0].alpha(0) == 1.0);
  CHECK(out[1].norm == 5.0);
}

TEST_CASE("lambda grid and sweep CSV") {
  std::vector<double> g = lambda_grid(0.01, 10, 4, true);
  REQUIRE(g.size() == 4);
  CHECK(g[1] == doctest::Approx(0.1));
  CHECK(g[3] == 10.0);
  std::vector<double> l = lambda_grid(1, 2, 3, false);
  CHECK(l[1] == 1.5);
  CHECK_THROWS(lambda_grid(0, 1, 4, true));
  CHECK_THROWS(lambda_grid(1, 2, 1, true));

  SweepTable t;
  t.rows.push_back(SweepRow{0.5, {}, {}, false});
  t.rows.push_back(SweepRow{1.0, {0.25, 2.0}, {}, false});
  std::ostringstream os;
  write_sweep_csv(os, t);
  CHECK(os.str() == "lambda,count,norm_1,norm_2\n0.5,0,,\n1,2,0.25,2\n");
  auto tr = t.transitions();
  REQUIRE(tr.size() == 1);
  CHECK(tr[0].count_lo == 0);
  CHECK(tr[0].count_hi == 2);
}
