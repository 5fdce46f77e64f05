#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "radma/commands.hpp"
#include "radma/config.hpp"

using namespace radma;
namespace fs = std::filesystem;

namespace {

Config from_text(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

std::string config_error(const std::string& text) {
  try {
    from_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "radma_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kExample1 =
    "# two components\n"
    "N=2\n"
    "n=2\n"
    "lambda=0.5\n"
    "f1=(v1+v2)^1\n"
    "f2=(v1+v2)^3   # trailing comment\n"
    "M=512\n";

}  // namespace

TEST_CASE("config parsing") {
  Config c = from_text(kExample1);
  CHECK(c.spec.N == 2);
  CHECK(c.spec.n == 2);
  CHECK(c.spec.lambda == 0.5);
  CHECK(c.spec.M == 512);
  CHECK(c.spec.f[1].to_string() == parse("(v1+v2)^3", 2).to_string());

  Config d = from_text("N=1\nn=1\nlambda=1\nf1=v1\n");
  CHECK(d.spec.M == 2048);
  CHECK(d.tol == 1e-10);
  CHECK(d.max_iter == 500);
  CHECK(d.window.r_lo == 1e-6);
  CHECK(d.window.r_hi == 1e3);
  CHECK(d.geometric);
  CHECK(d.points == 64);
  CHECK_FALSE(d.lambda_min.has_value());
  CHECK_THROWS_AS(d.lambdas(), ConfigError);

  Config s = from_text("N=1\nn=1\nlambda=1\nf1=v1\nlambda_min=1\nlambda_max=3\npoints=3\nspacing=linear\n");
  CHECK(s.lambdas() == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("config errors") {
  CHECK(config_error("N=2\nn=2\nlambda=0.5\nf1=v1\n").find("f2") != std::string::npos);
  CHECK(config_error("N=1\nn=1\nlambda=1\n").find("f1") != std::string::npos);
  CHECK(config_error("N=1\nn=1\nf1=v1\n").find("lambda") != std::string::npos);
  CHECK_FALSE(config_error("N=1\nn=1\nlambda=-1\nf1=v1\n").empty());
  CHECK(config_error("N=1\nn=1\nlambda=1\nf1=v1+\n").find("line 4") != std::string::npos);
  CHECK(config_error("N=1\nn=1\nlambda=abc\nf1=v1\n").find("line 3") != std::string::npos);
  CHECK(config_error("N=1\n\nbogus\n").find("line 3") != std::string::npos);
  CHECK(config_error("N=1\nn=1\nlambda=1\nf1=v1\ncolour=red\n").find("line 5") != std::string::npos);
  CHECK(config_error("N=1\nN=2\n").find("duplicate") != std::string::npos);
  CHECK(config_error("N=1\nn=1\nlambda=1\nf1=v1\nf2=v1\n").find("f2") != std::string::npos);
  CHECK(config_error("N=1\nn=1\nlambda=1\nf1=v2\n").find("line 4") != std::string::npos);
  CHECK_FALSE(config_error("N=1\nn=1\nlambda=1\nf1=v1\nM=30\n").empty());
  CHECK_FALSE(config_error("N=1\nn=1\nlambda=1\nf1=v1\nspacing=log\n").empty());
  CHECK_FALSE(config_error("N=1\nn=1\nlambda=1\nf1=v1\nlambda_min=2\nlambda_max=1\n").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/radma.cfg"), ConfigError);
}

TEST_CASE("gamma command") {
  std::ostringstream out, err;
  CHECK(run_gamma(1, out, err) == exit_ok);
  CHECK(out.str() == "0.03125\n");
  std::ostringstream out2;
  CHECK(run_gamma(0, out2, err) == exit_validation);
}

TEST_CASE("classify command") {
  Config c = from_text("N=2\nn=2\nlambda=0.1\nf1=exp(v1+v2)\nf2=1\nM=64\n");
  std::ostringstream out, err;
  CHECK(run_classify(c, out, err) == exit_ok);
  CHECK(out.str().find("regime.2d=holds") != std::string::npos);
  CHECK(out.str().find("regime.2f=holds") != std::string::npos);
  CHECK(out.str().find("lambda0.2f=") != std::string::npos);
}

TEST_CASE("sweep command on the linear problem") {
  fs::path dir = scratch("sweep");
  Config c = from_text("N=1\nn=1\nlambda=1\nf1=v1\nlambda_min=0.5\nlambda_max=20\npoints=16\n");
  std::ostringstream out, err;
  REQUIRE(run_sweep(c, (dir / "s.csv").string(), out, err) == exit_ok);
  std::istringstream csv(slurp(dir / "s.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "lambda,count,norm_1");
  double prev = 0.0, lo = 0.0, hi = 0.0;
  int nonzero = 0;
  bool after = false;
  while (std::getline(csv, line)) {
    double lam = std::stod(line.substr(0, line.find(',')));
    int count = std::stoi(line.substr(line.find(',') + 1));
    if (after && hi == 0.0) hi = lam;
    if (count > 0) {
      ++nonzero;
      lo = prev;
      after = true;
    }
    prev = lam;
  }
  CHECK(nonzero == 1);
  CHECK(lo < 2.4674);
  CHECK(hi > 2.4674);

  std::ostringstream out2;
  Config no_grid = from_text("N=1\nn=1\nlambda=1\nf1=v1\n");
  CHECK(run_sweep(no_grid, (dir / "t.csv").string(), out2, err) == exit_validation);
}

TEST_CASE("solve writes solutions that pass verify, deterministically") {
  Config c = from_text(kExample1);
  fs::path a = scratch("solve_a");
  fs::path b = scratch("solve_b");
  std::ostringstream out_a, out_b, err;
  REQUIRE(run_solve(c, a.string(), out_a, err) == exit_ok);
  REQUIRE(run_solve(c, b.string(), out_b, err) == exit_ok);
  CHECK(out_a.str().find("solutions=2") != std::string::npos);
  for (const char* name : {"solution_1.csv", "solution_2.csv"}) {
    REQUIRE(fs::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
    std::ostringstream vout, verr;
    CHECK(run_verify(c, (a / name).string(), vout, verr) == exit_ok);
    CHECK(vout.str().find("passed=true") != std::string::npos);
  }
}

TEST_CASE("verify rejects bad profiles") {
  fs::path dir = scratch("verify");
  Config c = from_text("N=1\nn=1\nlambda=2\nf1=1\nM=64\n");
  std::ostringstream out, err;
  REQUIRE(run_solve(c, dir.string(), out, err) == exit_ok);
  Profile v = read_profile_csv((dir / "solution_1.csv").string());

  Profile scaled = 1.5 * v;
  write_profile_csv((dir / "scaled.csv").string(), scaled);
  std::ostringstream o1, e1;
  CHECK(run_verify(c, (dir / "scaled.csv").string(), o1, e1) == exit_validation);
  CHECK(o1.str().find("passed=false") != std::string::npos);

  Config wrong_m = from_text("N=1\nn=1\nlambda=2\nf1=1\nM=128\n");
  std::ostringstream o2, e2;
  CHECK(run_verify(wrong_m, (dir / "solution_1.csv").string(), o2, e2) == exit_validation);

  std::ostringstream o3, e3;
  CHECK(run_verify(c, (dir / "missing.csv").string(), o3, e3) == exit_validation);
}

TEST_CASE("solve reports solver failure") {
  fs::path dir = scratch("fail");
  Config c = from_text("N=1\nn=1\nlambda=1\nf1=v1\nM=256\n");
  std::ostringstream out, err;
  CHECK(run_solve(c, dir.string(), out, err) == exit_solver);
  CHECK_FALSE(err.str().empty());
}

TEST_CASE("envelope command") {
  Config c = from_text("N=2\nn=2\nlambda=1\nf1=v1*v2\nf2=(v1+v2)^2\nM=64\n");
  std::ostringstream out, err;
  REQUIRE(run_envelope(c, 2.0, 4, out, err) == exit_ok);
  std::istringstream is(out.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,fhat1,fhat2");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 5);
  CHECK(out.str().find("\n2,1,4\n") != std::string::npos);
  std::ostringstream o2;
  CHECK(run_envelope(c, -1.0, 4, o2, err) == exit_validation);
}
