#include "radma/commands.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "radma/analysis.hpp"
#include "radma/fixed_point_operator.hpp"
#include "radma/solver.hpp"

namespace radma {

namespace {

std::string real(double x) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return buf.data();
}

const char* yes_no(bool b) { return b ? "true" : "false"; }

}  // namespace

bool VerifyReport::passed() const noexcept {
  return cone.passed() && nontrivial && convex && flat_at_origin && boundary_zero &&
         determinant_residual <= determinant_tolerance && operator_residual <= operator_tolerance;
}

VerifyReport verify_profile(const Profile& v, const ProblemSpec& spec) {
  if (v.rows() != spec.n || v.cols() != spec.M + 1) {
    throw std::invalid_argument("verify: profile shape " + std::to_string(v.rows()) + "x" +
                                std::to_string(v.cols()) + " does not match n x (M+1) = " +
                                std::to_string(spec.n) + "x" + std::to_string(spec.M + 1));
  }
  const double h = 1.0 / spec.M;
  VerifyReport r;
  r.cone = cone_check(v);
  SolutionPair pair = to_solution(v, spec);
  r.nontrivial = !pair.trivial;
  r.convex = pair.convex;
  r.worst_second_difference = pair.worst_second_difference;
  r.flat_at_origin = pair.flat_at_origin;
  r.origin_slope = pair.origin_slope;
  r.boundary_zero = (v.col(spec.M).array() == 0.0).all();
  r.determinant_tolerance = 10.0 * h;
  r.operator_tolerance = 10.0 * h * r.cone.norm;
  if (!r.cone.nonnegative) {
    r.determinant_residual = std::numeric_limits<double>::infinity();
    r.operator_residual = std::numeric_limits<double>::infinity();
    return r;
  }
  const Profile clamped = v.cwiseMax(0.0);
  try {
    r.determinant_residual = determinant_residual(clamped, spec).relative;
    r.operator_residual = residual(clamped, spec);
  } catch (const RangeError&) {
    r.determinant_residual = std::numeric_limits<double>::infinity();
    r.operator_residual = std::numeric_limits<double>::infinity();
  }
  return r;
}

void write_verify_report(std::ostream& os, const VerifyReport& r, const std::string& prefix) {
  os << prefix << "norm=" << real(r.cone.norm) << '\n';
  os << prefix << "cone=" << yes_no(r.cone.passed()) << '\n';
  os << prefix << "cone.middle_min=" << real(r.cone.middle_min) << '\n';
  os << prefix << "nontrivial=" << yes_no(r.nontrivial) << '\n';
  os << prefix << "convex=" << yes_no(r.convex) << '\n';
  os << prefix << "flat_at_origin=" << yes_no(r.flat_at_origin) << '\n';
  os << prefix << "origin_slope=" << real(r.origin_slope) << '\n';
  os << prefix << "boundary_zero=" << yes_no(r.boundary_zero) << '\n';
  os << prefix << "determinant_residual=" << real(r.determinant_residual) << '\n';
  os << prefix << "determinant_tolerance=" << real(r.determinant_tolerance) << '\n';
  os << prefix << "operator_residual=" << real(r.operator_residual) << '\n';
  os << prefix << "operator_tolerance=" << real(r.operator_tolerance) << '\n';
  os << prefix << "passed=" << yes_no(r.passed()) << '\n';
}

int run_solve(const Config& cfg, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  const ProblemSpec& spec = cfg.spec;
  std::vector<Solution> found;
  try {
    found = find_all_solutions(spec, cfg.window);
  } catch (const std::exception& e) {
    err << "solve: shooting failed: " << e.what() << '\n';
  }

  // Picard from the f = 1 profile, kept when it adds a new solution.
  Profile v0(spec.n, spec.M + 1);
  for (int k = 0; k <= spec.M; ++k) {
    double t = spec.mesh().node(k);
    v0.col(k).setConstant(0.5 * (1.0 - t * t));
  }
  PicardResult pr = picard(spec, v0, PicardOptions{cfg.tol, cfg.max_iter, 1.0});
  const double picard_norm = norm(pr.v);
  if (pr.converged() && picard_norm > 0.0 && cfg.window.contains(picard_norm)) {
    bool known = false;
    for (const Solution& s : found) known = known || std::abs(s.norm - picard_norm) <= 1e-4 * picard_norm;
    if (!known) {
      Solution s;
      s.alpha = pr.v.col(0);
      s.v = pr.v;
      s.norm = picard_norm;
      found.push_back(std::move(s));
    }
  }

  out << "lambda=" << real(spec.lambda) << '\n';
  out << "picard=" << (pr.converged() ? "converged" : pr.status == PicardStatus::diverged ? "diverged" : "max_iterations")
      << '\n';
  out << "picard.iterations=" << pr.iterations << '\n';
  out << "solutions=" << found.size() << '\n';
  if (found.empty()) {
    err << "solve: no nontrivial solution found in the search window\n";
    return exit_solver;
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    err << "solve: cannot create " << out_dir << ": " << ec.message() << '\n';
    return exit_validation;
  }
  bool all_passed = true;
  for (std::size_t j = 0; j < found.size(); ++j) {
    const std::string prefix = "solution." + std::to_string(j + 1) + ".";
    const std::string file = (std::filesystem::path(out_dir) / ("solution_" + std::to_string(j + 1) + ".csv")).string();
    write_profile_csv(file, found[j].v);
    out << prefix << "file=" << file << '\n';
    for (Eigen::Index i = 0; i < found[j].alpha.size(); ++i) {
      out << prefix << "alpha" << (i + 1) << '=' << real(found[j].alpha(i)) << '\n';
    }
    VerifyReport vr = verify_profile(found[j].v, spec);
    write_verify_report(out, vr, prefix);
    all_passed = all_passed && vr.passed();
  }
  if (!all_passed) {
    err << "solve: a solution failed verification\n";
    return exit_validation;
  }
  return exit_ok;
}

int run_sweep(const Config& cfg, const std::string& out_file, std::ostream& out, std::ostream& err) {
  std::vector<double> lambdas;
  try {
    lambdas = cfg.lambdas();
  } catch (const std::exception& e) {
    err << "sweep: " << e.what() << '\n';
    return exit_validation;
  }
  SweepTable table;
  try {
    table = sweep(cfg.spec, lambdas, cfg.window);
  } catch (const std::exception& e) {
    err << "sweep: " << e.what() << '\n';
    return exit_solver;
  }
  std::ofstream file(out_file);
  if (!file) {
    err << "sweep: cannot write " << out_file << '\n';
    return exit_validation;
  }
  write_sweep_csv(file, table);
  out << "rows=" << table.rows.size() << '\n';
  for (const auto& t : table.transitions()) {
    out << "transition=" << real(t.lambda_lo) << ',' << real(t.lambda_hi) << ',' << t.count_lo << ','
        << t.count_hi << '\n';
  }
  return exit_ok;
}

int run_verify(const Config& cfg, const std::string& solution_csv, std::ostream& out, std::ostream& err) {
  Profile v;
  try {
    v = read_profile_csv(solution_csv);
  } catch (const std::exception& e) {
    err << "verify: " << e.what() << '\n';
    return exit_validation;
  }
  VerifyReport r;
  try {
    r = verify_profile(v, cfg.spec);
  } catch (const std::exception& e) {
    err << "verify: " << e.what() << '\n';
    return exit_validation;
  }
  write_verify_report(out, r, "");
  if (!r.passed()) {
    err << "verify: solution rejected\n";
    return exit_validation;
  }
  return exit_ok;
}

int run_gamma(int N, std::ostream& out, std::ostream& err) {
  if (N < 1) {
    err << "gamma: N must be >= 1\n";
    return exit_validation;
  }
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.12g", gamma(N));
  out << buf.data() << '\n';
  return exit_ok;
}

int run_classify(const Config& cfg, std::ostream& out, std::ostream& err) {
  try {
    write_classify_report(out, classify(cfg.spec));
  } catch (const std::exception& e) {
    err << "classify: " << e.what() << '\n';
    return exit_validation;
  }
  return exit_ok;
}

int run_envelope(const Config& cfg, double tmax, int points, std::ostream& out, std::ostream& err) {
  if (!(tmax > 0.0) || !std::isfinite(tmax) || points < 1) {
    err << "envelope: need tmax > 0 and points >= 1\n";
    return exit_validation;
  }
  std::vector<double> ts(static_cast<std::size_t>(points) + 1);
  for (int k = 0; k <= points; ++k) ts[static_cast<std::size_t>(k)] = tmax * k / points;
  std::vector<std::vector<double>> curves;
  for (const Expr& f : cfg.spec.f) curves.push_back(hat_envelope_curve(f, ts, cfg.spec.n));
  out << 't';
  for (int i = 1; i <= cfg.spec.n; ++i) out << ",fhat" << i;
  out << '\n';
  for (std::size_t k = 0; k < ts.size(); ++k) {
    out << real(ts[k]);
    for (const auto& c : curves) out << ',' << real(c[k]);
    out << '\n';
  }
  return exit_ok;
}

}  // namespace radma
