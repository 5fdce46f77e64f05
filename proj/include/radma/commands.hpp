#pragma once

#include <iosfwd>
#include <string>

#include "radma/config.hpp"
#include "radma/model.hpp"

namespace radma {

enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_solver = 2 };

/// Checks applied to a candidate solution profile v = -u.
struct VerifyReport {
  ConeReport cone;
  bool nontrivial = false;
  bool convex = false;
  double worst_second_difference = 0.0;
  bool flat_at_origin = false;
  double origin_slope = 0.0;
  bool boundary_zero = false;
  double determinant_residual = 0.0;
  double determinant_tolerance = 0.0;
  double operator_residual = 0.0;
  double operator_tolerance = 0.0;

  bool passed() const noexcept;
};

/// Cone membership, discrete convexity of u, u'(0) = 0, v(1) = 0,
/// det residual <= 10 h (relative) and |T v - v| <= 10 h |v|.
VerifyReport verify_profile(const Profile& v, const ProblemSpec& spec);

void write_verify_report(std::ostream& os, const VerifyReport& report, const std::string& prefix);

// Command entry points. Reports go to `out`, diagnostics to `err`.
int run_solve(const Config& cfg, const std::string& out_dir, std::ostream& out, std::ostream& err);
int run_sweep(const Config& cfg, const std::string& out_file, std::ostream& out, std::ostream& err);
int run_verify(const Config& cfg, const std::string& solution_csv, std::ostream& out, std::ostream& err);
int run_gamma(int N, std::ostream& out, std::ostream& err);
int run_classify(const Config& cfg, std::ostream& out, std::ostream& err);
int run_envelope(const Config& cfg, double tmax, int points, std::ostream& out, std::ostream& err);

}  // namespace radma
