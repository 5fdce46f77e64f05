#include "radma/model.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace radma {

Mesh::Mesh(int intervals) : m_(intervals) {
  if (intervals < 16) throw std::invalid_argument("mesh: M must be >= 16");
  if (intervals % 4 != 0) throw std::invalid_argument("mesh: M must be divisible by 4");
}

Eigen::VectorXd Mesh::points() const {
  Eigen::VectorXd t(nodes());
  for (int k = 0; k <= m_; ++k) t(k) = node(k);
  return t;
}

void ProblemSpec::validate() const {
  if (N < 1) throw std::invalid_argument("spec: N must be >= 1");
  if (n < 1) throw std::invalid_argument("spec: n must be >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("spec: lambda must be > 0");
  if (M < 16 || M % 4 != 0) throw std::invalid_argument("spec: M must be >= 16 and divisible by 4");
  if (static_cast<int>(f.size()) != n) {
    throw std::invalid_argument("spec: expected " + std::to_string(n) + " nonlinearities, got " +
                                std::to_string(f.size()));
  }
  for (const Expr& e : f) {
    if (e.empty() || e.arity() != n) throw std::invalid_argument("spec: nonlinearity arity mismatch");
  }
}

ProblemSpec ProblemSpec::with_lambda(double new_lambda) const {
  ProblemSpec copy = *this;
  copy.lambda = new_lambda;
  copy.validate();
  return copy;
}

ProblemSpec make_spec(int N, double lambda, const std::vector<std::string>& f, int M) {
  ProblemSpec spec;
  spec.N = N;
  spec.n = static_cast<int>(f.size());
  spec.lambda = lambda;
  spec.M = M;
  for (const std::string& text : f) spec.f.push_back(parse(text, spec.n));
  spec.validate();
  return spec;
}

double default_cone_tolerance(const Profile& v) {
  if (v.cols() < 2) return 0.0;
  double h = 1.0 / static_cast<double>(v.cols() - 1);
  return 10.0 * h * norm(v);
}

ConeReport cone_check(const Profile& v, double tol) {
  ConeReport r;
  const Eigen::Index nodes = v.cols();
  const int m = static_cast<int>(nodes - 1);
  if (m < 4 || m % 4 != 0) throw std::invalid_argument("cone_check: node count must be M+1 with 4 | M");
  const double h = 1.0 / m;
  r.tolerance = tol;
  r.norm = norm(v);

  r.min_negative = std::min(0.0, v.minCoeff());
  r.nonnegative = r.min_negative >= -tol;

  Eigen::VectorXd sums = v.colwise().sum().transpose();
  r.middle_min = sums.segment(m / 4, m / 2 + 1).minCoeff();
  r.slack = r.middle_min - 0.25 * r.norm;
  r.quarter_bound = r.slack >= -tol;

  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    auto row = v.row(i);
    bool concave = true;
    for (int k = 1; k < m && concave; ++k) {
      concave = row(k + 1) - 2.0 * row(k) + row(k - 1) <= tol * h * h;
    }
    for (int k = 1; k <= m; ++k) {
      if (row(k) > row(k - 1) + tol * h) r.monotone = false;
    }
    if (std::abs(row(m)) > tol) r.monotone = false;
    if (!concave) continue;
    ++r.concavity_checked;
    double peak = row.maxCoeff();
    for (int k = 0; k <= m; ++k) {
      double t = k * h;
      double gap = row(k) - std::min(t, 1.0 - t) * peak;
      r.concavity_worst = std::min(r.concavity_worst, gap);
    }
  }
  r.concavity_bound = r.concavity_worst >= -tol;
  return r;
}

SolutionPair to_solution(const Profile& v, const ProblemSpec& spec) {
  const Mesh mesh = spec.mesh();
  if (v.rows() != spec.n || v.cols() != mesh.nodes()) {
    throw std::invalid_argument("to_solution: profile shape does not match spec");
  }
  const int m = mesh.intervals();
  const double h = mesh.h();
  SolutionPair pair;
  pair.v = v;
  pair.u = -v;
  pair.lambda = spec.lambda;
  const double size = norm(v);
  pair.trivial = size == 0.0;
  const double tol = 10.0 * h * size;
  for (int i = 0; i < spec.n; ++i) {
    auto u = pair.u.row(i);
    for (int k = 1; k < m; ++k) {
      double d2 = (u(k + 1) - 2.0 * u(k) + u(k - 1)) / (h * h);
      pair.worst_second_difference = std::min(pair.worst_second_difference, d2);
    }
    double slope = (-3.0 * u(0) + 4.0 * u(1) - u(2)) / (2.0 * h);
    if (std::abs(slope) > std::abs(pair.origin_slope)) pair.origin_slope = slope;
  }
  pair.convex = pair.worst_second_difference >= -tol;
  pair.flat_at_origin = std::abs(pair.origin_slope) <= tol;
  return pair;
}

Profile evaluate_rhs(const Profile& v, const ProblemSpec& spec) {
  if (v.rows() != spec.n) throw std::invalid_argument("evaluate_rhs: component count mismatch");
  if (v.size() > 0 && v.minCoeff() < 0.0) throw std::domain_error("evaluate_rhs: profile has negative values");
  Profile out(v.rows(), v.cols());
  std::vector<double> x(static_cast<std::size_t>(spec.n));
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    for (int i = 0; i < spec.n; ++i) x[static_cast<std::size_t>(i)] = v(i, k);
    for (int i = 0; i < spec.n; ++i) out(i, k) = spec.f[static_cast<std::size_t>(i)].eval(x);
  }
  return out;
}

DeterminantResidual determinant_residual(const Profile& v, const ProblemSpec& spec) {
  const Mesh mesh = spec.mesh();
  const int m = mesh.intervals();
  Profile rhs = spec.lambda * evaluate_rhs(v, spec);
  Profile u = -v;
  DeterminantResidual res;
  double scale = 0.0;
  for (int i = 0; i < spec.n; ++i) {
    RadialDeterminant det = hessian_det_radial(u.row(i), spec.N, mesh);
    for (int k = 1; k < m; ++k) {
      res.absolute = std::max(res.absolute, std::abs(det.interior(k - 1) - rhs(i, k)));
      scale = std::max(scale, std::abs(rhs(i, k)));
    }
  }
  res.relative = scale > 0.0 ? res.absolute / scale : res.absolute;
  return res;
}

namespace {

std::string format17(double x) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return buf.data();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void write_profile_csv(std::ostream& os, const Profile& v) {
  const Eigen::Index m = v.cols() - 1;
  os << 't';
  for (Eigen::Index i = 0; i < v.rows(); ++i) os << ",v" << (i + 1);
  os << '\n';
  for (Eigen::Index k = 0; k <= m; ++k) {
    os << format17(static_cast<double>(k) / static_cast<double>(m));
    for (Eigen::Index i = 0; i < v.rows(); ++i) os << ',' << format17(v(i, k));
    os << '\n';
  }
}

void write_profile_csv(const std::string& path, const Profile& v) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_profile_csv(os, v);
}

Profile read_profile_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("profile csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_csv(line);
  if (header.size() < 2 || header[0] != "t") throw std::runtime_error("profile csv: header must be t,v1,...,vn");
  const std::size_t n = header.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (header[i + 1] != "v" + std::to_string(i + 1)) {
      throw std::runtime_error("profile csv: bad header column '" + header[i + 1] + "'");
    }
  }
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = split_csv(line);
    if (cells.size() != n + 1) throw std::runtime_error("profile csv: wrong column count on line " + std::to_string(line_no));
    std::vector<double> row;
    for (const std::string& c : cells) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != c.size() || c.empty()) throw std::runtime_error("profile csv: bad number on line " + std::to_string(line_no));
      row.push_back(x);
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw std::runtime_error("profile csv: need at least two rows");
  const std::size_t m = rows.size() - 1;
  Profile v(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m + 1));
  for (std::size_t k = 0; k <= m; ++k) {
    double expected = static_cast<double>(k) / static_cast<double>(m);
    if (std::abs(rows[k][0] - expected) > 1e-12) {
      throw std::runtime_error("profile csv: t column is not the uniform mesh at row " + std::to_string(k + 2));
    }
    for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[k][i + 1];
  }
  return v;
}

Profile read_profile_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_profile_csv(is);
}

}  // namespace radma
