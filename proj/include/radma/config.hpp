#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "radma/model.hpp"
#include "radma/solver.hpp"

namespace radma {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  ProblemSpec spec;
  SearchWindow window;
  std::optional<double> lambda_min;
  std::optional<double> lambda_max;
  int points = 64;
  bool geometric = true;
  double tol = 1e-10;
  int max_iter = 500;
  std::string output;

  std::vector<double> lambdas() const;
};

/// key=value lines, '#' starts a comment. Required: N, n, lambda, f1..fn.
Config parse_config(std::istream& is);
Config load_config(const std::string& path);

}  // namespace radma
