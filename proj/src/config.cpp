#include "radma/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace radma {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line;
};

[[noreturn]] void fail_at(int line, const std::string& what) {
  throw ConfigError("line " + std::to_string(line) + ": " + what);
}

double to_real(const Entry& e, const std::string& key) {
  double x = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc{} || ptr != last) fail_at(e.line, "invalid number for " + key + ": '" + e.value + "'");
  return x;
}

int to_int(const Entry& e, const std::string& key) {
  int x = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc{} || ptr != last) fail_at(e.line, "invalid integer for " + key + ": '" + e.value + "'");
  return x;
}

bool is_known(const std::string& key) {
  static const char* names[] = {"N",      "n",          "lambda",     "M",      "r_lo",    "r_hi", "lambda_min",
                                "lambda_max", "points", "spacing", "tol", "max_iter", "output"};
  for (const char* k : names) {
    if (key == k) return true;
  }
  if (key.size() > 1 && key[0] == 'f') {
    return key.size() <= 6 && key.find_first_not_of("0123456789", 1) == std::string::npos && key[1] != '0';
  }
  return false;
}

}  // namespace

std::vector<double> Config::lambdas() const {
  if (!lambda_min || !lambda_max) throw ConfigError("sweep needs lambda_min and lambda_max");
  return lambda_grid(*lambda_min, *lambda_max, points, geometric);
}

Config parse_config(std::istream& is) {
  std::map<std::string, Entry> entries;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string text = trim(raw);
    if (text.empty()) continue;
    auto eq = text.find('=');
    if (eq == std::string::npos) fail_at(line, "expected key=value");
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (key.empty()) fail_at(line, "empty key");
    if (!is_known(key)) fail_at(line, "unknown key '" + key + "'");
    if (value.empty()) fail_at(line, "empty value for " + key);
    if (!entries.emplace(key, Entry{value, line}).second) fail_at(line, "duplicate key '" + key + "'");
  }

  auto require = [&](const std::string& key) -> const Entry& {
    auto it = entries.find(key);
    if (it == entries.end()) throw ConfigError("missing required key " + key);
    return it->second;
  };
  auto find = [&](const std::string& key) -> const Entry* {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };

  Config cfg;
  ProblemSpec& spec = cfg.spec;
  spec.N = to_int(require("N"), "N");
  spec.n = to_int(require("n"), "n");
  spec.lambda = to_real(require("lambda"), "lambda");
  if (spec.n < 1) fail_at(require("n").line, "n must be >= 1");
  for (const auto& [key, e] : entries) {
    if (key[0] == 'f' && std::stoi(key.substr(1)) > spec.n) fail_at(e.line, key + " exceeds n");
  }
  for (int i = 1; i <= spec.n; ++i) {
    const std::string key = "f" + std::to_string(i);
    const Entry& e = require(key);
    try {
      spec.f.push_back(parse(e.value, spec.n));
    } catch (const ExprError& err) {
      fail_at(e.line, key + ": " + err.what());
    }
  }
  if (const Entry* e = find("M")) spec.M = to_int(*e, "M");
  if (const Entry* e = find("r_lo")) cfg.window.r_lo = to_real(*e, "r_lo");
  if (const Entry* e = find("r_hi")) cfg.window.r_hi = to_real(*e, "r_hi");
  if (const Entry* e = find("lambda_min")) cfg.lambda_min = to_real(*e, "lambda_min");
  if (const Entry* e = find("lambda_max")) cfg.lambda_max = to_real(*e, "lambda_max");
  if (const Entry* e = find("points")) cfg.points = to_int(*e, "points");
  if (const Entry* e = find("spacing")) {
    if (e->value == "geometric") {
      cfg.geometric = true;
    } else if (e->value == "linear") {
      cfg.geometric = false;
    } else {
      fail_at(e->line, "spacing must be linear or geometric");
    }
  }
  if (const Entry* e = find("tol")) cfg.tol = to_real(*e, "tol");
  if (const Entry* e = find("max_iter")) cfg.max_iter = to_int(*e, "max_iter");
  if (const Entry* e = find("output")) cfg.output = e->value;

  try {
    spec.validate();
    cfg.window.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
  if (cfg.points < 2) throw ConfigError("points must be >= 2");
  if (!(cfg.tol > 0.0)) throw ConfigError("tol must be > 0");
  if (cfg.max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (cfg.lambda_min || cfg.lambda_max) {
    if (!cfg.lambda_min || !cfg.lambda_max) throw ConfigError("lambda_min and lambda_max must be given together");
    if (!(*cfg.lambda_min > 0.0) || !(*cfg.lambda_max > *cfg.lambda_min)) {
      throw ConfigError("need 0 < lambda_min < lambda_max");
    }
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  return parse_config(in);
}

}  // namespace radma
