#include "fdeopt/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fdeopt {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config key '" + key + "' expects a number, got '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config key '" + key + "' expects an integer, got '" + value +
                                "'");
  }
}

bool parse_flag(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("config key '" + key + "' expects a boolean, got '" + value + "'");
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& value, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse(key, item));
  }
  if (out.empty())
    throw std::invalid_argument("config key '" + key + "' expects a nonempty list");
  return out;
}

}  // namespace

double parse_bound(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return kUnbounded;
  if (t == "-inf") return -kUnbounded;
  return parse_double("bound", t);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "alpha",       "beta1",        "beta2",          "gamma",       "n",
      "ylo",         "yhi",          "ulo",            "uhi",         "delta",
      "rho",         "tol",          "max_outer",      "max_inner",   "inner_tol_floor",
      "inner_tol_factor", "warm_start", "out",         "format",      "delta_sweep",
      "n_sweep",     "alpha_sweep",  "seed",           "dump",        "workers"};
  return keys;
}

void apply_config_entry(const std::string& key, const std::string& value, RunConfig& cfg) {
  if (key == "alpha") cfg.spec.alpha = parse_double(key, value);
  else if (key == "beta1") cfg.spec.beta1 = parse_double(key, value);
  else if (key == "beta2") cfg.spec.beta2 = parse_double(key, value);
  else if (key == "gamma") cfg.spec.gamma = parse_double(key, value);
  else if (key == "n") cfg.spec.n = parse_int(key, value);
  else if (key == "ylo") cfg.spec.y_lo = parse_bound(value);
  else if (key == "yhi") cfg.spec.y_hi = parse_bound(value);
  else if (key == "ulo") cfg.spec.u_lo = parse_bound(value);
  else if (key == "uhi") cfg.spec.u_hi = parse_bound(value);
  else if (key == "delta") cfg.admm.delta = parse_double(key, value);
  else if (key == "rho") cfg.admm.rho = parse_double(key, value);
  else if (key == "tol") cfg.admm.tol_primal = parse_double(key, value);
  else if (key == "max_outer") cfg.admm.max_outer = parse_int(key, value);
  else if (key == "max_inner") cfg.admm.max_inner = parse_int(key, value);
  else if (key == "inner_tol_floor") cfg.admm.inner_tol_floor = parse_double(key, value);
  else if (key == "inner_tol_factor") cfg.admm.inner_tol_factor = parse_double(key, value);
  else if (key == "warm_start") cfg.admm.warm_start = parse_flag(key, value);
  else if (key == "out") cfg.out_dir = value;
  else if (key == "format") {
    if (value != "csv" && value != "plain")
      throw std::invalid_argument("config key 'format' expects csv or plain, got '" + value + "'");
    cfg.format = value;
  } else if (key == "delta_sweep")
    cfg.delta_sweep = parse_list<double>(key, value, parse_double);
  else if (key == "n_sweep")
    cfg.n_sweep = parse_list<int>(key, value, parse_int);
  else if (key == "alpha_sweep")
    cfg.alpha_sweep = parse_list<double>(key, value, parse_double);
  else if (key == "seed") cfg.seed = static_cast<unsigned>(parse_int(key, value));
  else if (key == "dump") cfg.dump_solution = parse_flag(key, value);
  else if (key == "workers") cfg.workers = parse_int(key, value);
  else {
    std::string msg = "unknown config key '" + key + "'; valid keys:";
    for (const auto& k : config_keys()) msg += " " + k;
    throw std::invalid_argument(msg);
  }
}

void parse_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    apply_config_entry(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), cfg);
  }
}

}  // namespace fdeopt
