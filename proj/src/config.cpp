#include "tvlab/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tvlab/errors.hpp"

namespace tvlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw DomainError("bad number for " + key + ": '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw DomainError("bad integer for " + key + ": '" + v + "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    const unsigned long long i = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw DomainError("bad unsigned integer for " + key + ": '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw DomainError("bad boolean for " + key + ": '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += f(v[i]);
  }
  return s;
}

}  // namespace

void ExperimentConfig::set(const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in), v = trim(value_in);
  auto& q = quadrature;
  if (key == "h1") h1 = to_double(key, v);
  else if (key == "h2") h2 = to_double(key, v);
  else if (key == "n_grid") {
    n_grid.clear();
    for (const auto& s : split_list(v)) n_grid.push_back(static_cast<int>(to_int(key, s)));
  } else if (key == "samples") samples = to_uint(key, v);
  else if (key == "seed") seed = to_uint(key, v);
  else if (key == "truncation_left") {
    if (v == "auto") q.truncation_left.reset();
    else q.truncation_left = to_double(key, v);
  } else if (key == "panels_per_unit") q.panels_per_unit = static_cast<int>(to_int(key, v));
  else if (key == "grading_exponent") q.grading_exponent = to_double(key, v);
  else if (key == "panel_grading") q.panel_grading = to_double(key, v);
  else if (key == "tail_growth") q.tail_growth = to_double(key, v);
  else if (key == "nodes_per_panel") q.nodes_per_panel = static_cast<int>(to_int(key, v));
  else if (key == "abs_tol") q.abs_tol = to_double(key, v);
  else if (key == "rel_tol") q.rel_tol = to_double(key, v);
  else if (key == "tv_method") tv_method = parse_tv_method(v);
  else if (key == "bins") bins = static_cast<int>(to_int(key, v));
  else if (key == "bandwidth") {
    if (v == "auto") bandwidth.reset();
    else bandwidth = to_double(key, v);
  } else if (key == "resamples") resamples = static_cast<int>(to_int(key, v));
  else if (key == "out") out = v;
  else if (key == "c_grid") {
    c_grid.clear();
    for (const auto& s : split_list(v)) c_grid.push_back(to_double(key, s));
  } else if (key == "u_grid") {
    u_grid.clear();
    if (v != "auto")
      for (const auto& s : split_list(v)) u_grid.push_back(to_double(key, s));
  } else if (key == "threads") threads = static_cast<unsigned>(to_uint(key, v));
  else if (key == "scale") scale = to_double(key, v);
  else if (key == "cv_n") cv_n = static_cast<int>(to_int(key, v));
  else if (key == "tail_source") tail_source = v;
  else if (key == "gaussian_tail") gaussian_tail = to_bool(key, v);
  else if (key == "dump_dir") dump_dir = v;
  else if (key == "gnuplot") gnuplot = to_bool(key, v);
  else throw DomainError("unknown config key: " + key);
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  const auto& q = quadrature;
  return {
      {"h1", fmt(h1)},
      {"h2", fmt(h2)},
      {"n_grid", join(n_grid, [](int n) { return std::to_string(n); })},
      {"samples", std::to_string(samples)},
      {"seed", std::to_string(seed)},
      {"truncation_left", q.truncation_left ? fmt(*q.truncation_left) : "auto"},
      {"panels_per_unit", std::to_string(q.panels_per_unit)},
      {"grading_exponent", fmt(q.grading_exponent)},
      {"panel_grading", fmt(q.panel_grading)},
      {"tail_growth", fmt(q.tail_growth)},
      {"nodes_per_panel", std::to_string(q.nodes_per_panel)},
      {"abs_tol", fmt(q.abs_tol)},
      {"rel_tol", fmt(q.rel_tol)},
      {"tv_method", to_string(tv_method)},
      {"bins", std::to_string(bins)},
      {"bandwidth", bandwidth ? fmt(*bandwidth) : "auto"},
      {"resamples", std::to_string(resamples)},
      {"c_grid", join(c_grid, fmt)},
      {"u_grid", u_grid.empty() ? "auto" : join(u_grid, fmt)},
      {"threads", std::to_string(threads)},
      {"scale", fmt(scale)},
      {"cv_n", std::to_string(cv_n)},
      {"tail_source", tail_source},
      {"gaussian_tail", gaussian_tail ? "true" : "false"},
  };
}

void ExperimentConfig::validate() const {
  (void)hurst();
  quadrature.validate();
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw DomainError("n_grid entries must be positive");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw DomainError("n_grid must be strictly increasing");
  }
  if (samples < 1) throw DomainError("samples must be positive");
  if (bins < 2) throw DomainError("bins must be at least 2");
  if (bandwidth && !(*bandwidth > 0.0)) throw DomainError("bandwidth must be positive");
  if (resamples != 0 && resamples < 100) throw DomainError("resamples must be 0 or at least 100");
  if (cv_n < 1) throw DomainError("cv_n must be positive");
  if (tail_source != "f_inf" && tail_source != "equal5" && tail_source != "single")
    throw DomainError("tail_source must be f_inf, equal5 or single");
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError(path + ":" + std::to_string(lineno) + ": expected key = value");
    cfg.set(line.substr(0, eq), line.substr(eq + 1));
  }
}

ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig cfg;
  apply_config_file(cfg, path);
  return cfg;
}

}  // namespace tvlab
