#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tvlab/kernels.hpp"
#include "tvlab/tv_estimator.hpp"

namespace tvlab {

/// Flat experiment configuration. Every field is addressable by a key of
/// the same name, both in config files (`key = value`, `#` comments) and as
/// a CLI override.
struct ExperimentConfig {
  double h1 = 0.8;
  double h2 = 0.8;
  std::vector<int> n_grid{4, 8, 16, 32, 64, 128};
  std::size_t samples = 1000000;
  std::uint64_t seed = 1;
  QuadratureConfig quadrature;
  TvMethod tv_method = TvMethod::Histogram;
  int bins = 200;
  std::optional<double> bandwidth;  // unset = automatic
  int resamples = 200;
  std::string out;  // CSV path; empty = $TVLAB_OUTPUT_DIR/<command>.csv
  std::vector<double> c_grid{0.05, 0.1, 0.2, 0.4};
  std::vector<double> u_grid;  // empty = automatic
  unsigned threads = 0;
  double scale = 1.0;             // spectrum: analyse scale * f_inf
  int cv_n = 64;                  // cross-validate: n for the KS comparison
  std::string tail_source = "f_inf";  // f_inf | equal5 | single
  bool gaussian_tail = true;      // complete truncated f_inf spectra with a Gaussian term
  std::string dump_dir;           // when set, sample pools are written here
  bool gnuplot = false;           // also emit a gnuplot script next to the CSV

  HurstPair hurst() const { return HurstPair(h1, h2); }

  /// Set one field from its textual form. Throws DomainError for unknown
  /// keys or malformed values.
  void set(const std::string& key, const std::string& value);

  /// All keys with their current values, in a fixed order.
  std::vector<std::pair<std::string, std::string>> entries() const;

  void validate() const;
};

/// Apply a `key = value` file on top of `cfg`.
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

ExperimentConfig load_config(const std::string& path);

}  // namespace tvlab
