#include "tvlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tvlab/chaos_sim.hpp"
#include "tvlab/fbm_paths.hpp"
#include "tvlab/spectral.hpp"
#include "tvlab/tv_estimator.hpp"

#ifndef TVLAB_VERSION
#define TVLAB_VERSION "dev"
#endif

namespace tvlab {

std::vector<double> Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw DomainError("no column " + name);
  const auto k = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  for (const auto& row : rows) out.push_back(row[k]);
  return out;
}

bool ExperimentResult::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* ExperimentResult::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string ExperimentResult::meta_value(const std::string& key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  return {};
}

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::string brief(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

void add_fit_meta(ExperimentResult& r, const RateFit& fit, const std::string& prefix = "fit") {
  r.meta.emplace_back(prefix + "_slope", num(fit.slope));
  r.meta.emplace_back(prefix + "_stderr", num(fit.stderr_slope));
  r.meta.emplace_back(prefix + "_intercept", num(fit.intercept));
  r.meta.emplace_back(prefix + "_r_squared", num(fit.r_squared));
}

void finalize(ExperimentResult& r, const ExperimentConfig& cfg, int failure_code = kExitCheckFailed) {
  if (r.exit_code == kExitOk && !r.all_passed()) r.exit_code = failure_code;
  r.csv_path = output_path(r.command, cfg);
  write_csv(r, cfg, r.csv_path);
}

std::uint64_t stream_block(std::size_t index) { return static_cast<std::uint64_t>(index) << 32; }

SamplingOptions sampling(const ExperimentConfig& cfg, std::uint64_t first_stream, double tail = 0.0) {
  SamplingOptions o;
  o.threads = cfg.threads;
  o.first_stream = first_stream;
  o.tail_hs_sq = tail;
  return o;
}

TvOptions tv_options(const ExperimentConfig& cfg, std::uint64_t salt, bool paired = false) {
  TvOptions o;
  o.resamples = cfg.resamples;
  o.seed = cfg.seed * 0x9E3779B97F4A7C15ULL + salt;
  o.threads = cfg.threads;
  o.paired = paired;
  return o;
}

TvEstimate estimate_tv(const ExperimentConfig& cfg, const SamplePool& a, const SamplePool& b,
                       std::uint64_t salt, bool paired = false) {
  const TvOptions o = tv_options(cfg, salt, paired);
  return cfg.tv_method == TvMethod::Histogram ? tv_histogram(a, b, cfg.bins, o)
                                              : tv_kde(a, b, cfg.bandwidth, o);
}

void maybe_dump(const ExperimentConfig& cfg, const SamplePool& pool, const std::string& name) {
  if (cfg.dump_dir.empty()) return;
  std::filesystem::create_directories(cfg.dump_dir);
  write_pool_csv(pool, (std::filesystem::path(cfg.dump_dir) / (name + ".csv")).string());
}

// Galerkin spectrum of f_inf together with the HS norm it misses.
struct InfinitySpectrum {
  SpectralDecomposition d;
  HypothesisH h;
  double norm_sq_sym = 0.0;
  double tail_hs_sq = 0.0;
};

InfinitySpectrum infinity_spectrum(const ExperimentConfig& cfg, ExperimentResult& r) {
  const HurstPair hp = cfg.hurst();
  const KernelSpec f = KernelSpec::f_infinity(hp);
  InfinitySpectrum s{galerkin_spectrum(f, cfg.quadrature), {}, 0.0, 0.0};
  s.h = verify_hypothesis_H(s.d);
  r.meta.emplace_back("truncation_left", num(resolve_truncation_left(hp, cfg.quadrature)));
  r.meta.emplace_back("grid_panels", std::to_string(s.d.eigenvalues.size()));
  r.meta.emplace_back("hypothesis_H_count", std::to_string(s.h.count));
  r.meta.emplace_back("hypothesis_H_threshold", num(s.h.threshold));
  if (hp.square_integrable()) {
    s.norm_sq_sym = inner_product_sym(f, f, cfg.quadrature);
    s.tail_hs_sq = cfg.gaussian_tail ? s.d.residual_hs_sq(s.norm_sq_sym) : 0.0;
    r.meta.emplace_back("norm_sq_sym", num(s.norm_sq_sym));
    r.meta.emplace_back("spectrum_hs_sq", num(s.d.hs_norm_sq));
    r.meta.emplace_back("gaussian_tail_hs_sq", num(s.tail_hs_sq));
  }
  return s;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

void require_rate_grid(const std::vector<int>& n_grid) {
  if (n_grid.size() < 3) throw DomainError("rate fits need at least 3 grid points");
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentResult run_norm_rate(const ExperimentConfig& cfg) {
  cfg.validate();
  require_rate_grid(cfg.n_grid);
  ExperimentResult r;
  r.command = "norm-rate";
  const HurstPair hp = cfg.hurst();
  const KernelSpec finf = KernelSpec::f_infinity(hp);
  r.table.columns = {"n", "l2_distance", "l2_distance_sym"};
  std::vector<std::pair<double, double>> pts;
  for (int n : cfg.n_grid) {
    const KernelSpec fn = KernelSpec::f_n(hp, n);
    const double d = l2_distance(fn, finf, cfg.quadrature);
    const double ds = l2_distance_sym(fn, finf, cfg.quadrature);
    r.table.rows.push_back({static_cast<double>(n), d, ds});
    pts.emplace_back(n, d);
  }
  const RateFit fit = fit_loglog(pts);
  const double target = 1.5 - hp.h1() - hp.h2();
  r.fit = fit;
  add_fit_meta(r, fit);
  r.meta.emplace_back("target_slope", num(target));
  r.checks.push_back({"slope", compare_exponent(fit, target, 0.05),
                      "slope " + brief(fit.slope) + " vs target " + brief(target) + " +- 0.05"});
  r.checks.push_back({"decreasing", strictly_decreasing(r.table.column("l2_distance")),
                      "distances strictly decreasing in n"});
  finalize(r, cfg);
  return r;
}

ExperimentResult run_tv_rate(const ExperimentConfig& cfg) {
  cfg.validate();
  require_rate_grid(cfg.n_grid);
  ExperimentResult r;
  r.command = "tv-rate";
  const HurstPair hp = cfg.hurst();
  const InfinitySpectrum inf = infinity_spectrum(cfg, r);
  r.checks.push_back({"hypothesis_H", inf.h.satisfied,
                      std::to_string(inf.h.count) + " eigenvalues above threshold"});
  if (!inf.h.satisfied) {
    r.exit_code = kExitHypothesisH;
    finalize(r, cfg);
    return r;
  }
  const KernelSpec finf = KernelSpec::f_infinity(hp);
  const SamplePool pinf =
      sample_second_chaos(inf.d, cfg.samples, cfg.seed, sampling(cfg, 0, inf.tail_hs_sq));
  maybe_dump(cfg, pinf, "i2_f_inf");

  r.table.columns = {"n", "tv", "ci_low", "ci_high", "l2_distance_sym", "ratio", "ratio_sqrt"};
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    const int n = cfg.n_grid[i];
    const KernelSpec fn = KernelSpec::f_n(hp, n);
    const SamplePool pn = sample_second_chaos(exact_finite_rank_spectrum(fn), cfg.samples, cfg.seed,
                                              sampling(cfg, stream_block(i + 1)));
    maybe_dump(cfg, pn, "i2_f_n_" + std::to_string(n));
    const TvEstimate tv = estimate_tv(cfg, pn, pinf, i + 1);
    const double d = l2_distance_sym(fn, finf, cfg.quadrature);
    r.table.rows.push_back({static_cast<double>(n), tv.value, tv.ci_low, tv.ci_high, d,
                            tv.value / d, tv.value / std::sqrt(d)});
    pts.emplace_back(n, tv.value);
  }
  const RateFit fit = fit_loglog(pts);
  const double target = 1.5 - hp.h1() - hp.h2();
  r.fit = fit;
  add_fit_meta(r, fit);
  r.meta.emplace_back("target_slope", num(target));
  r.meta.emplace_back("two_sided_agreement",
                      compare_exponent(fit, target, 0.15) ? "true" : "false");

  r.checks.push_back({"slope_upper", fit.slope <= target + 0.15,
                      "slope " + brief(fit.slope) + " <= " + brief(target + 0.15)});
  r.checks.push_back({"beats_sqrt_rate", fit.slope + 2.0 * fit.stderr_slope < 0.5 * target,
                      "slope + 2 se = " + brief(fit.slope + 2.0 * fit.stderr_slope) + " < " +
                          brief(0.5 * target)});
  const auto ratio = r.table.column("ratio");
  const double band = *std::max_element(ratio.begin(), ratio.end()) /
                      *std::min_element(ratio.begin(), ratio.end());
  r.meta.emplace_back("ratio_band", num(band));
  r.checks.push_back({"ratio_bounded", band < 10.0, "max/min tv/distance = " + brief(band)});

  // tv / sqrt(distance) must move with the distance (it would be flat under
  // a square-root rate): point values monotone and the endpoint intervals
  // separated.
  const auto rs = r.table.column("ratio_sqrt");
  const auto lo = r.table.column("ci_low"), hi = r.table.column("ci_high");
  const auto dist = r.table.column("l2_distance_sym");
  const bool monotone = strictly_decreasing(rs);
  const bool separated = lo.front() / std::sqrt(dist.front()) > hi.back() / std::sqrt(dist.back());
  r.checks.push_back({"ratio_sqrt_trend", monotone && separated,
                      std::string("tv/sqrt(distance) ") + (monotone ? "monotone" : "not monotone") +
                          ", endpoints " + (separated ? "separated" : "overlapping")});
  finalize(r, cfg);
  return r;
}

ExperimentResult run_optimality(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.c_grid.size() < 4) throw DomainError("optimality needs at least 4 values of c");
  for (double c : cfg.c_grid)
    if (!(c > 0.0 && c <= 0.5)) throw DomainError("c_grid values must lie in (0, 0.5]");
  ExperimentResult r;
  r.command = "optimality";
  const InfinitySpectrum inf = infinity_spectrum(cfg, r);
  const SamplePool base =
      sample_second_chaos(inf.d, cfg.samples, cfg.seed, sampling(cfg, 0, inf.tail_hs_sq));
  const SamplePool indep =
      sample_second_chaos(inf.d, cfg.samples, cfg.seed, sampling(cfg, stream_block(1), inf.tail_hs_sq));
  const TvEstimate floor = estimate_tv(cfg, base, indep, 0);
  r.meta.emplace_back("same_law_floor", num(floor.value));

  r.table.columns = {"c", "tv", "ci_low", "ci_high", "tv_indep", "ci_low_indep", "ci_high_indep"};
  std::vector<std::pair<double, double>> pts;
  double width_matched = 0.0, width_indep = 0.0;
  for (std::size_t i = 0; i < cfg.c_grid.size(); ++i) {
    const double c = cfg.c_grid[i];
    // Scaling the spectrum with the same seed reuses every Gaussian.
    SpectralDecomposition scaled = inf.d;
    for (double& lam : scaled.eigenvalues) lam *= 1.0 + c;
    scaled.hs_norm_sq *= (1.0 + c) * (1.0 + c);
    const double tail = inf.tail_hs_sq * (1.0 + c) * (1.0 + c);
    const SamplePool pc = sample_second_chaos(scaled, cfg.samples, cfg.seed, sampling(cfg, 0, tail));
    const TvEstimate m = estimate_tv(cfg, pc, base, 100 + i, true);
    const TvEstimate u = estimate_tv(cfg, pc, indep, 200 + i);
    r.table.rows.push_back({c, m.value, m.ci_low, m.ci_high, u.value, u.ci_low, u.ci_high});
    pts.emplace_back(c, m.value);
    width_matched += m.ci_high - m.ci_low;
    width_indep += u.ci_high - u.ci_low;
  }
  const RateFit fit = fit_loglog(pts);
  r.fit = fit;
  add_fit_meta(r, fit);
  std::vector<std::pair<double, double>> ipts;
  for (const auto& row : r.table.rows) ipts.emplace_back(row[0], row[4]);
  const RateFit ifit = fit_loglog(ipts);
  add_fit_meta(r, ifit, "indep_fit");
  r.checks.push_back({"linear_in_c", std::abs(fit.slope - 1.0) <= 0.15,
                      "exponent " + brief(fit.slope) + " vs 1 +- 0.15"});
  r.checks.push_back({"matched_narrower", width_matched < width_indep,
                      "mean CI width matched " + brief(width_matched / cfg.c_grid.size()) +
                          " vs independent " + brief(width_indep / cfg.c_grid.size())});
  finalize(r, cfg);
  return r;
}

ExperimentResult run_spectrum(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult r;
  r.command = "spectrum";
  const HurstPair hp = cfg.hurst();
  const KernelSpec f = KernelSpec::scaled(KernelSpec::f_infinity(hp), cfg.scale);
  const SpectralDecomposition d = galerkin_spectrum(f, cfg.quadrature);
  const HypothesisH h = verify_hypothesis_H(d);
  r.meta.emplace_back("truncation_left", num(resolve_truncation_left(hp, cfg.quadrature)));
  r.meta.emplace_back("hypothesis_H_count", std::to_string(h.count));
  r.meta.emplace_back("hypothesis_H_threshold", num(h.threshold));
  r.meta.emplace_back("spectrum_hs_sq", num(d.hs_norm_sq));
  r.table.columns = {"index", "eigenvalue", "abs_eigenvalue"};
  for (std::size_t k = 0; k < d.eigenvalues.size(); ++k)
    r.table.rows.push_back({static_cast<double>(k + 1), d.eigenvalues[k], std::abs(d.eigenvalues[k])});
  r.checks.push_back({"hypothesis_H", h.satisfied, std::to_string(h.count) + " eigenvalues above threshold"});
  if (hp.square_integrable()) {
    const double norm = inner_product_sym(f, f, cfg.quadrature);
    const double gap = std::abs(d.hs_norm_sq / norm - 1.0);
    r.meta.emplace_back("norm_sq_sym", num(norm));
    r.meta.emplace_back("hs_relative_gap", num(gap));
    r.checks.push_back({"hs_norm", gap < 0.02, "sum lambda^2 vs ||f||^2 relative gap " + brief(gap)});
  } else {
    r.meta.emplace_back("norm_sq_sym", "inf");
  }
  const bool gate_failed = !h.satisfied;
  finalize(r, cfg);
  if (gate_failed) r.exit_code = kExitHypothesisH;
  return r;
}

ExperimentResult run_tail(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult r;
  r.command = "tail";
  SpectralDecomposition d;
  if (cfg.tail_source == "equal5") {
    d = SpectralDecomposition::from_eigenvalues({0.5, 0.5, 0.5, 0.5, 0.5});
  } else if (cfg.tail_source == "single") {
    d = SpectralDecomposition::from_eigenvalues({1.0});
  } else {
    const InfinitySpectrum inf = infinity_spectrum(cfg, r);
    if (!inf.h.satisfied) {
      r.checks.push_back({"hypothesis_H", false, "hypothesis (H) fails"});
      r.exit_code = kExitHypothesisH;
      finalize(r, cfg);
      return r;
    }
    d = inf.d;
  }
  r.meta.emplace_back("tail_source", cfg.tail_source);
  const SamplePool pool = sample_malliavin_norm_sq(d, cfg.samples, cfg.seed, sampling(cfg, 0));
  maybe_dump(cfg, pool, "malliavin_norm_sq");
  const std::vector<double> grid = cfg.u_grid.empty() ? auto_small_ball_grid(pool) : cfg.u_grid;
  const RateFit fit = small_ball_fit(pool, grid);
  r.fit = fit;
  add_fit_meta(r, fit);
  r.table.columns = {"u", "probability"};
  for (const auto& [u, p] : fit.points) r.table.rows.push_back({u, p});
  r.checks.push_back({"small_ball_exponent", fit.slope >= 2.2 && fit.slope <= 2.8,
                      "slope " + brief(fit.slope) + " in [2.2, 2.8]"});
  finalize(r, cfg);
  return r;
}

ExperimentResult run_cross_validate(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult r;
  r.command = "cross-validate";
  const HurstPair hp = cfg.hurst();
  const double b = zn_kernel_scale(hp);
  r.meta.emplace_back("zn_kernel_scale", num(b));

  // Route equivalence at n = cv_n.
  const SamplePool path = sample_zn(hp, cfg.cv_n, cfg.samples, cfg.seed, sampling(cfg, 0));
  const SamplePool kernel = sample_second_chaos(exact_finite_rank_spectrum(KernelSpec::f_n(hp, cfg.cv_n)),
                                                cfg.samples, cfg.seed, sampling(cfg, stream_block(1)));
  maybe_dump(cfg, path, "zn_path_" + std::to_string(cfg.cv_n));
  maybe_dump(cfg, kernel, "i2_f_n_" + std::to_string(cfg.cv_n));
  const KsResult ks = ks_two_sample(standardize(path), standardize(kernel));
  r.meta.emplace_back("ks_n", std::to_string(cfg.cv_n));
  r.meta.emplace_back("ks_statistic", num(ks.statistic));
  r.meta.emplace_back("ks_critical_1pct", num(ks.critical));
  r.meta.emplace_back("jitter", num(build_joint_cov(hp, cfg.cv_n).jitter));
  r.checks.push_back({"ks_routes", !ks.reject,
                      "KS " + brief(ks.statistic) + " vs 1% critical " + brief(ks.critical)});

  // Z_n (path route) against Z_inf = b I_2(f_inf) (kernel route).
  const InfinitySpectrum inf = infinity_spectrum(cfg, r);
  SamplePool zinf = sample_second_chaos(inf.d, cfg.samples, cfg.seed,
                                        sampling(cfg, stream_block(2), inf.tail_hs_sq));
  for (double& v : zinf.values) v *= b;
  r.table.columns = {"n", "tv", "ci_low", "ci_high", "var_zn", "var_zn_analytic"};
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    const int n = cfg.n_grid[i];
    const SamplePool zn = sample_zn(hp, n, cfg.samples, cfg.seed, sampling(cfg, stream_block(3 + i)));
    const TvEstimate tv = estimate_tv(cfg, zn, zinf, 300 + i);
    const KernelSpec fn = KernelSpec::f_n(hp, n);
    const double var_exact = 2.0 * b * b * inner_product_sym(fn, fn, cfg.quadrature);
    r.table.rows.push_back({static_cast<double>(n), tv.value, tv.ci_low, tv.ci_high, zn.variance(), var_exact});
  }
  const auto tv = r.table.column("tv"), lo = r.table.column("ci_low"), hi = r.table.column("ci_high");
  const bool monotone = strictly_decreasing(tv);
  const bool separated = tv.size() < 2 || lo.front() > hi.back();
  r.checks.push_back({"tv_decreasing", monotone && separated,
                      std::string("tv(Z_n, Z_inf) ") + (monotone ? "decreasing" : "not decreasing") +
                          ", endpoints " + (separated ? "separated" : "overlapping")});
  finalize(r, cfg);
  return r;
}

ExperimentResult run_command(const std::string& command, const ExperimentConfig& cfg) {
  if (command == "norm-rate") return run_norm_rate(cfg);
  if (command == "tv-rate") return run_tv_rate(cfg);
  if (command == "optimality") return run_optimality(cfg);
  if (command == "spectrum") return run_spectrum(cfg);
  if (command == "tail") return run_tail(cfg);
  if (command == "cross-validate") return run_cross_validate(cfg);
  throw DomainError("unknown command " + command);
}

// ---------------------------------------------------------------------------

std::string output_path(const std::string& command, const ExperimentConfig& cfg) {
  if (!cfg.out.empty()) return cfg.out;
  const char* env = std::getenv("TVLAB_OUTPUT_DIR");
  const std::filesystem::path dir = env && *env ? env : ".";
  return (dir / (command + ".csv")).string();
}

void write_csv(const ExperimentResult& result, const ExperimentConfig& cfg, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  out << "# tool = tvlab " << TVLAB_VERSION << "\n";
  out << "# command = " << result.command << "\n";
  for (const auto& [k, v] : cfg.entries()) out << "# " << k << " = " << v << "\n";
  for (const auto& [k, v] : result.meta) out << "# " << k << " = " << v << "\n";
  for (const auto& c : result.checks)
    out << "# check." << c.name << " = " << (c.passed ? "pass" : "fail") << "\n";
  for (std::size_t i = 0; i < result.table.columns.size(); ++i)
    out << (i ? "," : "") << result.table.columns[i];
  out << "\n";
  for (const auto& row : result.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << num(row[i]);
    out << "\n";
  }
  if (!cfg.gnuplot || result.table.columns.size() < 2) return;
  std::ofstream gp(path + ".gp");
  gp << "set datafile separator ','\nset logscale xy\nset key top right\n"
     << "set xlabel '" << result.table.columns[0] << "'\n"
     << "plot '" << p.filename().string() << "' every ::1 using 1:2 with linespoints title '"
     << result.table.columns[1] << "'\n";
}

std::vector<std::string> read_csv_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read " + path);
  std::vector<std::string> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

std::string summary(const ExperimentResult& r) {
  std::ostringstream os;
  os << r.command << ": " << (r.exit_code == kExitOk ? "ok" : "exit " + std::to_string(r.exit_code)) << "\n";
  if (r.fit)
    os << "  fitted slope " << brief(r.fit->slope) << " (stderr " << brief(r.fit->stderr_slope) << ")\n";
  for (const auto& c : r.checks) os << "  [" << (c.passed ? "pass" : "FAIL") << "] " << c.name << ": " << c.detail << "\n";
  os << "  csv: " << r.csv_path << "\n";
  return os.str();
}

}  // namespace tvlab
