#include "tvlab/sample_pool.hpp"

#include <cmath>
#include <fstream>

#include "tvlab/errors.hpp"

namespace tvlab {

double SamplePool::mean() const {
  if (values.empty()) throw DomainError("mean of an empty pool");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double SamplePool::variance() const {
  if (values.size() < 2) throw DomainError("variance needs at least two draws");
  const double m = mean();
  double s = 0.0;
  for (double v : values) s += (v - m) * (v - m);
  return s / static_cast<double>(values.size() - 1);
}

SamplePool merge(const SamplePool& a, const SamplePool& b) {
  if (a.seed != b.seed || a.chunk != b.chunk)
    throw DomainError("merge needs pools with one seed and chunk size");
  const SamplePool& lo = a.first_stream <= b.first_stream ? a : b;
  const SamplePool& hi = a.first_stream <= b.first_stream ? b : a;
  if (lo.first_stream + lo.stream_count != hi.first_stream)
    throw DomainError("merge needs adjacent stream ranges");
  if (lo.values.size() != lo.stream_count * lo.chunk)
    throw DomainError("only a pool of full chunks can precede another");
  SamplePool out = lo;
  out.values.insert(out.values.end(), hi.values.begin(), hi.values.end());
  out.stream_count = lo.stream_count + hi.stream_count;
  return out;
}

std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void write_pool_csv(const SamplePool& pool, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot open " + path);
  out << "# seed = " << pool.seed << "\n# meta = " << pool.meta << "\nvalue\n";
  char buf[32];
  for (double v : pool.values) {
    std::snprintf(buf, sizeof buf, "%.16e", v);
    out << buf << '\n';
  }
}

}  // namespace tvlab
