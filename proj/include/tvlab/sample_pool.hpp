#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace tvlab {

inline constexpr std::size_t kDefaultChunk = 4096;

/// i.i.d. draws laid out in fixed-size chunks; chunk c of the pool was
/// produced by RNG stream first_stream + c.
struct SamplePool {
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t first_stream = 0;
  std::uint64_t stream_count = 0;
  std::size_t chunk = kDefaultChunk;
  std::string meta;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  double mean() const;
  double variance() const;  // unbiased
};

/// Concatenate two pools covering adjacent stream ranges of one seed. The
/// arguments may come in either order; the result is in stream order.
SamplePool merge(const SamplePool& a, const SamplePool& b);

/// Independent engine for (seed, stream).
std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream);

/// Number of worker threads to use for a request (0 = hardware concurrency).
unsigned resolve_threads(unsigned requested);

/// Run body(c, begin, end) for every chunk c of [0, count), spread over
/// `threads` workers. Chunk boundaries do not depend on the thread count.
template <class Body>
void for_each_chunk(std::size_t count, std::size_t chunk, unsigned threads, Body&& body);

/// Dump one value per row.
void write_pool_csv(const SamplePool& pool, const std::string& path);

}  // namespace tvlab

#include "tvlab/detail/for_each_chunk.hpp"
