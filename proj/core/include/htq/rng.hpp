#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace htq {

std::uint64_t splitmix64(std::uint64_t x);

// Deterministic stream keyed by (seed, stream id). Streams with distinct ids
// are statistically independent for practical purposes.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next() { return eng_(); }
  // uniform on the open interval (0, 1)
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }
  double exponential() { return -std::log(uniform()); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t id() const { return id_; }

 private:
  std::mt19937_64 eng_;
  std::uint64_t seed_;
  std::uint64_t id_;
};

// Runs body(chunk_index, stream) over `chunks` fixed-size chunks on up to
// `workers` threads; chunk c always uses Stream(seed, c).
template <class Body>
void for_each_chunk(std::uint64_t seed, std::size_t chunks, unsigned workers, Body&& body);

unsigned default_workers();

}  // namespace htq

#include "htq/detail/parallel.hpp"
