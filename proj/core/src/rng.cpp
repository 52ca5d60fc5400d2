#include "htq/rng.hpp"

#include <cstdlib>
#include <string>

namespace htq {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Stream::Stream(std::uint64_t seed, std::uint64_t stream_id)
    : eng_(splitmix64(seed + 0x9E3779B97F4A7C15ULL * (stream_id + 1))), seed_(seed), id_(stream_id) {}

unsigned default_workers() {
  if (const char* env = std::getenv("HTQ_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace htq
