#pragma once

#include <cstdint>
#include <random>

namespace polling {

/// A seedable pseudo-random stream. Streams are identified by
/// (masterSeed, replication, streamId); distinct ids give statistically
/// independent substreams, and the same id always reproduces the same
/// sequence.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t replication, std::uint64_t stream_id)
      : gen_(derive_seed(master_seed, replication, stream_id)) {}

  /// Uniform draw strictly inside (0, 1); never returns 0, so log(u) is safe.
  double uniform() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }

  std::uint64_t raw() { return gen_(); }

  static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication,
                                   std::uint64_t stream_id) {
    std::uint64_t h = splitmix(master ^ 0x6A09E667F3BCC909ULL);
    h = splitmix(h ^ (0x9E3779B97F4A7C15ULL * (replication + 1)));
    h = splitmix(h ^ (0xBF58476D1CE4E5B9ULL * (stream_id + 1)));
    return h;
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 gen_;
};

}  // namespace polling
