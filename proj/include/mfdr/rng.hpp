#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mfdr {

// Mixes (seed, stream_id) into a fresh 64-bit seed so that independent
// substreams (one per replicate, one per permutation) can be drawn in any
// order, or concurrently, without changing their contents.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id);

// Seeded generator with explicit mappings to uniforms/normals.  mt19937_64's
// output sequence is pinned by the standard and the mappings below avoid
// std::*_distribution, whose results vary across standard libraries, so a
// (seed, call sequence) pair yields the same draws everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform on [0, 1): 53 random bits
  double uniform();

  // standard normal via Marsaglia polar; second draw of each pair is cached
  double normal();

  // uniform on {0, ..., bound-1}, bias-free via rejection
  std::uint64_t below(std::uint64_t bound);

  // 0..n-1 shuffled by Fisher-Yates
  std::vector<int> permutation(int n);

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mfdr
