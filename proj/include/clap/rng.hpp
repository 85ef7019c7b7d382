#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "clap/core.hpp"

namespace clap {

// Counter-based generator: draw i of a stream is mix(key + i * gamma), so a
// stream can be split by deriving a new key without touching the parent.
// Distributions are implemented here rather than taken from <random> because
// the standard leaves their algorithms unspecified.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}
  Rng(RngSeed seed, std::string_view stream);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);
  double normal();

  Rng split(std::string_view stream) const;
  Rng split(std::uint64_t stream) const;

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_string(std::string_view s);

// Seed for one dataset's pipeline, independent of processing order.
RngSeed derive_seed(RngSeed base, std::string_view name);

}  // namespace clap
