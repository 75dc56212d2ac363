#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ctxslam {

// Seeded random stream. The engine is std::mt19937_64 (bit-exact across
// standard libraries); the distributions are implemented here because the
// std:: ones are not portable between implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  // Box-Muller; one cached deviate.
  double normal(double mean = 0.0, double stddev = 1.0);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

// Independent substream seed derived from a master seed and a stream tag,
// so adding a stream never perturbs the draws of another.
std::uint64_t substream_seed(std::uint64_t master, std::string_view tag, std::uint64_t index = 0);

}  // namespace ctxslam
