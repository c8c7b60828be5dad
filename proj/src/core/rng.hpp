#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace tddr {

// Named sub-streams derived from one master seed. Each consumer owns its
// stream so changing the draw count of one never shifts another.
enum class Stream : std::uint64_t {
  kInit = 1,
  kEnv = 2,
  kExploration = 3,
  kSmoothing = 4,
  kReplay = 5,
  kEvaluation = 6,
  kTabular = 7,
};

// Portable deterministic generator: mt19937_64 seeded through seed_seq, with
// uniform and normal variates computed here rather than by the
// implementation-defined <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);
  Rng(std::uint64_t seed, Stream stream) : Rng(seed, static_cast<std::uint64_t>(stream)) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal (Box-Muller, second variate cached).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tddr
