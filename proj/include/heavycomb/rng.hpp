#pragma once

#include <cstdint>
#include <random>

namespace heavycomb {

/// Independent stream per (seed, stream, chunk). Every chunk of replicates
/// owns its generator, so results do not depend on which thread ran it.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t chunk);

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double normal() { return normal_(engine_); }
  std::uint64_t bits() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// Stream tags so unrelated uses of one seed never share a generator.
enum class Stream : std::uint64_t {
  NullStats = 1,
  Power = 2,
  Threshold = 3,
  Ratio = 4,
  CrossEntropy = 5,
  ImportanceFinal = 6,
  PlainMc = 7,
  Discrete = 8,
  EmpiricalNull = 9,
  Fixture = 10,
};

inline Rng make_rng(std::uint64_t seed, Stream s, std::uint64_t chunk) {
  return Rng(seed, static_cast<std::uint64_t>(s), chunk);
}

}  // namespace heavycomb
