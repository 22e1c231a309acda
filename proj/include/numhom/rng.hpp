#pragma once

#include <cstdint>
#include <random>

namespace numhom {

/// All stochastic media draw from std::mt19937_64, whose output sequence is
/// fixed by the standard. Distributions are mapped by hand because the
/// library's distribution objects are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace numhom
