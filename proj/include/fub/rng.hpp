#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace fub {

/// SplitMix64 finalizer (Steele/Lea/Vigna constants). Used to derive
/// per-sample engine seeds so that parallel audits reproduce the serial
/// sample stream exactly.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Deterministic sampling stream: std::mt19937_64 (fully specified by the
/// C++ standard) with all real-valued draws derived from raw 64-bit words
/// here, never through implementation-defined <random> distributions.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), rejection sampling (n > 0).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t bound = n == 0 ? 0 : (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= bound);
    return v % n;
  }

  double sign() { return (engine_() & 1ull) ? 1.0 : -1.0; }

  /// Uniform point in the open 1-norm ball of given radius in dimension n.
  /// Simplex coordinates via sorted-uniform spacings; no libm calls except
  /// pow for the radial density.
  Eigen::VectorXd l1_ball_point(int n, double radius);

 private:
  std::mt19937_64 engine_;
};

/// Stream `index` of the run-level seed. Sample i of an audit always uses
/// derive_stream(seed, i), making reports independent of thread count.
inline SampleRng derive_stream(std::uint64_t seed, std::uint64_t index) {
  return SampleRng(splitmix64(seed ^ splitmix64(index)));
}

}  // namespace fub
