#ifndef NULLCAST_RNG_HPP
#define NULLCAST_RNG_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace nullcast {

/// SplitMix64 finalizer, used to decorrelate seeds before they reach the engine.
std::uint64_t splitmix64(std::uint64_t x);

/// Seedable, splittable generator shared by every stochastic component.
///
/// The engine is `std::mt19937_64` seeded with a SplitMix64-mixed seed. All
/// distributions are derived here from raw 64-bit words (53-bit uniforms,
/// Box-Muller normals, rejection-sampled bounded integers) rather than from the
/// `<random>` distribution classes, whose output is implementation-defined. A
/// given seed therefore produces the same stream with any conforming standard
/// library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Child generator for sub-stream `stream`; independent of the parent's state.
  Rng split(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  double uniform();                      // [0, 1)
  std::size_t below(std::size_t bound);  // uniform on {0, ..., bound-1}
  double normal();                       // N(0, 1)
  std::complex<double> complex_normal(double variance = 1.0);  // CN(0, variance)

  /// `count` distinct values of {0, ..., n-1}, in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace nullcast

#endif  // NULLCAST_RNG_HPP
