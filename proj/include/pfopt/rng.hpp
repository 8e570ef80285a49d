#pragma once

#include <cmath>
#include <cstdint>

namespace pfopt {

// Counter-based pseudo random stream. The state is (seed, stream id, counter);
// output i of a stream is a pure function of (seed, stream, i), so streams can
// be handed to parallel workers without shared mutable state, and the same
// (seed, stream, call sequence) reproduces identical samples bit for bit.
//
// split() derives a child stream id deterministically, which is how tuner
// arms and selection phases obtain fresh independent streams.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {
    std::uint64_t s = mix(seed ^ 0x5851F42D4C957F2Dull);
    base_ = mix(s ^ mix(stream ^ 0x14057B7EF767814Full));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Child stream with independent output sequence and a fresh counter.
  RngStream split(std::uint64_t key) const {
    return RngStream(seed_, mix(mix(stream_ ^ 0xA0761D6478BD642Full) + key));
  }

  std::uint64_t next_u64() {
    return mix(base_ + (++counter_) * 0x9E3779B97F4A7C15ull);
  }

  // Uniform in [0, 1).
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1]; safe as a log() argument.
  double next_unit_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the pair partner is cached.
  double next_normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = next_unit_pos();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace pfopt
