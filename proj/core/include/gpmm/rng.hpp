#ifndef GPMM_RNG_HPP
#define GPMM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace gpmm {

// Seedable Gaussian source with a fixed Box-Muller transform so generated
// streams are bit-identical across platforms (std::normal_distribution is
// implementation-defined).
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

  // Derived stream for parallel/per-sequence generation: deterministic in
  // (seed, stream_index).
  GaussianRng(std::uint64_t seed, std::uint64_t stream_index)
      : engine_(seed ^ (0x9e3779b97f4a7c15ULL * (stream_index + 1))) {}

  double uniform() {
    // 53-bit mantissa uniform in (0, 1].
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace gpmm

#endif
