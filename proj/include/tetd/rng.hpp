#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace tetd {

// 64-bit mixer used to derive independent stream seeds from (base, index) keys.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(base ^ splitmix64(a)) ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

// Deterministic generator. All sampling is implemented here (not via std
// distributions) so that streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  int uniform_int(int n) {  // [0, n)
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    return static_cast<int>(engine_() % static_cast<std::uint64_t>(n));
  }

  double normal() {
    // Box-Muller; one value per call keeps the stream layout simple.
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Samples an index from an (unnormalized is not allowed) probability vector
  // by CDF inversion. The last positive entry absorbs rounding slack.
  int categorical(std::span<const double> probs) {
    const double u = uniform01();
    double acc = 0.0;
    int last_positive = -1;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      if (probs[k] > 0.0) last_positive = static_cast<int>(k);
      acc += probs[k];
      if (u < acc) return static_cast<int>(k);
    }
    if (last_positive < 0) throw std::domain_error("categorical: all-zero probability vector");
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tetd
