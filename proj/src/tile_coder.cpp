#include "tetd/envs/tile_coder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tetd {

namespace {
std::uint64_t fnv1a64(std::span<const std::int64_t> values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::int64_t v : values) {
    auto u = static_cast<std::uint64_t>(v);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (u >> (8 * byte)) & 0xffULL;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}
}  // namespace

TileCoder::TileCoder(int num_tilings, int tiles_per_dim, int hash_size,
                     std::vector<std::pair<double, double>> ranges)
    : num_tilings_(num_tilings),
      tiles_per_dim_(tiles_per_dim),
      hash_size_(hash_size),
      ranges_(std::move(ranges)) {
  if (num_tilings_ <= 0 || tiles_per_dim_ <= 0 || hash_size_ <= 0)
    throw std::invalid_argument("TileCoder: sizes must be positive");
  for (const auto& [lo, hi] : ranges_)
    if (!(lo < hi)) throw std::invalid_argument("TileCoder: empty range");
}

std::vector<int> TileCoder::active_indices(std::span<const double> observation) const {
  if (static_cast<int>(observation.size()) != dims())
    throw std::invalid_argument("TileCoder: observation dimension mismatch");
  for (double v : observation)
    if (!std::isfinite(v)) throw std::invalid_argument("TileCoder: non-finite observation");

  // Quantize at tilings * tiles resolution, then shift each tiling by the
  // classic asymmetric displacement (2d + 1 units in dimension d).
  std::vector<std::int64_t> q(dims());
  for (int d = 0; d < dims(); ++d) {
    const auto& [lo, hi] = ranges_[d];
    const double unit = std::clamp((observation[d] - lo) / (hi - lo), 0.0, 1.0);
    q[d] = static_cast<std::int64_t>(std::floor(unit * tiles_per_dim_ * num_tilings_));
  }

  std::vector<int> out(num_tilings_);
  std::vector<std::int64_t> key(dims() + 1);
  for (int tiling = 0; tiling < num_tilings_; ++tiling) {
    key[0] = tiling;
    for (int d = 0; d < dims(); ++d) {
      const std::int64_t shifted = q[d] + static_cast<std::int64_t>(tiling) * (2 * d + 1);
      key[d + 1] = shifted >= 0 ? shifted / num_tilings_ : (shifted - num_tilings_ + 1) / num_tilings_;
    }
    out[tiling] = static_cast<int>(fnv1a64(key) % static_cast<std::uint64_t>(hash_size_));
  }
  return out;
}

}  // namespace tetd
