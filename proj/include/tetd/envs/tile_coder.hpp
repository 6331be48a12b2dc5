#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace tetd {

// Hashing tile coder: each of `num_tilings` offset grids contributes one
// active index in [0, hash_size). Observations are clipped to the per-
// dimension ranges and scaled to unit intervals before gridding; collisions
// are resolved by hashing alone.
class TileCoder {
 public:
  TileCoder(int num_tilings, int tiles_per_dim, int hash_size,
            std::vector<std::pair<double, double>> ranges);

  // One index per tiling (duplicates possible under hash collisions).
  std::vector<int> active_indices(std::span<const double> observation) const;

  int num_tilings() const { return num_tilings_; }
  int hash_size() const { return hash_size_; }
  int dims() const { return static_cast<int>(ranges_.size()); }

 private:
  int num_tilings_;
  int tiles_per_dim_;
  int hash_size_;
  std::vector<std::pair<double, double>> ranges_;
};

}  // namespace tetd
