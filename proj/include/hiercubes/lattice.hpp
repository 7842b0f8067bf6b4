#pragma once

#include <cstdint>

#include <gmpxx.h>

namespace hiercubes {

/// Geometry of the hierarchical lattice Z^d: a j-block is a cube of side 2^j
/// aligned to the 2^j grid, and splits into 2^d blocks of level j-1.
class LatticeParams {
 public:
  static constexpr int kMaxDimension = 30;

  explicit LatticeParams(int d);

  int d() const noexcept { return d_; }
  /// Children per split, 2^d.
  int children() const noexcept { return 1 << d_; }

  /// |B_j| as a double; exact while d*j <= 1023.
  double block_volume(int j) const;
  /// log |B_j| = d j log 2.
  double log_block_volume(int j) const;
  /// |B_j| exactly.
  mpz_class block_volume_exact(int j) const;

  /// Largest level for which |B_j| is finite in double arithmetic.
  int max_level() const noexcept { return 1000 / d_; }

  bool operator==(const LatticeParams&) const = default;

 private:
  int d_;
};

}  // namespace hiercubes
