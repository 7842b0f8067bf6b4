#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "hiercubes/lattice.hpp"
#include "hiercubes/sampler.hpp"

namespace hiercubes {

/// Exhaustive enumeration of the configurations of Lambda_n. Each
/// configuration is a bitmask over the blocks of the nesting tree, so the
/// tree may hold at most 32 blocks (TooLarge otherwise).
class EnumerationOracle {
 public:
  static constexpr int kMaxBlocks = 32;

  EnumerationOracle(const LatticeParams& params, int n);

  int level() const noexcept { return n_; }
  int block_count() const noexcept { return static_cast<int>(blocks_.size()); }
  const std::vector<std::uint32_t>& configurations() const noexcept { return masks_; }
  const PlacedBlock& block(int index) const { return blocks_.at(index); }
  int block_index(const PlacedBlock& block) const;
  std::uint32_t mask_of(const Configuration& config) const;

  std::vector<std::uint64_t> counts_of(std::uint32_t mask) const;
  /// Number of configurations with N_j = counts[j]; zero when infeasible.
  std::uint64_t multicanonical_count(const std::vector<std::uint64_t>& counts) const;
  /// (counts, multiplicity) for every attained count vector.
  std::vector<std::pair<std::vector<std::uint64_t>, std::uint64_t>> count_table() const;

  /// prod_j z_j^{N_j}; z must have n+1 entries.
  mpq_class weight(std::uint32_t mask, const std::vector<mpq_class>& z) const;
  mpq_class partition(const std::vector<mpq_class>& z) const;
  /// Probability that the given block is occupied.
  mpq_class block_probability(const std::vector<mpq_class>& z, const PlacedBlock& block) const;

 private:
  std::size_t dense_index(std::uint32_t mask) const;
  std::vector<std::uint64_t> decode(std::size_t index) const;
  mpq_class sum_tally(const std::vector<std::uint64_t>& tally, const std::vector<mpq_class>& z) const;

  LatticeParams params_;
  int n_;
  std::vector<PlacedBlock> blocks_;
  std::vector<int> level_start_;
  std::vector<std::uint32_t> level_mask_;
  std::vector<std::uint64_t> radix_;
  std::vector<std::uint32_t> masks_;
  std::vector<std::uint64_t> tally_;
};

struct PartitionValue {
  mpq_class exact;
  double log_value = 0.0;
};

PartitionValue enumerate_partition(const LatticeParams& params, int n, const std::vector<mpq_class>& z);
mpq_class block_probability(const LatticeParams& params, int n, const std::vector<mpq_class>& z,
                            const PlacedBlock& block);
std::uint64_t multicanonical_count(const LatticeParams& params, int n, const std::vector<std::uint64_t>& counts);

/// log of a positive rational without overflow.
double log_rational(const mpq_class& q);

}  // namespace hiercubes
