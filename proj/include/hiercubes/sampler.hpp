#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hiercubes/lattice.hpp"
#include "hiercubes/pressure.hpp"

namespace hiercubes {

/// A placed block: level j and integer offset per axis, covering
/// [k 2^j, (k+1) 2^j) along each axis.
struct PlacedBlock {
  int level = 0;
  std::vector<std::uint64_t> offset;

  bool operator==(const PlacedBlock&) const = default;
};

/// Hierarchical occupancy tree stored in preorder.
class Configuration {
 public:
  enum class Node : std::uint8_t { Occupied = 0, Split = 1, EmptySite = 2 };

  Configuration(int d, int n, std::vector<Node> preorder);

  int d() const noexcept { return d_; }
  int level() const noexcept { return n_; }
  const std::vector<Node>& preorder() const noexcept { return nodes_; }

  /// N_j(omega) for j = 0..n.
  std::vector<std::uint64_t> counts() const;
  /// Bit j set when the j-block containing the origin is occupied.
  std::uint64_t origin_mask() const;
  std::vector<PlacedBlock> blocks() const;
  /// Compact text key, one character per node.
  std::string key() const;

 private:
  int d_;
  int n_;
  std::vector<Node> nodes_;
};

/// Occupied at level j with probability zhat_j / (1 + zhat_j), otherwise split
/// into 2^d independent children (an empty site at level 0). Randomness is a
/// pure function of (seed, path).
Configuration sample_configuration(const EffectiveActivities& zhat, int n, std::uint64_t seed,
                                   const std::vector<std::uint64_t>& path = {});

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;
};

struct SampleStats {
  int d = 1;
  int n = 0;
  std::uint64_t replicas = 0;
  std::uint64_t seed = 0;
  /// Presence of the j-block containing the origin.
  std::vector<MeanSE> rho_fixed;
  /// N_j |B_j| / |Lambda_n|.
  std::vector<MeanSE> rho_volume;
  /// rho_volume / |B_j|.
  std::vector<MeanSE> nu;
  MeanSE sigma;
};

/// Mergeable sums behind SampleStats.
class StatsAccumulator {
 public:
  StatsAccumulator(int d, int n);

  void add(const Configuration& config);
  void merge(const StatsAccumulator& other);
  SampleStats finish(std::uint64_t seed) const;

 private:
  int d_;
  int n_;
  std::uint64_t count_ = 0;
  std::vector<double> fixed_sum_, volume_sum_, volume_sq_;
  double sigma_sum_ = 0.0, sigma_sq_ = 0.0;
};

/// Stats over a given collection; throws MixedEnsembles when (d, n) differ.
SampleStats empirical_densities(const std::vector<Configuration>& configs, std::uint64_t seed = 0);

/// Samples replica r with path {r}. Replicas are processed in fixed chunks
/// merged in order, so the result does not depend on `threads` (0 = hardware).
SampleStats sample_stats(const EffectiveActivities& zhat, int n, std::uint64_t replicas, std::uint64_t seed,
                         unsigned threads = 0);

struct Cube {
  int level = 0;
  std::vector<double> corner;
  double side = 0.0;
};

/// Cubes of the rescaled set K_n in [0,1]^d, one per occupied node.
std::vector<Cube> fractal_export(const Configuration& config);

}  // namespace hiercubes
