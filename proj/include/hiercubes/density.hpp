#pragma once

#include <vector>

#include "hiercubes/lattice.hpp"
#include "hiercubes/pressure.hpp"

namespace hiercubes {

/// Block densities rho_j (probability that a fixed j-block is present).
struct DensityProfile {
  int d = 1;
  std::vector<double> rho;
  double sigma = 0.0;
  double sigma_inf = 0.0;
  int N = 0;

  /// sigma_j = sigma_inf + sum_{k >= j} rho_k; sigma_0 = sigma, sigma_{N+1} = sigma_inf.
  double sigma_from(int j) const;
  /// rho_j / |B_j|.
  double nu(const LatticeParams& params, int j) const;
};

/// Builds a profile from rho and sigma_inf and checks its invariants.
DensityProfile make_profile(int d, std::vector<double> rho, double sigma_inf = 0.0);

/// Throws InvalidProfile on a violated invariant.
void validate_profile(const DensityProfile& profile, double tol = 1e-12);

/// Infinite-volume densities from a pressure result: finite-volume values at
/// N_used in the summable regime, rho = 0 and sigma = 1 in the divergent one.
DensityProfile densities(const PressureResult& result);

DensityProfile finite_volume_densities(const EffectiveActivities& zhat, int n);

struct Inversion {
  std::vector<double> log_zhat;
  std::vector<double> log_z;
  std::vector<double> p_partial;
  double p = 0.0;

  double zhat(int j) const;
  /// +inf when z_j exceeds the double range.
  double z(int j) const;
};

Inversion invert_densities(const DensityProfile& profile, const LatticeParams& params);

double equation_of_state(const DensityProfile& profile, const LatticeParams& params);

}  // namespace hiercubes
