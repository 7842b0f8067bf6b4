#pragma once

#include <cstdint>
#include <vector>

#include "hiercubes/density.hpp"
#include "hiercubes/lattice.hpp"
#include "hiercubes/model.hpp"

namespace hiercubes {

struct EntropyValue {
  double s = 0.0;
  /// sum_j (1 - sigma_{j+1}) log 2 / |B_j|, including the levels past N.
  double upper_bound = 0.0;
  bool within_bound = true;
};

/// Multicanonical entropy s(rho, sigma). Profiles may carry sigma_inf > 0.
EntropyValue entropy(const DensityProfile& profile, const LatticeParams& params);

/// Same quantity through the effective densities rho_j / (1 - sigma_{j+1}).
double entropy_hat_form(const DensityProfile& profile, const LatticeParams& params);

/// Entropy of the ideal mixture.
double bernoulli_entropy(const DensityProfile& profile, const LatticeParams& params);

struct PhiSeries {
  double phi = 0.0;
  /// Bound on |Phi - Phi_M|.
  double tail_bound = 0.0;
  int order = 0;
};

PhiSeries phi_series(const DensityProfile& profile, const LatticeParams& params, int order = 60);

struct ChemicalPotentials {
  std::vector<double> mu;
  double mu_inf = 0.0;
  std::vector<double> mu_ber;
  double mu_ber_inf = 0.0;
};

ChemicalPotentials chemical_potentials(const DensityProfile& profile, const LatticeParams& params);

double free_energy(const DensityProfile& profile, const EnergyLandscape& energies, const LatticeParams& params);

/// sum_j rho_j log z_j / |B_j| + sigma_inf theta* + s. Table models are only
/// accepted with sigma_inf = 0.
double legendre_objective(const DensityProfile& profile, const ActivityModel& model, const LatticeParams& params);

/// log of the number of ways to place counts[j] blocks of level j in Lambda_n,
/// largest blocks first.
double exact_multicanonical_logcount(const LatticeParams& params, int n, const std::vector<std::uint64_t>& counts);

/// Block counts N_j ~ rho_j |Lambda_n| / |B_j| for j <= n, rounded by largest
/// remainder without exceeding the volume of Lambda_n.
std::vector<std::uint64_t> rounded_counts(const DensityProfile& profile, const LatticeParams& params, int n);

}  // namespace hiercubes
