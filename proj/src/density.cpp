#include "hiercubes/density.hpp"

#include <cmath>

#include "hiercubes/error.hpp"
#include "hiercubes/numeric.hpp"

namespace hiercubes {

namespace {

constexpr double kSaturation = 1.0 - 1e-12;

// Suffix sums sigma_inf + sum_{k >= j} rho_k for j = 0..N+1.
std::vector<double> tail_sums(const DensityProfile& profile) {
  const int n = static_cast<int>(profile.rho.size());
  std::vector<double> out(n + 1);
  KahanSum sum(profile.sigma_inf);
  out[n] = profile.sigma_inf;
  for (int j = n - 1; j >= 0; --j) {
    sum += profile.rho[j];
    out[j] = sum.value();
  }
  return out;
}

}  // namespace

double DensityProfile::sigma_from(int j) const {
  require(j >= 0, "level must be nonnegative");
  KahanSum sum(sigma_inf);
  for (int k = static_cast<int>(rho.size()) - 1; k >= j; --k) sum += rho[k];
  return sum.value();
}

double DensityProfile::nu(const LatticeParams& params, int j) const {
  require(j >= 0 && j < static_cast<int>(rho.size()), "level outside the profile");
  return rho[j] / params.block_volume(j);
}

DensityProfile make_profile(int d, std::vector<double> rho, double sigma_inf) {
  require(!rho.empty(), "profile must not be empty");
  DensityProfile out;
  out.d = d;
  out.N = static_cast<int>(rho.size()) - 1;
  out.rho = std::move(rho);
  out.sigma_inf = sigma_inf;
  out.sigma = out.sigma_from(0);
  validate_profile(out);
  return out;
}

void validate_profile(const DensityProfile& profile, double tol) {
  const LatticeParams params(profile.d);
  if (static_cast<int>(profile.rho.size()) != profile.N + 1) {
    fail(ErrorCode::InvalidProfile, "rho length does not match N");
  }
  if (!(profile.sigma_inf >= 0.0 && profile.sigma_inf <= 1.0)) {
    fail(ErrorCode::InvalidProfile, "sigma_inf must lie in [0, 1]");
  }
  const std::vector<double> tails = tail_sums(profile);
  for (int j = 0; j <= profile.N; ++j) {
    const double r = profile.rho[j];
    if (!(r >= 0.0 && r <= 1.0)) fail(ErrorCode::InvalidProfile, "rho_j must lie in [0, 1]");
    if (r > 1.0 - tails[j + 1] + tol) {
      fail(ErrorCode::InvalidProfile, "rho_" + std::to_string(j) + " exceeds 1 - sigma_" + std::to_string(j + 1));
    }
  }
  if (tails[0] > 1.0 + tol) fail(ErrorCode::InvalidProfile, "sigma exceeds 1");
  if (std::abs(tails[0] - profile.sigma) > tol * 1e3 + 1e-12) {
    fail(ErrorCode::InvalidProfile, "sigma differs from sigma_inf + sum rho");
  }
}

DensityProfile finite_volume_densities(const EffectiveActivities& zhat, int n) {
  require(n >= 0 && n <= zhat.N, "level outside the computed range");
  DensityProfile out;
  out.d = zhat.params.d();
  out.N = n;
  out.rho.resize(n + 1);
  // suffix = sum_{k > j} log(1 + zhat_k)
  KahanSum suffix;
  for (int j = n; j >= 0; --j) {
    out.rho[j] = logistic_from_log(zhat.log_zhat[j]) * std::exp(-suffix.value());
    suffix += softplus(zhat.log_zhat[j]);
  }
  out.sigma = -std::expm1(-suffix.value());
  out.sigma_inf = 0.0;
  return out;
}

DensityProfile densities(const PressureResult& result) {
  switch (result.regime_hint) {
    case Regime::Summable:
      return finite_volume_densities(result.activities, result.N_used);
    case Regime::Divergent: {
      DensityProfile out;
      out.d = result.activities.params.d();
      out.N = result.N_used;
      out.rho.assign(result.N_used + 1, 0.0);
      out.sigma = 1.0;
      out.sigma_inf = 1.0;
      return out;
    }
    case Regime::Undetermined:
      break;
  }
  fail(ErrorCode::Undetermined, "regime could not be classified; densities are not defined");
}

double Inversion::zhat(int j) const {
  const double lz = log_zhat.at(j);
  return lz >= 709.0 ? kInf : std::exp(lz);
}

double Inversion::z(int j) const {
  const double lz = log_z.at(j);
  return lz >= 709.0 ? kInf : std::exp(lz);
}

Inversion invert_densities(const DensityProfile& profile, const LatticeParams& params) {
  require(profile.d == params.d(), "profile dimension does not match lattice");
  validate_profile(profile);
  if (profile.sigma_inf != 0.0) {
    fail(ErrorCode::InvalidProfile, "inversion requires sigma_inf = 0");
  }
  const std::vector<double> tails = tail_sums(profile);
  const int n = profile.N;
  Inversion out;
  out.log_zhat.resize(n + 1);
  out.log_z.resize(n + 1);
  out.p_partial.resize(n + 1);
  KahanSum p;
  for (int j = 0; j <= n; ++j) {
    if (tails[j] >= kSaturation) {
      fail(ErrorCode::SaturatedProfile, "sum_{k >= " + std::to_string(j) + "} rho_k reaches 1");
    }
    const double rho = profile.rho[j];
    const double free = 1.0 - tails[j];
    const double lz_hat = rho > 0 ? std::log(rho) - std::log(free) : -kInf;
    out.log_zhat[j] = lz_hat;
    const double p_prev = j == 0 ? 0.0 : out.p_partial[j - 1];
    out.log_z[j] = lz_hat == -kInf ? -kInf : lz_hat + params.block_volume(j) * p_prev;
    p += std::log1p(rho / free) / params.block_volume(j);
    out.p_partial[j] = p.value();
  }
  out.p = out.p_partial[n];
  return out;
}

double equation_of_state(const DensityProfile& profile, const LatticeParams& params) {
  return invert_densities(profile, params).p;
}

}  // namespace hiercubes
