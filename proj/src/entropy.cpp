#include "hiercubes/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "hiercubes/error.hpp"
#include "hiercubes/numeric.hpp"

namespace hiercubes {

namespace {

// 1 - sigma_j for j = 0..N+1.
std::vector<double> complements(const DensityProfile& profile) {
  const int n = static_cast<int>(profile.rho.size());
  std::vector<double> out(n + 1);
  KahanSum sum(1.0);
  sum += -profile.sigma_inf;
  out[n] = sum.value();
  for (int j = n - 1; j >= 0; --j) {
    sum += -profile.rho[j];
    out[j] = std::max(0.0, sum.value());
  }
  return out;
}

void check(const DensityProfile& profile, const LatticeParams& params) {
  require(profile.d == params.d(), "profile dimension does not match lattice");
  validate_profile(profile);
}

double log_count_mpz(const mpz_class& x) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, x.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::numbers::ln2;
}

}  // namespace

EntropyValue entropy(const DensityProfile& profile, const LatticeParams& params) {
  check(profile, params);
  const auto c = complements(profile);
  KahanSum s, bound;
  for (int j = 0; j <= profile.N; ++j) {
    const double vol = params.block_volume(j);
    const double free_above = c[j + 1];
    bound += free_above * std::numbers::ln2 / vol;
    if (free_above <= 0) continue;
    double term = 0;
    const double rho = profile.rho[j];
    if (rho > 0) term += rho * (std::log(rho) - std::log(free_above));
    if (c[j] > 0) term += c[j] * (std::log(c[j]) - std::log(free_above));
    s += -term / vol;
  }
  // levels past N: rho_j = 0, 1 - sigma_{j+1} = 1 - sigma_inf
  const double q = std::ldexp(1.0, -params.d());
  bound += c[profile.N + 1] * std::numbers::ln2 * std::ldexp(1.0, -params.d() * (profile.N + 1)) / (1.0 - q);
  EntropyValue out;
  out.s = s.value();
  out.upper_bound = bound.value();
  out.within_bound = out.s >= -1e-14 && out.s <= out.upper_bound + 1e-14;
  return out;
}

double entropy_hat_form(const DensityProfile& profile, const LatticeParams& params) {
  check(profile, params);
  const auto c = complements(profile);
  KahanSum s;
  for (int j = 0; j <= profile.N; ++j) {
    if (c[j + 1] <= 0) continue;
    const double hat = std::min(1.0, profile.rho[j] / c[j + 1]);
    s += -c[j + 1] * bernoulli_neg_entropy(hat) / params.block_volume(j);
  }
  return s.value();
}

double bernoulli_entropy(const DensityProfile& profile, const LatticeParams& params) {
  check(profile, params);
  KahanSum s;
  for (int j = 0; j <= profile.N; ++j) s += -bernoulli_neg_entropy(profile.rho[j]) / params.block_volume(j);
  return s.value();
}

PhiSeries phi_series(const DensityProfile& profile, const LatticeParams& params, int order) {
  check(profile, params);
  require(order >= 2, "series order must be at least 2");
  double norm = profile.sigma_inf;
  for (double r : profile.rho) norm += std::abs(r);
  if (!(norm < 1.0)) fail(ErrorCode::OutsideUnitBall, "sum rho_j + sigma_inf must be < 1");
  const auto c = complements(profile);
  // sigma_j = 1 - c_j, recomputed directly to avoid cancellation for small densities
  std::vector<double> sigma(profile.N + 2);
  sigma[profile.N + 1] = profile.sigma_inf;
  for (int j = profile.N; j >= 0; --j) sigma[j] = sigma[j + 1] + profile.rho[j];
  KahanSum phi;
  for (int j = 0; j <= profile.N; ++j) {
    const double vol = params.block_volume(j);
    double a = sigma[j], b = sigma[j + 1];
    double pa = a, pb = b;
    for (int m = 2; m <= order; ++m) {
      pa *= a;
      pb *= b;
      phi += (pa - pb) / (static_cast<double>(m) * (m - 1) * vol);
    }
  }
  PhiSeries out;
  out.phi = phi.value();
  out.tail_bound = std::pow(norm, order + 1) / (1.0 - norm);
  out.order = order;
  return out;
}

ChemicalPotentials chemical_potentials(const DensityProfile& profile, const LatticeParams& params) {
  check(profile, params);
  const auto c = complements(profile);
  ChemicalPotentials out;
  out.mu.resize(profile.N + 1);
  out.mu_ber.resize(profile.N + 1);
  KahanSum below;  // sum_{k<j} log(1 - hat_k) / |B_k|
  for (int j = 0; j <= profile.N; ++j) {
    const double rho = profile.rho[j];
    if (c[j + 1] <= 0 || rho >= c[j + 1] * (1.0 - 1e-15)) {
      fail(ErrorCode::SaturatedProfile, "effective density of level " + std::to_string(j) + " reaches 1");
    }
    const double vol = params.block_volume(j);
    // log(hat / (1 - hat)) = log rho - log(1 - sigma_j)
    const double logit = rho > 0 ? std::log(rho) - std::log(c[j]) : -kInf;
    out.mu[j] = logit - vol * below.value();
    below += std::log(c[j] / c[j + 1]) / vol;
    out.mu_ber[j] = rho > 0 ? std::log(rho) - std::log1p(-rho) : -kInf;
  }
  out.mu_inf = -below.value();
  out.mu_ber_inf = 0.0;
  return out;
}

double free_energy(const DensityProfile& profile, const EnergyLandscape& energies, const LatticeParams& params) {
  check(profile, params);
  KahanSum f;
  for (int j = 0; j <= profile.N; ++j) {
    const double rho = profile.rho[j];
    if (rho == 0) continue;
    const double surplus = energies.surplus(params, j);
    if (!std::isfinite(surplus)) {
      fail(ErrorCode::InfiniteEnergyOccupied, "rho_" + std::to_string(j) + " > 0 on a level with E_j = +inf");
    }
    f += rho * (energies.e_inf() + surplus / params.block_volume(j));
  }
  f += profile.sigma_inf * energies.e_inf();
  f += -entropy(profile, params).s;
  return f.value();
}

double legendre_objective(const DensityProfile& profile, const ActivityModel& model, const LatticeParams& params) {
  check(profile, params);
  KahanSum obj;
  for (int j = 0; j <= profile.N; ++j) {
    const double rho = profile.rho[j];
    if (rho == 0) continue;
    const double lz = model.log_activity_per_site(params, j);
    if (lz == -kInf) return -kInf;
    obj += rho * lz;
  }
  if (profile.sigma_inf > 0) {
    if (model.kind() == ModelKind::Table) {
      fail(ErrorCode::UnsupportedModel, "sigma_inf > 0 needs a model with a limit log z_j / |B_j|");
    }
    obj += profile.sigma_inf * (*model.mu() - model.landscape()->e_inf());
  }
  obj += entropy(profile, params).s;
  return obj.value();
}

double exact_multicanonical_logcount(const LatticeParams& params, int n, const std::vector<std::uint64_t>& counts) {
  require(n >= 0, "level must be nonnegative");
  require(static_cast<int>(counts.size()) <= n + 1, "counts beyond level n");
  mpz_class remaining = params.block_volume_exact(n);
  double total = 0.0;
  for (int j = static_cast<int>(counts.size()) - 1; j >= 0; --j) {
    const mpz_class slots = remaining / params.block_volume_exact(j);
    const mpz_class need(static_cast<unsigned long>(counts[j]));
    if (need > slots) fail(ErrorCode::InfeasibleCounts, "counts do not fit in Lambda_n");
    if (counts[j] == 0) continue;
    mpz_class binom;
    mpz_bin_ui(binom.get_mpz_t(), slots.get_mpz_t(), static_cast<unsigned long>(counts[j]));
    total += log_count_mpz(binom);
    remaining -= need * params.block_volume_exact(j);
  }
  return total;
}

std::vector<std::uint64_t> rounded_counts(const DensityProfile& profile, const LatticeParams& params, int n) {
  check(profile, params);
  require(n >= 0 && params.d() * n <= 62, "volume of Lambda_n must fit in 64 bits");
  const int top = std::min(n, profile.N);
  const std::uint64_t volume = std::uint64_t{1} << (params.d() * n);
  std::vector<std::uint64_t> out(top + 1);
  std::vector<double> frac(top + 1);
  std::uint64_t used = 0;
  double frac_total = 0;
  for (int j = 0; j <= top; ++j) {
    const double target = profile.rho[j] * std::ldexp(1.0, params.d() * (n - j));
    out[j] = static_cast<std::uint64_t>(std::floor(target));
    frac[j] = target - std::floor(target);
    frac_total += frac[j];
    used += out[j] << (params.d() * j);
  }
  std::vector<int> order(top + 1);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return frac[a] > frac[b]; });
  auto extra = static_cast<long>(std::llround(frac_total));
  for (int j : order) {
    if (extra <= 0) break;
    if (frac[j] <= 0) continue;
    const std::uint64_t cost = std::uint64_t{1} << (params.d() * j);
    if (used + cost > volume) continue;
    ++out[j];
    used += cost;
    --extra;
  }
  return out;
}

}  // namespace hiercubes
