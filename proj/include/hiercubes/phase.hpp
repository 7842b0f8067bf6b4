#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hiercubes/lattice.hpp"
#include "hiercubes/model.hpp"
#include "hiercubes/numeric.hpp"

namespace hiercubes {

/// c_d = sup_{x >= 1} (x - 1) / x^{2^d} = (m-1)^{m-1} / m^m.
double c_d(const LatticeParams& params);
HighPrec c_d_precise(const LatticeParams& params);
/// c_d by numerical maximisation, for cross-checking the closed form.
double c_d_numeric(const LatticeParams& params);
/// lambda_d = -log c_d / (2^d - 1).
double lambda_d(const LatticeParams& params);

struct FixedPointPair {
  double x_minus;
  double x_plus;
  double eps;
  HighPrec x_minus_precise;
  HighPrec x_plus_precise;
};

/// Solutions of x = 1 + eps x^{2^d} for 0 < eps < c_d. Throws NoFixedPoints
/// above c_d and TangentError within 1e-14 of it.
FixedPointPair fixed_points(double eps, const LatticeParams& params);
FixedPointPair fixed_points(const HighPrec& eps, const LatticeParams& params);

/// log eps_j = E_j - 2^d E_{j-1} for j >= 1, evaluated in extended precision
/// where the energies are supplied explicitly.
HighPrec log_eps_precise(const EnergyLandscape& energies, const LatticeParams& params, int j);

struct VIteration {
  /// w_n = log v_n, n = 0..n_max.
  std::vector<HighPrec> log_v;
  /// log eps_n for n = 1..n_max (index 0 unused).
  std::vector<double> log_eps;
  /// First n at which log v_n / |B_n| is positive and growing; -1 if never.
  int divergence_level = -1;

  double v(int n) const;
};

/// v_0 = 1 + exp(E_0 - mu), v_n = 1 + eps_n v_{n-1}^{2^d}. Requires finite E_j
/// on 0..n_max.
VIteration v_iteration(const EnergyLandscape& energies, const LatticeParams& params, const HighPrec& mu, int n_max);
VIteration v_iteration(const EnergyLandscape& energies, const LatticeParams& params, double mu, int n_max);

enum class PhaseKind { NoTransition, Continuous, FirstOrder, Undetermined };
enum class Certificate { AbsenceLiminf, ConstantEnergyFixedPoint, ZetaSolver, SumUjBound, NumericScan, None };

std::string_view to_string(PhaseKind kind);
std::string_view to_string(Certificate cert);

struct PhaseReport {
  PhaseKind kind = PhaseKind::Undetermined;
  double mu_c = kInf;
  HighPrec mu_c_precise = 0;
  /// Bound on the error of mu_c from truncating the zeta sequence.
  double mu_c_uncertainty = 0.0;
  std::optional<double> sigma_c;
  Certificate certificate = Certificate::None;
  std::vector<double> zeta;
  std::vector<double> rho_star;
  /// max_j |zeta_j - zhat_j(mu_c)|, when computed.
  std::optional<double> cross_check;
  std::vector<std::string> notes;
};

/// True if eps_j > c_d + margin on every level of the window.
bool absence_certificate(const EnergyLandscape& energies, const LatticeParams& params, LevelRange window,
                         double margin = 1e-9);

PhaseReport classify_constant_energy(double lambda, const LatticeParams& params);

struct SumUjCertificate {
  /// sum u_j <= 1/e - tol: a first-order transition is certified.
  bool sufficient = false;
  /// u_j <= 1 for all j and sum u_j < inf; failing this rules out a first-order transition.
  bool necessary = false;
  double sum = 0.0;
  double max_u = 0.0;
};

SumUjCertificate sum_uj_certificate(const EnergyLandscape& energies, const LatticeParams& params, double tol,
                                    int levels = 48);

struct ZetaResult {
  std::vector<double> zeta;
  double residual = kInf;
  bool converged = false;
  int iterations = 0;
};

/// Monotone iteration zeta_j <- u_j exp(|B_j| sum_{k >= j} log(1 + zeta_k) / |B_k|)
/// from zero, truncated at level N. Throws Diverging when an iterate leaves
/// the envelope u_j e^{a_j} (a_j = 1 by default).
ZetaResult zeta_solver(const EnergyLandscape& energies, const LatticeParams& params, int N, double tol,
                       const std::optional<std::vector<double>>& weights = std::nullopt, int max_iterations = 100000);

/// First-order report from the zeta fixed point. Throws NotSummable when
/// sum u_j diverges.
PhaseReport first_order_report(const EnergyLandscape& energies, const LatticeParams& params, int N, double tol,
                               const std::optional<std::vector<double>>& weights = std::nullopt);

struct MuScan {
  /// Midpoint of the final bracket, or +inf when the whole range is gas.
  double mu_c = kInf;
  double lo = 0.0;
  double hi = 0.0;
  int evaluations = 0;
};

enum class VRegime { Gas, Condensed, Ambiguous };

/// Gas (v_n -> inf): log v_n > 1000 and increasing for 5 levels. Condensed
/// (v_n bounded): log v_n <= 1000 with shrinking steps below 1e-10 for 5 levels.
VRegime v_indicator(const EnergyLandscape& energies, const LatticeParams& params, const HighPrec& mu, int n_max);

/// Bisection for mu_c on [mu_lo, mu_hi] using v_indicator.
MuScan mu_c_scan(const EnergyLandscape& energies, const LatticeParams& params, double mu_lo, double mu_hi, double tol,
                 int n_max = 400);

struct PhaseOptions {
  int N = 48;
  double tol = 1e-10;
  /// Scan range for mu - e_inf.
  double scan_lo = -20.0;
  double scan_hi = 20.0;
};

/// Full pipeline: constant energy by fixed points, then the absence
/// certificate, the sum-u_j certificate with the zeta solver, and finally a
/// numerical scan.
PhaseReport classify_phase(const EnergyLandscape& energies, const LatticeParams& params, const PhaseOptions& options);

}  // namespace hiercubes
