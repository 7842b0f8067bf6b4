#include "hiercubes/phase.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "hiercubes/error.hpp"
#include "hiercubes/pressure.hpp"

namespace hiercubes {

namespace {

namespace bmp = boost::multiprecision;

constexpr double kTangentWindow = 1e-14;
constexpr double kLambdaWindow = 1e-12;
constexpr double kGasThreshold = 1000.0;
constexpr int kIndicatorRun = 5;

HighPrec root_in(const HighPrec& eps, int m, HighPrec a, HighPrec b) {
  auto g = [&](const HighPrec& x) { return 1 + eps * bmp::pow(x, m) - x; };
  boost::math::tools::eps_tolerance<HighPrec> tol(150);
  std::uintmax_t iters = 400;
  const auto r = boost::math::tools::toms748_solve(g, a, b, g(a), g(b), tol, iters);
  return (r.first + r.second) / 2;
}

}  // namespace

std::string_view to_string(PhaseKind kind) {
  switch (kind) {
    case PhaseKind::NoTransition:
      return "NoTransition";
    case PhaseKind::Continuous:
      return "Continuous";
    case PhaseKind::FirstOrder:
      return "FirstOrder";
    case PhaseKind::Undetermined:
      return "Undetermined";
  }
  return "Undetermined";
}

std::string_view to_string(Certificate cert) {
  switch (cert) {
    case Certificate::AbsenceLiminf:
      return "AbsenceLiminf";
    case Certificate::ConstantEnergyFixedPoint:
      return "ConstantEnergyFixedPoint";
    case Certificate::ZetaSolver:
      return "ZetaSolver";
    case Certificate::SumUjBound:
      return "SumUjBound";
    case Certificate::NumericScan:
      return "NumericScan";
    case Certificate::None:
      return "None";
  }
  return "None";
}

double c_d(const LatticeParams& params) {
  const double m = params.children();
  return std::pow((m - 1) / m, m - 1) / m;
}

HighPrec c_d_precise(const LatticeParams& params) {
  const HighPrec m = params.children();
  return bmp::pow((m - 1) / m, m - 1) / m;
}

double c_d_numeric(const LatticeParams& params) {
  const int m = params.children();
  auto neg = [m](double x) { return -(x - 1) / std::pow(x, m); };
  const auto r = boost::math::tools::brent_find_minima(neg, 1.0, 3.0, std::numeric_limits<double>::digits);
  return -r.second;
}

double lambda_d(const LatticeParams& params) {
  return static_cast<double>(-bmp::log(c_d_precise(params)) / (params.children() - 1));
}

FixedPointPair fixed_points(double eps, const LatticeParams& params) { return fixed_points(HighPrec(eps), params); }

FixedPointPair fixed_points(const HighPrec& eps, const LatticeParams& params) {
  require(eps > 0, "eps must be positive");
  const int m = params.children();
  const HighPrec cd = c_d_precise(params);
  if (bmp::abs(eps - cd) < kTangentWindow) {
    const double x = static_cast<double>(m) / (m - 1);
    throw TangentError(x, "eps = c_d; the unique fixed point is m/(m-1)");
  }
  if (eps > cd) fail(ErrorCode::NoFixedPoints, "eps > c_d: f_eps(x) > x for all x");
  const HighPrec x_crit = bmp::pow(1 / (eps * m), HighPrec(1) / (m - 1));
  const HighPrec x_ub = bmp::pow(1 / eps, HighPrec(1) / (m - 1)) + 1;
  FixedPointPair out;
  out.x_minus_precise = root_in(eps, m, HighPrec(1), x_crit);
  out.x_plus_precise = root_in(eps, m, x_crit, x_ub);
  out.x_minus = static_cast<double>(out.x_minus_precise);
  out.x_plus = static_cast<double>(out.x_plus_precise);
  out.eps = static_cast<double>(eps);
  return out;
}

HighPrec log_eps_precise(const EnergyLandscape& energies, const LatticeParams& params, int j) {
  require(j >= 1, "eps_j is defined for j >= 1");
  const int m = params.children();
  if (energies.is_constant()) return -HighPrec(energies.constant_energy()) * (m - 1);
  const auto& prefix = energies.prefix();
  if (energies.surplus_is_primary()) {
    return HighPrec(energies.surplus(params, j)) - HighPrec(energies.surplus(params, j - 1)) * m;
  }
  if (j < static_cast<int>(prefix.size()) && std::isfinite(prefix[j]) && std::isfinite(prefix[j - 1])) {
    return HighPrec(prefix[j]) - HighPrec(prefix[j - 1]) * m;
  }
  return HighPrec(energies.log_eps(params, j));
}

double VIteration::v(int n) const {
  const double w = static_cast<double>(log_v.at(n));
  return w >= 709.0 ? kInf : std::exp(w);
}

namespace {

HighPrec first_energy(const EnergyLandscape& energies, const LatticeParams& params) {
  if (energies.is_constant()) return HighPrec(energies.constant_energy());
  const auto& prefix = energies.prefix();
  return HighPrec(prefix.empty() ? energies.energy(params, 0) : prefix[0]);
}

void require_finite_energies(const EnergyLandscape& energies, const LatticeParams& params, int n_max) {
  for (int j = 0; j <= n_max; ++j) {
    if (!std::isfinite(energies.surplus(params, j))) {
      fail(ErrorCode::UnsupportedModel, "v iteration needs finite E_j on every level");
    }
  }
}

// Tracks the gas / condensed criteria along w_n = log v_n.
class IndicatorState {
 public:
  VRegime push(const HighPrec& w, const HighPrec& prev, bool has_prev) {
    if (!has_prev) return VRegime::Ambiguous;
    const HighPrec step = w - prev;
    gas_run_ = (w > kGasThreshold && step > 0) ? gas_run_ + 1 : 0;
    const HighPrec size = bmp::abs(step);
    const bool settling = size <= 1e-10 && (size < 0.9 * last_step_ || size <= HighPrec(1e-45));
    condensed_run_ = (w <= kGasThreshold && settling) ? condensed_run_ + 1 : 0;
    last_step_ = size;
    if (gas_run_ >= kIndicatorRun) return VRegime::Gas;
    if (condensed_run_ >= kIndicatorRun) return VRegime::Condensed;
    return VRegime::Ambiguous;
  }

 private:
  int gas_run_ = 0;
  int condensed_run_ = 0;
  HighPrec last_step_ = HighPrec(1e300);
};

}  // namespace

VIteration v_iteration(const EnergyLandscape& energies, const LatticeParams& params, const HighPrec& mu, int n_max) {
  require(n_max >= 0 && n_max <= params.max_level(), "n_max outside the representable range");
  require_finite_energies(energies, params, n_max);
  const int m = params.children();
  VIteration out;
  out.log_v.resize(n_max + 1);
  out.log_eps.assign(n_max + 1, 0.0);
  out.log_v[0] = softplus(HighPrec(first_energy(energies, params) - mu));
  IndicatorState state;
  for (int n = 1; n <= n_max; ++n) {
    const HighPrec le = log_eps_precise(energies, params, n);
    out.log_eps[n] = static_cast<double>(le);
    out.log_v[n] = softplus(HighPrec(le + m * out.log_v[n - 1]));
    if (state.push(out.log_v[n], out.log_v[n - 1], true) == VRegime::Gas && out.divergence_level < 0) {
      out.divergence_level = n;
    }
  }
  return out;
}

VIteration v_iteration(const EnergyLandscape& energies, const LatticeParams& params, double mu, int n_max) {
  return v_iteration(energies, params, HighPrec(mu), n_max);
}

VRegime v_indicator(const EnergyLandscape& energies, const LatticeParams& params, const HighPrec& mu, int n_max) {
  require(n_max >= 1 && n_max <= params.max_level(), "n_max outside the representable range");
  require_finite_energies(energies, params, n_max);
  const int m = params.children();
  HighPrec w = softplus(HighPrec(first_energy(energies, params) - mu));
  IndicatorState state;
  for (int n = 1; n <= n_max; ++n) {
    const HighPrec next = softplus(HighPrec(log_eps_precise(energies, params, n) + m * w));
    const VRegime r = state.push(next, w, true);
    if (r != VRegime::Ambiguous) return r;
    w = next;
  }
  return VRegime::Ambiguous;
}

bool absence_certificate(const EnergyLandscape& energies, const LatticeParams& params, LevelRange window,
                         double margin) {
  require(window.first >= 1 && window.first <= window.last, "window must be a nonempty range of levels >= 1");
  const double threshold = std::log(c_d(params) + margin);
  for (int j = window.first; j <= window.last; ++j) {
    const double cur = energies.surplus(params, j);
    const double prev = energies.surplus(params, j - 1);
    if (!std::isfinite(cur)) continue;  // z_j = 0, eps_j = +inf
    if (!std::isfinite(prev)) return false;
    if (!(energies.log_eps(params, j) > threshold)) return false;
  }
  return true;
}

PhaseReport classify_constant_energy(double lambda, const LatticeParams& params) {
  require(std::isfinite(lambda), "lambda must be finite");
  const double ld = lambda_d(params);
  PhaseReport out;
  if (lambda < ld - kLambdaWindow) {
    out.kind = PhaseKind::NoTransition;
    out.mu_c = kInf;
    out.certificate = Certificate::AbsenceLiminf;
    return out;
  }
  if (lambda <= ld + kLambdaWindow) {
    out.kind = PhaseKind::Undetermined;
    out.certificate = Certificate::None;
    out.notes.push_back("lambda equals lambda_d within 1e-12; the tangent case is not classified");
    return out;
  }
  const int m = params.children();
  const HighPrec eps = bmp::exp(-HighPrec(lambda) * (m - 1));
  const FixedPointPair fp = fixed_points(eps, params);
  out.kind = PhaseKind::Continuous;
  out.mu_c_precise = HighPrec(lambda) - bmp::log(fp.x_plus_precise - 1);
  out.mu_c = static_cast<double>(out.mu_c_precise);
  out.sigma_c = 1.0;
  out.certificate = Certificate::ConstantEnergyFixedPoint;
  return out;
}

SumUjCertificate sum_uj_certificate(const EnergyLandscape& energies, const LatticeParams& params, double tol,
                                    int levels) {
  require(tol >= 0, "tol must be nonnegative");
  SumUjCertificate out;
  out.sum = energies.u_tail_after(params, -1);
  int upto = std::min(params.max_level(), levels);
  if (!energies.is_constant()) upto = std::max(upto, static_cast<int>(energies.prefix().size()) - 1);
  for (int j = 0; j <= upto; ++j) out.max_u = std::max(out.max_u, std::exp(-energies.surplus(params, j)));
  out.necessary = std::isfinite(out.sum) && out.max_u <= 1.0;
  // allowance for round-off in the compensated sum
  out.sufficient = out.necessary && out.sum <= (std::exp(-1.0) - tol) * (1.0 + 4 * DBL_EPSILON);
  return out;
}

ZetaResult zeta_solver(const EnergyLandscape& energies, const LatticeParams& params, int N, double tol,
                       const std::optional<std::vector<double>>& weights, int max_iterations) {
  require(N >= 0 && N <= params.max_level(), "N outside the representable range");
  require(tol > 0, "tol must be positive");
  if (weights) require(static_cast<int>(weights->size()) == N + 1, "weights must cover levels 0..N");
  const int m = params.children();
  std::vector<double> u(N + 1), envelope(N + 1);
  for (int j = 0; j <= N; ++j) {
    u[j] = std::exp(energies.log_u(params, j));
    const double a = weights ? (*weights)[j] : 1.0;
    envelope[j] = a == kInf ? kInf : u[j] * std::exp(a) * (1.0 + 1e-12);
  }
  auto sweep = [&](const std::vector<double>& zeta, std::vector<double>& next) {
    double t = 0;
    for (int j = N; j >= 0; --j) {
      t = std::log1p(zeta[j]) + t / m;
      next[j] = u[j] * std::exp(t);
    }
  };
  ZetaResult out;
  std::vector<double> zeta(N + 1, 0.0), next(N + 1);
  for (int it = 1; it <= max_iterations; ++it) {
    sweep(zeta, next);
    double step = 0;
    for (int j = 0; j <= N; ++j) {
      if (!(next[j] <= envelope[j]) || !std::isfinite(next[j])) {
        fail(ErrorCode::Diverging, "zeta iterate leaves the envelope at level " + std::to_string(j));
      }
      step = std::max(step, next[j] - zeta[j]);
    }
    zeta.swap(next);
    out.iterations = it;
    if (step < tol) {
      out.converged = true;
      break;
    }
  }
  sweep(zeta, next);
  double residual = 0;
  for (int j = 0; j <= N; ++j) residual = std::max(residual, std::abs(next[j] - zeta[j]));
  out.residual = residual;
  out.zeta = std::move(zeta);
  return out;
}

PhaseReport first_order_report(const EnergyLandscape& energies, const LatticeParams& params, int N, double tol,
                               const std::optional<std::vector<double>>& weights) {
  const double total_u = energies.u_tail_after(params, -1);
  if (!std::isfinite(total_u)) fail(ErrorCode::NotSummable, "sum u_j diverges; the zeta fixed point does not apply");
  const ZetaResult z = zeta_solver(energies, params, N, std::min(tol, 1e-14), weights);
  if (!z.converged) fail(ErrorCode::Undetermined, "zeta iteration did not converge");

  PhaseReport out;
  KahanSum per_site, total;
  for (int j = 0; j <= N; ++j) {
    const double l = std::log1p(z.zeta[j]);
    per_site += l / params.block_volume(j);
    total += l;
  }
  out.mu_c = energies.e_inf() + per_site.value();
  out.mu_c_precise = HighPrec(out.mu_c);
  out.mu_c_uncertainty = std::numbers::e * energies.u_tail_after(params, N) / params.block_volume(N + 1);
  out.sigma_c = -std::expm1(-total.value());
  out.rho_star.resize(N + 1);
  double suffix = 0;
  for (int j = N; j >= 0; --j) {
    out.rho_star[j] = z.zeta[j] / (1.0 + z.zeta[j]) * std::exp(-suffix);
    suffix += std::log1p(z.zeta[j]);
  }
  out.zeta = z.zeta;
  out.kind = PhaseKind::FirstOrder;
  out.certificate = Certificate::ZetaSolver;

  const auto ea = effective_activities(ActivityModel::energy(energies, out.mu_c), params, N);
  double worst = 0;
  for (int j = 0; j <= N; ++j) worst = std::max(worst, std::abs(z.zeta[j] - ea.zhat(j)));
  out.cross_check = worst;
  return out;
}

MuScan mu_c_scan(const EnergyLandscape& energies, const LatticeParams& params, double mu_lo, double mu_hi, double tol,
                 int n_max) {
  require(std::isfinite(mu_lo) && std::isfinite(mu_hi) && mu_lo < mu_hi, "mu range must be finite and ordered");
  require(tol > 0, "tol must be positive");
  n_max = std::min(n_max, params.max_level());
  MuScan out;
  auto eval = [&](double mu) {
    ++out.evaluations;
    const VRegime r = v_indicator(energies, params, HighPrec(mu), n_max);
    if (r == VRegime::Ambiguous) {
      fail(ErrorCode::Undetermined, "v_n indicator ambiguous at mu = " + std::to_string(mu));
    }
    return r;
  };
  const VRegime lo = eval(mu_lo);
  const VRegime hi = eval(mu_hi);
  if (lo == VRegime::Gas && hi == VRegime::Gas) {
    out.mu_c = kInf;
    out.lo = mu_lo;
    out.hi = mu_hi;
    return out;
  }
  if (lo == VRegime::Condensed) fail(ErrorCode::Undetermined, "condensed at the lower end; mu_c lies below the range");
  double a = mu_lo, b = mu_hi;
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (eval(mid) == VRegime::Gas) {
      a = mid;
    } else {
      b = mid;
    }
  }
  out.lo = a;
  out.hi = b;
  out.mu_c = 0.5 * (a + b);
  return out;
}

PhaseReport classify_phase(const EnergyLandscape& energies, const LatticeParams& params, const PhaseOptions& options) {
  if (energies.is_constant()) return classify_constant_energy(energies.constant_energy(), params);
  const int N = std::min(options.N, params.max_level() - 1);
  const LevelRange window{std::max(1, N / 2), std::max(1, N)};
  if (absence_certificate(energies, params, window)) {
    PhaseReport out;
    out.kind = PhaseKind::NoTransition;
    out.certificate = Certificate::AbsenceLiminf;
    return out;
  }
  const SumUjCertificate cert = sum_uj_certificate(energies, params, 0.0, N);
  if (cert.sufficient) {
    PhaseReport out = first_order_report(energies, params, N, options.tol);
    out.certificate = Certificate::SumUjBound;
    out.notes.push_back("sum u_j <= 1/e; mu_c and sigma_c from the zeta fixed point");
    return out;
  }
  if (cert.necessary) {
    try {
      return first_order_report(energies, params, N, options.tol, std::vector<double>(N + 1, kInf));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Diverging && e.code() != ErrorCode::Undetermined) throw;
    }
  }
  PhaseReport out;
  out.certificate = Certificate::NumericScan;
  try {
    const MuScan scan = mu_c_scan(energies, params, energies.e_inf() + options.scan_lo,
                                  energies.e_inf() + options.scan_hi, options.tol);
    out.mu_c = scan.mu_c;
    out.mu_c_precise = HighPrec(scan.mu_c);
    out.mu_c_uncertainty = scan.hi - scan.lo;
    if (!std::isfinite(scan.mu_c)) {
      out.kind = PhaseKind::NoTransition;
      out.notes.push_back("no transition found in the scanned mu range");
    } else if (!cert.necessary) {
      out.kind = PhaseKind::Continuous;
      out.sigma_c = 1.0;
      out.notes.push_back("first-order transition ruled out (u_j > 1 or sum u_j infinite)");
    } else {
      out.kind = PhaseKind::Undetermined;
      out.notes.push_back("mu_c located numerically; transition order not certified");
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Undetermined && e.code() != ErrorCode::UnsupportedModel) throw;
    out.kind = PhaseKind::Undetermined;
    out.certificate = Certificate::None;
    out.notes.push_back(e.what());
  }
  return out;
}

}  // namespace hiercubes
