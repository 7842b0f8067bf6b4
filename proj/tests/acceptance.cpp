// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned here.
// Usage: acceptance <path-to-cli> <fixture-dir>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "hiercubes/density.hpp"
#include "hiercubes/entropy.hpp"
#include "hiercubes/error.hpp"
#include "hiercubes/oracle.hpp"
#include "hiercubes/phase.hpp"
#include "hiercubes/pressure.hpp"
#include "hiercubes/sampler.hpp"

using namespace hiercubes;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

DensityProfile random_profile(std::mt19937_64& rng, int d, int levels, double total, double sigma_inf) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(levels);
  double sum = 0;
  for (auto& x : w) sum += (x = u(rng));
  for (auto& x : w) x *= (total - sigma_inf) / sum;
  return make_profile(d, w, sigma_inf);
}

// Random rational activity with numerator in [1, 40] and denominator in [1, 8],
// rounded to the nearest double so the oracle sees exactly the same input.
double random_activity(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(1, 40), den(1, 8);
  return static_cast<double>(num(rng)) / den(rng);
}

const std::vector<std::pair<int, int>> kOracleLattices = {{1, 0}, {1, 1}, {1, 2}, {1, 3}, {1, 4},
                                                          {2, 0}, {2, 1}, {2, 2}};

std::vector<std::vector<double>> oracle_tables(int n, std::mt19937_64& rng) {
  std::vector<std::vector<double>> out{std::vector<double>(n + 1, 1.0)};
  for (int t = 0; t < 20; ++t) {
    std::vector<double> z(n + 1);
    for (auto& v : z) v = random_activity(rng);
    out.push_back(z);
  }
  return out;
}

std::vector<mpq_class> exact(const std::vector<double>& z) {
  std::vector<mpq_class> out;
  for (double v : z) out.emplace_back(v);
  return out;
}

Outcome partition_oracle() {
  std::mt19937_64 rng(101);
  double worst = 0;
  for (auto [d, n] : kOracleLattices) {
    const LatticeParams p(d);
    const EnumerationOracle oracle(p, n);
    for (const auto& z : oracle_tables(n, rng)) {
      const double expect = log_rational(oracle.partition(exact(z)));
      const double got = log_partition_function(ActivityModel::table(z), p, n);
      worst = std::max(worst, std::abs(got - expect) / std::max(1.0, std::abs(expect)));
    }
  }
  return {worst < 1e-12, "max rel err " + sci(worst) + " (tol 1e-12)"};
}

Outcome density_oracle() {
  std::mt19937_64 rng(102);
  double worst = 0;
  for (auto [d, n] : kOracleLattices) {
    const LatticeParams p(d);
    const EnumerationOracle oracle(p, n);
    for (const auto& z : oracle_tables(n, rng)) {
      const auto ea = effective_activities(ActivityModel::table(z), p, n);
      const auto prof = finite_volume_densities(ea, n);
      const auto q = exact(z);
      for (int j = 0; j <= n; ++j) {
        const double expect = oracle.block_probability(q, PlacedBlock{j, std::vector<std::uint64_t>(d, 0)}).get_d();
        worst = std::max(worst, std::abs(prof.rho[j] - expect));
      }
    }
  }
  return {worst < 1e-12, "max abs err " + sci(worst) + " (tol 1e-12)"};
}

Outcome inversion_roundtrip() {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_z = 0, worst_p = 0;
  int models = 0;
  for (int t = 0; t < 100; ++t) {
    const int d = 1 + t % 3;
    const LatticeParams p(d);
    // a summable table: zhat drawn with sum < 1, z rebuilt from it
    const int n = 5;
    std::vector<double> w(n + 1), log_z(n + 1);
    double total = 0;
    for (auto& v : w) total += (v = u(rng));
    const double scale = 0.95 * u(rng) / total;
    double p_prev = 0;
    for (int j = 0; j <= n; ++j) {
      const double zhat = w[j] * scale;
      log_z[j] = std::log(zhat) + p.block_volume(j) * p_prev;
      p_prev += std::log1p(zhat) / p.block_volume(j);
    }
    const auto r = pressure(ActivityModel::table_from_log(log_z), p, 1e-12, 20);
    const auto prof = densities(r);
    const auto inv = invert_densities(prof, p);
    for (int j = 0; j <= n; ++j) worst_z = std::max(worst_z, std::abs(std::expm1(inv.log_z[j] - log_z[j])));
    worst_p = std::max(worst_p, std::abs(equation_of_state(prof, p) - r.p) / std::max(1.0, std::abs(r.p)));
    ++models;
  }
  return {models == 100 && worst_z < 1e-10 && worst_p < 1e-10,
          std::to_string(models) + " models, z rel err " + sci(worst_z) + ", eos err " + sci(worst_p) + " (tol 1e-10)"};
}

Outcome entropy_identities() {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double hat = 0, scaling = 0, phi_excess = -kInf;
  int bound_violations = 0;
  for (int t = 0; t < 100; ++t) {
    const int d = 1 + t % 3;
    const LatticeParams p(d);
    const double total = u(rng);
    const auto prof = random_profile(rng, d, 1 + t % 9, total, total * u(rng) * (t % 2));
    const auto s = entropy(prof, p);
    hat = std::max(hat, std::abs(s.s - entropy_hat_form(prof, p)));
    if (!(s.s >= 0 && s.s <= s.upper_bound)) ++bound_violations;

    const double norm_total = 0.9 * u(rng);
    const auto small = random_profile(rng, d, 1 + t % 6, norm_total, (t % 3 == 0) ? 0.3 * norm_total : 0.0);
    const auto phi = phi_series(small, p, 60);
    double lin = 0;
    for (int j = 0; j <= small.N; ++j)
      if (small.rho[j] > 0) lin += small.rho[j] * (std::log(small.rho[j]) - 1) / p.block_volume(j);
    const double gap = std::abs(entropy(small, p).s - (-lin - phi.phi));
    phi_excess = std::max(phi_excess, gap - phi.tail_bound);

    const double sinf = 0.05 + 0.55 * u(rng);
    const auto withinf = random_profile(rng, d, 5, sinf + u(rng) * (1 - sinf), sinf);
    std::vector<double> scaled(withinf.rho);
    for (auto& x : scaled) x /= 1 - sinf;
    const double lhs = entropy(withinf, p).s;
    const double rhs = (1 - sinf) * entropy(make_profile(d, scaled), p).s;
    scaling = std::max(scaling, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  }
  const bool ok = hat < 1e-12 && phi_excess <= 1e-14 && bound_violations == 0 && scaling < 1e-12;
  return {ok, "hat " + sci(hat) + ", phi excess over tail bound " + sci(std::max(0.0, phi_excess)) + ", bound violations " +
                  std::to_string(bound_violations) + ", scaling " + sci(scaling) + " (tol 1e-12)"};
}

Outcome stirling() {
  const LatticeParams p(1);
  const auto prof = make_profile(1, {0.3, 0.1, 0.05});
  const double s = entropy(prof, p).s;
  std::vector<double> gaps;
  for (int n : {12, 16, 20}) {
    const auto counts = rounded_counts(prof, p, n);
    gaps.push_back(std::abs(exact_multicanonical_logcount(p, n, counts) / std::ldexp(1.0, n) - s));
  }
  const bool monotone = gaps[0] > gaps[1] && gaps[1] > gaps[2];
  return {monotone && gaps[2] < 2e-2,
          "gaps " + sci(gaps[0]) + ", " + sci(gaps[1]) + ", " + sci(gaps[2]) + " (final tol 2e-2)"};
}

Outcome chemical_duality() {
  std::mt19937_64 rng(106);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    const LatticeParams p(1 + t % 2);
    std::vector<double> z(5);
    for (auto& v : z) v = u(rng);
    const auto r = pressure(ActivityModel::table(z), p, 1e-12, 20);
    const auto mu = chemical_potentials(densities(r), p);
    for (int j = 0; j < 5; ++j) worst = std::max(worst, std::abs(mu.mu[j] - std::log(z[j])));
    worst = std::max(worst, std::abs(mu.mu_inf - r.p));
  }
  return {worst < 1e-10, "max err " + sci(worst) + " (tol 1e-10)"};
}

Outcome legendre() {
  const LatticeParams p(1);
  const auto model = ActivityModel::constant_energy(std::log(16.0 / 3.0), 0.4);
  const auto r = pressure(model, p, 1e-13, 48);
  const auto best = densities(r);
  const double at_max = legendre_objective(best, model, p);
  std::mt19937_64 rng(107);
  std::normal_distribution<double> g(0.0, 1.0);
  int tried = 0, lower = 0;
  while (tried < 1000) {
    std::vector<double> rho(best.rho);
    for (auto& x : rho) x = std::max(0.0, x + 1e-3 * g(rng) * (x + 1e-4));
    const double sinf = std::abs(1e-3 * g(rng));
    double total = sinf;
    for (double x : rho) total += x;
    if (total >= 1.0) continue;
    ++tried;
    if (legendre_objective(make_profile(1, rho, sinf), model, p) < at_max) ++lower;
  }
  const double gap = std::abs(at_max - r.p);
  return {gap < 1e-10 && lower == tried, "|objective - p| " + sci(gap) + " (tol 1e-10), " + std::to_string(lower) + "/" +
                                             std::to_string(tried) + " perturbations lower"};
}

Outcome phase_constants() {
  const LatticeParams p1(1), p2(2);
  const bool exact_c = c_d(p1) == 0.25 && c_d(p2) == 27.0 / 256.0;
  const double numeric = std::max(std::abs(c_d(p1) - c_d_numeric(p1)), std::abs(c_d(p2) - c_d_numeric(p2)));
  const double lam = std::log(16.0 / 3.0), mu_c = std::log(16.0 / 9.0);
  const auto fp = fixed_points(3.0 / 16.0, p1);
  const double fp_err = std::max(std::abs(fp.x_minus - 4.0 / 3.0), std::abs(fp.x_plus - 4.0));
  const auto rep = classify_constant_energy(lam, p1);
  const double mu_err = std::abs(rep.mu_c - mu_c);
  const double scan_err = std::abs(mu_c_scan(EnergyLandscape::constant(lam), p1, 0.0, 2.0, 1e-10).mu_c - mu_c);
  const auto v = v_iteration(EnergyLandscape::constant(lam), p1, rep.mu_c_precise, 60);
  double v_err = 0;
  for (int n = 0; n <= 60; ++n) v_err = std::max(v_err, std::abs(v.v(n) - 4.0));
  const bool ok = exact_c && numeric < 1e-12 && fp_err < 1e-12 && rep.kind == PhaseKind::Continuous && mu_err < 1e-9 &&
                  scan_err < 1e-6 && v_err < 1e-9;
  return {ok, std::string("c_d exact ") + (exact_c ? "yes" : "no") + ", numeric " + sci(numeric) + ", fixed points " +
                  sci(fp_err) + ", mu_c " + sci(mu_err) + ", scan " + sci(scan_err) + ", v_n " + sci(v_err)};
}

Outcome absence() {
  const LatticeParams p(1);
  PhaseOptions opt;
  bool ok = true;
  std::string detail;
  double min_margin = kInf;
  for (double e : {0.0, 1.0}) {
    const auto rep = classify_phase(EnergyLandscape::constant(e), p, opt);
    ok &= rep.kind == PhaseKind::NoTransition;
    detail += "E=" + std::to_string(static_cast<int>(e)) + " " + std::string(to_string(rep.kind)) + ", ";
    for (double mu : {0.0, 1.0, 5.0}) {
      const auto r = pressure(ActivityModel::constant_energy(e, mu), p, 1e-12, 60);
      // mu - e_inf = mu here; margin beyond the truncation bound
      const double margin = r.p - mu - r.activities.tail_bound;
      ok &= r.converged && margin > 0;
      min_margin = std::min(min_margin, margin);
    }
  }
  return {ok, detail + "min p(mu) - mu - tail " + sci(min_margin)};
}

EnergyLandscape geometric_u(const LatticeParams& p) {
  std::vector<double> e(60);
  for (int j = 0; j < 60; ++j) e[j] = 1.0 + (j + 1) * std::log(2.0);
  return EnergyLandscape::from_prefix(p, e, 0.0);
}

Outcome first_order() {
  const LatticeParams p(1);
  const auto g = geometric_u(p);
  const auto cert = sum_uj_certificate(g, p, 0.0);
  const auto z = zeta_solver(g, p, 48, 1e-15);
  const auto rep = first_order_report(g, p, 48, 1e-12);
  const auto surf = classify_phase(EnergyLandscape::surface(LatticeParams(2), 5.0), LatticeParams(2), PhaseOptions{});
  const bool ok = cert.sufficient && z.residual < 1e-12 && rep.sigma_c && *rep.sigma_c < 1.0 && rep.cross_check &&
                  *rep.cross_check < 1e-9 && surf.kind == PhaseKind::FirstOrder;
  return {ok, std::string("certificate ") + (cert.sufficient ? "yes" : "no") + ", residual " + sci(z.residual) +
                  ", sigma_c " + (rep.sigma_c ? sci(*rep.sigma_c) : "none") + ", |zeta - zhat(mu_c)| " +
                  (rep.cross_check ? sci(*rep.cross_check) : "none") + ", surface " + std::string(to_string(surf.kind))};
}

Outcome sampler() {
  const LatticeParams p(1);
  const int n = 2;
  const std::uint64_t reps = 1000000, seed = 2024;
  const auto ea = effective_activities(ActivityModel::constant_energy(0.0, 0.0), p, n);
  const EnumerationOracle oracle(p, n);
  std::map<std::string, std::uint64_t> by_key;
  for (std::uint64_t r = 0; r < reps; ++r) ++by_key[sample_configuration(ea, n, seed, {r}).key()];
  std::map<std::uint32_t, std::uint64_t> seen;
  for (const auto& [key, count] : by_key) {
    std::vector<Configuration::Node> nodes;
    for (char c : key)
      nodes.push_back(c == 'O' ? Configuration::Node::Occupied
                               : c == 'S' ? Configuration::Node::Split : Configuration::Node::EmptySite);
    seen[oracle.mask_of(Configuration(1, n, nodes))] += count;
  }
  const std::vector<mpq_class> z(n + 1, 1);
  const mpq_class xi = oracle.partition(z);
  double chi2 = 0;
  for (auto mask : oracle.configurations()) {
    const double expect = mpq_class(oracle.weight(mask, z) / xi).get_d() * static_cast<double>(reps);
    const double diff = static_cast<double>(seen[mask]) - expect;
    chi2 += diff * diff / expect;
  }
  const boost::math::chi_squared dist(static_cast<double>(oracle.configurations().size() - 1));
  const double pvalue = boost::math::cdf(boost::math::complement(dist, chi2));

  const auto stats = sample_stats(ea, n, reps, seed);
  const auto exact_rho = finite_volume_densities(ea, n);
  double worst_se = 0;
  for (int j = 0; j <= n; ++j) {
    worst_se = std::max(worst_se, std::abs(stats.rho_fixed[j].mean - exact_rho.rho[j]) / stats.rho_fixed[j].se);
    worst_se = std::max(worst_se, std::abs(stats.rho_volume[j].mean - exact_rho.rho[j]) / stats.rho_volume[j].se);
  }
  return {pvalue > 1e-3 && worst_se < 3.0 && seen.size() == oracle.configurations().size(),
          "chi2 p-value " + sci(pvalue) + " (> 1e-3), max |rho - exact|/SE " + sci(worst_se) + " (< 3)"};
}

std::pair<int, std::string> capture(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!pipe) return {-1, out};
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Outcome determinism(const std::string& cli, const std::string& data) {
  if (cli.empty()) return {false, "no CLI path given"};
  const std::vector<std::string> cmds = {
      "pressure --config " + data + "/const_energy.json",
      "densities --config " + data + "/ones.json --out csv",
      "invert --profile " + data + "/profile.json",
      "entropy --profile " + data + "/profile.json --config " + data + "/const_energy.json",
      "phase --config " + data + "/surface.json",
      "phase-scan --config " + data + "/const_energy.json --mu-min 0 --mu-max 1 --steps 25",
      "sample --config " + data + "/ones.json --level 3 --replicas 50000 --seed 7",
      "fractal --config " + data + "/const_energy.json --level 6 --mu 0.2 --seed 7",
      "oracle --d 1 --n 3 --z " + data + "/z.json",
  };
  int identical = 0;
  for (const auto& c : cmds) {
    const auto a = capture("'" + cli + "' " + c);
    const auto b = capture("'" + cli + "' " + c);
    if (a.first == 0 && a == b && !a.second.empty()) ++identical;
  }
  return {identical == static_cast<int>(cmds.size()),
          std::to_string(identical) + "/" + std::to_string(cmds.size()) + " subcommands byte-identical across runs"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::string data = argc > 2 ? argv[2] : "";
  struct Criterion {
    const char* name;
    double time_limit;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"oracle equivalence (partition)", 10, partition_oracle},
      {"oracle equivalence (densities)", kInf, density_oracle},
      {"inversion roundtrip", kInf, inversion_roundtrip},
      {"entropy identities", kInf, entropy_identities},
      {"Stirling convergence", 30, stirling},
      {"chemical-potential duality", kInf, chemical_duality},
      {"Legendre maximality", kInf, legendre},
      {"phase constants and continuous transition", kInf, phase_constants},
      {"absence certificate", kInf, absence},
      {"first-order pipeline", kInf, first_order},
      {"sampler statistics", 60, sampler},
      {"determinism", kInf, [&] { return determinism(cli, data); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.time_limit) {
      out.pass = false;
      out.detail += ", over time limit";
    }
    failed += !out.pass;
    std::printf("%s %2zu %s: %s [%.2f s]\n", out.pass ? "PASS" : "FAIL", i + 1, c.name, out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
