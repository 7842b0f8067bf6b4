#include <doctest.h>

#include <cmath>
#include <random>

#include "hiercubes/density.hpp"
#include "hiercubes/error.hpp"
#include "hiercubes/phase.hpp"
#include "oracles.hpp"

using namespace hiercubes;

namespace {

// u_j = e^{-1} 2^{-(j+1)}, e_inf = 0.
EnergyLandscape geometric_u(const LatticeParams& p, int levels = 60) {
  std::vector<double> e(levels);
  for (int j = 0; j < levels; ++j) e[j] = 1.0 + (j + 1) * std::log(2.0);
  return EnergyLandscape::from_prefix(p, e, 0.0);
}

const double kLam = std::log(16.0 / 3.0);
const double kMuC = std::log(16.0 / 9.0);

}  // namespace

TEST_SUITE("phase") {
  TEST_CASE("constants") {
    CHECK(c_d(LatticeParams(1)) == 0.25);
    CHECK(c_d(LatticeParams(2)) == 27.0 / 256.0);
    for (int d = 1; d <= 6; ++d) {
      const LatticeParams p(d);
      CHECK(std::abs(c_d(p) - c_d_numeric(p)) < 1e-12);
      CHECK(c_d(p) > 0.0);
      CHECK(c_d(p) < 1.0);
      CHECK(lambda_d(p) > 0.0);
    }
    CHECK(lambda_d(LatticeParams(1)) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
    CHECK(lambda_d(LatticeParams(2)) == doctest::Approx(-std::log(27.0 / 256.0) / 3).epsilon(1e-15));
  }

  TEST_CASE("fixed points") {
    const LatticeParams p(1);
    const auto fp = fixed_points(3.0 / 16.0, p);
    CHECK(std::abs(fp.x_minus - 4.0 / 3.0) < 1e-12);
    CHECK(std::abs(fp.x_plus - 4.0) < 1e-12);
    try {
      fixed_points(0.25, p);
      CHECK(false);
    } catch (const TangentError& e) {
      CHECK(e.fixed_point() == 2.0);
    }
    CHECK_THROWS_AS(fixed_points(0.5, p), Error);
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(0.001, 0.999);
    for (int d = 1; d <= 4; ++d) {
      const LatticeParams q(d);
      const int m = q.children();
      for (int t = 0; t < 30; ++t) {
        const double eps = u(rng) * c_d(q);
        const auto f = fixed_points(eps, q);
        CHECK(std::abs(1 + eps * std::pow(f.x_minus, m) - f.x_minus) < 1e-12);
        CHECK(std::abs(1 + eps * std::pow(f.x_plus, m) - f.x_plus) < 1e-12 * std::pow(f.x_plus, m));
        CHECK(1.0 <= f.x_minus);
        CHECK(f.x_minus < f.x_plus);
        CHECK(eps * m * std::pow(f.x_minus, m - 1) < 1.0);
        CHECK(eps * m * std::pow(f.x_plus, m - 1) > 1.0);
      }
    }
  }

  TEST_CASE("v iteration") {
    const LatticeParams p(1);
    const auto land = EnergyLandscape::constant(kLam);
    const auto report = classify_constant_energy(kLam, p);
    const auto at_c = v_iteration(land, p, report.mu_c_precise, 60);
    for (int n = 0; n <= 60; ++n) CHECK(std::abs(at_c.v(n) - 4.0) < 1e-9);
    const auto above = v_iteration(land, p, kMuC + 0.1, 200);
    CHECK(above.v(200) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(above.divergence_level == -1);
    const auto below = v_iteration(land, p, kMuC - 0.1, 200);
    CHECK(below.divergence_level > 0);
    // eps sequence independent of mu, bit for bit
    const auto g = geometric_u(p);
    const auto a = v_iteration(g, p, -1.0, 40);
    const auto b = v_iteration(g, p, 2.5, 40);
    CHECK(a.log_eps == b.log_eps);
  }

  TEST_CASE("v_n = Xi_n / z_n against the oracle") {
    const LatticeParams p(1);
    const std::vector<double> e = {0.5, 1.0, 1.5, 2.5};
    const auto land = EnergyLandscape::from_prefix(p, e, 0.0);
    const double mu = 0.3;
    const auto vi = v_iteration(land, p, mu, 3);
    std::vector<mpq_class> z;
    for (int j = 0; j <= 3; ++j) z.push_back(mpq_class(std::exp(std::ldexp(1.0, j) * mu - e[j])));
    for (int n = 0; n <= 3; ++n) {
      const double xi = oracle_ref::log_mpq(oracle_ref::xi_recursive(1, z, n));
      CHECK(static_cast<double>(vi.log_v[n]) == doctest::Approx(xi - std::log(z[n].get_d())).epsilon(1e-12));
    }
  }

  TEST_CASE("absence certificate") {
    const LatticeParams p(1);
    CHECK(absence_certificate(EnergyLandscape::constant(0.0), p, {1, 40}));
    CHECK(absence_certificate(EnergyLandscape::constant(1.0), p, {1, 40}));
    CHECK_FALSE(absence_certificate(EnergyLandscape::constant(2.0), p, {1, 40}));
  }

  TEST_CASE("constant energy classification") {
    const LatticeParams p(1);
    const auto r = classify_constant_energy(kLam, p);
    CHECK(r.kind == PhaseKind::Continuous);
    CHECK(std::abs(r.mu_c - kMuC) < 1e-9);
    CHECK(r.sigma_c == 1.0);
    CHECK(classify_constant_energy(1.0, p).kind == PhaseKind::NoTransition);
    CHECK(classify_constant_energy(1.0, p).mu_c == kInf);
    CHECK(classify_constant_energy(std::log(4.0), p).kind == PhaseKind::Undetermined);
  }

  TEST_CASE("sum u_j certificate") {
    const LatticeParams p(1);
    const auto c = sum_uj_certificate(geometric_u(p), p, 0.0);
    CHECK(c.sufficient);
    CHECK(c.sum == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    const auto big = EnergyLandscape::from_prefix(p, {-std::log(2.0), 5.0, 9.0}, 0.0, EnergyTail::Infinite);
    const auto cb = sum_uj_certificate(big, p, 0.0);
    CHECK_FALSE(cb.necessary);
    CHECK_FALSE(cb.sufficient);
    const auto surf = EnergyLandscape::surface(LatticeParams(2), 5.0);
    CHECK(sum_uj_certificate(surf, LatticeParams(2), 0.0).sufficient);
    CHECK_FALSE(sum_uj_certificate(EnergyLandscape::constant(3.0), p, 0.0).necessary);
  }

  TEST_CASE("zeta solver") {
    const LatticeParams p(1);
    const auto zero = EnergyLandscape::from_prefix(p, {kInf, kInf, 1.0}, 0.0, EnergyTail::Infinite);
    const auto zz = zeta_solver(zero, p, 1, 1e-14);
    CHECK(zz.zeta[0] == 0.0);
    CHECK(zz.zeta[1] == 0.0);
    const auto g = geometric_u(p);
    const auto one = zeta_solver(g, p, 40, 1e-14, std::nullopt, 1);
    for (int j = 0; j <= 40; ++j) CHECK(one.zeta[j] == std::exp(g.log_u(p, j)));
    const auto z = zeta_solver(g, p, 40, 1e-15);
    CHECK(z.converged);
    CHECK(z.residual < 1e-12);
    for (int j = 0; j <= 40; ++j) CHECK(z.zeta[j] <= std::exp(g.log_u(p, j)) * std::exp(1.0));
    // monotone iterates
    std::vector<double> prev(41, 0.0);
    for (int it = 1; it <= 10; ++it) {
      const auto zi = zeta_solver(g, p, 40, 1e-300, std::nullopt, it);
      for (int j = 0; j <= 40; ++j) CHECK(zi.zeta[j] >= prev[j]);
      prev = zi.zeta;
    }
    const auto heavy = EnergyLandscape::from_prefix(p, {0.1, 0.2, 0.3}, 0.0, EnergyTail::Infinite);
    CHECK_THROWS_AS(zeta_solver(heavy, p, 2, 1e-12), Error);
  }

  TEST_CASE("first order report") {
    const LatticeParams p(1);
    const auto r = first_order_report(geometric_u(p), p, 48, 1e-12);
    CHECK(r.kind == PhaseKind::FirstOrder);
    REQUIRE(r.sigma_c.has_value());
    CHECK(*r.sigma_c < 1.0);
    REQUIRE(r.cross_check.has_value());
    CHECK(*r.cross_check < 1e-9);
    CHECK_THROWS_AS(first_order_report(EnergyLandscape::constant(2.0), p, 20, 1e-10), Error);
    const double u0 = 0.3;
    const auto single = EnergyLandscape::from_prefix(p, {-std::log(u0)}, 0.0, EnergyTail::Infinite);
    const auto rs = first_order_report(single, p, 10, 1e-12);
    const double zeta0 = u0 / (1 - u0);
    CHECK(rs.zeta[0] == doctest::Approx(zeta0).epsilon(1e-12));
    CHECK(*rs.sigma_c == doctest::Approx(zeta0 / (1 + zeta0)).epsilon(1e-12));
  }

  TEST_CASE("mu_c scan") {
    const LatticeParams p(1);
    const auto s = mu_c_scan(EnergyLandscape::constant(kLam), p, 0.0, 2.0, 1e-10);
    CHECK(std::abs(s.mu_c - kMuC) < 1e-9);
    CHECK(mu_c_scan(EnergyLandscape::constant(0.0), p, 0.0, 10.0, 1e-8).mu_c == kInf);
    const auto g = geometric_u(p);
    const auto fo = first_order_report(g, p, 48, 1e-12);
    const auto sg = mu_c_scan(g, p, -2.0, 2.0, 1e-10);
    CHECK(std::abs(sg.mu_c - fo.mu_c) < 1e-6);
  }

  TEST_CASE("pressure above and below mu_c") {
    const LatticeParams p(1);
    std::vector<double> sig;
    for (double mu = 0.0; mu < kMuC - 0.02; mu += 0.05) {
      const auto r = pressure(ActivityModel::constant_energy(kLam, mu), p, 1e-12, 60);
      REQUIRE(r.regime_hint == Regime::Summable);
      CHECK(r.p > mu);
      sig.push_back(densities(r).sigma);
    }
    for (std::size_t i = 1; i < sig.size(); ++i) CHECK(sig[i] > sig[i - 1]);
    for (double mu : {kMuC + 0.05, 1.0, 2.0}) {
      const auto r = pressure(ActivityModel::constant_energy(kLam, mu), p, 1e-12, 60);
      CHECK(r.regime_hint == Regime::Divergent);
      CHECK(r.p == doctest::Approx(mu));
      CHECK(r.activities.p_partial.back() <= mu + 1e-12);
    }
  }

  TEST_CASE("pipeline") {
    PhaseOptions opt;
    CHECK(classify_phase(EnergyLandscape::constant(0.0), LatticeParams(1), opt).kind == PhaseKind::NoTransition);
    CHECK(classify_phase(EnergyLandscape::constant(1.0), LatticeParams(1), opt).kind == PhaseKind::NoTransition);
    const auto fo = classify_phase(geometric_u(LatticeParams(1)), LatticeParams(1), opt);
    CHECK(fo.kind == PhaseKind::FirstOrder);
    const auto surf = classify_phase(EnergyLandscape::surface(LatticeParams(2), 5.0), LatticeParams(2), opt);
    CHECK(surf.kind == PhaseKind::FirstOrder);
    CHECK(*surf.sigma_c < 1.0);
    // prefix with E_j = 0: absence holds on the tail
    std::vector<double> zeros(30, 0.0);
    const auto none = classify_phase(EnergyLandscape::from_prefix(LatticeParams(1), zeros, 0.0, EnergyTail::Hold),
                                     LatticeParams(1), opt);
    CHECK(none.kind == PhaseKind::NoTransition);
  }
}
