#include "hiercubes/pressure.hpp"

#include <algorithm>
#include <cmath>

#include "hiercubes/error.hpp"

namespace hiercubes {

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::Summable:
      return "summable";
    case Regime::Divergent:
      return "divergent";
    case Regime::Undetermined:
      return "undetermined";
  }
  return "undetermined";
}

double EffectiveActivities::zhat(int j) const {
  require(j >= 0 && j <= N, "level outside the computed range");
  const double lz = log_zhat[j];
  return lz >= 709.0 ? kInf : std::exp(lz);
}

namespace {

void check_level(const LatticeParams& params, int n) {
  require(n >= 0, "level must be nonnegative");
  if (n > params.max_level()) {
    fail(ErrorCode::TooLarge, "level exceeds the representable range d*N <= 1000");
  }
}

// True when every level past `level` has z_j = 0.
bool support_ends_at(const ActivityModel& model, int level) {
  if (model.kind() == ModelKind::Table) return level >= model.table_size() - 1;
  const EnergyLandscape* land = model.landscape();
  return !land->is_constant() && land->tail() == EnergyTail::Infinite &&
         level >= static_cast<int>(land->prefix().size()) - 1;
}

}  // namespace

EffectiveActivities effective_activities(const ActivityModel& model, const LatticeParams& params, int N) {
  check_level(params, N);
  const int m = params.children();
  EffectiveActivities out;
  out.params = params;
  out.N = N;
  out.log_zhat.resize(N + 1);
  out.p_partial.resize(N + 1);

  KahanSum p;
  // w = log(1 + 1/zhat) of the previous level; +inf when z_{j-1} = 0.
  double w_prev = kInf;
  for (int j = 0; j <= N; ++j) {
    const double per_site = model.log_activity_per_site(params, j);
    if (per_site == kInf) fail(ErrorCode::UnstableModel, "log z_j / |B_j| is +inf");
    double lz;
    if (j == 0) {
      lz = model.log_activity(params, 0);
    } else if (per_site == -kInf) {
      lz = -kInf;
    } else if (std::isfinite(w_prev)) {
      lz = model.log_activity_ratio(params, j) - m * w_prev;
    } else {
      lz = params.block_volume(j) * (per_site - out.p_partial[j - 1]);
    }
    out.log_zhat[j] = lz;
    p += softplus(lz) / params.block_volume(j);
    out.p_partial[j] = p.value();
    w_prev = softplus(-lz);
  }
  if (support_ends_at(model, N)) out.tail_bound = 0.0;
  return out;
}

PressureResult pressure(const ActivityModel& model, const LatticeParams& params, double tol, int N_max,
                        const RegimeConfig& config) {
  require(tol > 0, "tol must be positive");
  check_level(params, N_max);
  PressureResult out;
  const bool is_table = model.kind() == ModelKind::Table;
  if (is_table) {
    out.theta_star = -kInf;
  } else {
    out.theta_star = *model.mu() - model.landscape()->e_inf();
  }

  // Tables whose support fits are summed to the end, where the tail is exactly 0.
  const bool full_support = is_table && model.table_size() - 1 <= N_max;
  EffectiveActivities ea = effective_activities(model, params, N_max);
  KahanSum zsum;
  int run = 0;
  int N = 0;
  bool done = false;
  for (; N <= N_max && !done; ++N) {
    const double lz = ea.log_zhat[N];
    const double z = lz >= 709.0 ? kInf : std::exp(lz);
    zsum += z;

    if (support_ends_at(model, N)) {
      out.regime_hint = Regime::Summable;
      out.converged = true;
      out.exact_tail = true;
      ea.tail_bound = 0.0;
      done = true;
      break;
    }

    if (!is_table) {
      if (z >= config.divergence_floor && (N == 0 || lz >= ea.log_zhat[N - 1] + std::log1p(-1e-12))) {
        ++run;
      } else {
        run = z >= config.divergence_floor ? 1 : 0;
      }
      if (run >= config.divergence_run || zsum.value() > config.divergence_sum) {
        out.regime_hint = Regime::Divergent;
        out.converged = true;
        done = true;
        break;
      }
    }

    if (N >= 2 && !full_support) {
      // t_j = zhat_j / |B_j|, in logs.
      auto log_t = [&](int j) { return ea.log_zhat[j] - params.log_block_volume(j); };
      const double t2 = log_t(N), t1 = log_t(N - 1), t0 = log_t(N - 2);
      double tail = kInf;
      if (t2 == -kInf && t1 == -kInf && t0 == -kInf) {
        tail = kInf;  // all-zero window, no decay information
      } else if (std::isfinite(t1) && std::isfinite(t0)) {
        const double log_r = std::max(t2 - t1, t1 - t0);
        const double r = std::exp(log_r);
        if (r < config.max_tail_ratio) tail = std::exp(t2) * r / (1.0 - r);
      }
      if (tail < tol) {
        ea.tail_bound = tail;
        out.regime_hint = Regime::Summable;
        out.converged = true;
        done = true;
        break;
      }
    }
  }
  if (!done) N = N_max;

  out.N_used = N;
  ea.N = N;
  ea.log_zhat.resize(N + 1);
  ea.p_partial.resize(N + 1);
  if (out.regime_hint == Regime::Divergent) {
    out.p = out.theta_star;
  } else {
    out.p = ea.p_partial[N];
  }
  out.activities = std::move(ea);
  return out;
}

double log_partition_function(const ActivityModel& model, const LatticeParams& params, int n) {
  const EffectiveActivities ea = effective_activities(model, params, n);
  KahanSum sum;
  for (int j = 0; j <= n; ++j) {
    sum += std::ldexp(softplus(ea.log_zhat[j]), params.d() * (n - j));
  }
  return sum.value();
}

double bernoulli_pressure(const ActivityModel& model, const LatticeParams& params, double tol, int N_max,
                          const RegimeConfig& config) {
  require(tol > 0, "tol must be positive");
  check_level(params, N_max);
  KahanSum sum;
  std::vector<double> log_t;
  int growing = 0;
  for (int j = 0; j <= N_max; ++j) {
    const double term = softplus(model.log_activity(params, j)) / params.block_volume(j);
    sum += term;
    if (support_ends_at(model, j)) return sum.value();
    if (sum.value() > config.divergence_sum) fail(ErrorCode::Divergent, "Bernoulli pressure exceeds the cap");
    log_t.push_back(std::log(term));
    if (j >= 1 && term > 0 && log_t[j] >= log_t[j - 1] + std::log1p(-1e-12)) {
      ++growing;
    } else {
      growing = 0;
    }
    if (growing >= config.divergence_run) fail(ErrorCode::Divergent, "Bernoulli pressure terms do not decay");
    if (j >= 2 && std::isfinite(log_t[j - 1]) && std::isfinite(log_t[j - 2])) {
      const double r = std::exp(std::max(log_t[j] - log_t[j - 1], log_t[j - 1] - log_t[j - 2]));
      if (r < config.max_tail_ratio && term * r / (1.0 - r) < tol) return sum.value();
    }
  }
  fail(ErrorCode::Undetermined, "Bernoulli pressure did not converge within N_max levels");
}

}  // namespace hiercubes
