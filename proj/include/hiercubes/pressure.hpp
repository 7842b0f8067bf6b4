#pragma once

#include <string_view>
#include <vector>

#include "hiercubes/lattice.hpp"
#include "hiercubes/model.hpp"
#include "hiercubes/numeric.hpp"

namespace hiercubes {

enum class Regime { Summable, Divergent, Undetermined };

std::string_view to_string(Regime regime);

/// Thresholds of the summable/divergent classification. These are engineering
/// choices, not certified bounds.
struct RegimeConfig {
  double divergence_floor = 1e-6;
  int divergence_run = 8;
  double divergence_sum = 1e3;
  double max_tail_ratio = 0.5;
};

/// zhat_j and p_j for j = 0..N, held in the log domain.
struct EffectiveActivities {
  LatticeParams params{1};
  std::vector<double> log_zhat;
  std::vector<double> p_partial;
  int N = 0;
  /// Estimated bound on p - p_N; +inf when unknown.
  double tail_bound = kInf;

  double zhat(int j) const;
};

struct PressureResult {
  double p = 0.0;
  bool converged = false;
  int N_used = 0;
  Regime regime_hint = Regime::Undetermined;
  /// True when the tail is known exactly (finite support), false when extrapolated.
  bool exact_tail = false;
  /// mu - e_inf for energy models, -inf for tables.
  double theta_star = 0.0;
  EffectiveActivities activities;
};

EffectiveActivities effective_activities(const ActivityModel& model, const LatticeParams& params, int N);

/// Evaluates levels up to N_max and stops at the first level where the tail
/// estimate drops below tol or divergence is detected. An undecided run is
/// returned with converged = false and regime Undetermined.
PressureResult pressure(const ActivityModel& model, const LatticeParams& params, double tol, int N_max,
                        const RegimeConfig& config = {});

/// log Xi_{Lambda_n} = |Lambda_n| p_n.
double log_partition_function(const ActivityModel& model, const LatticeParams& params, int n);

/// sum_j log(1 + z_j) / |B_j|.
double bernoulli_pressure(const ActivityModel& model, const LatticeParams& params, double tol, int N_max,
                          const RegimeConfig& config = {});

}  // namespace hiercubes
