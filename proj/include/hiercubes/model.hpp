#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hiercubes/lattice.hpp"

namespace hiercubes {

/// Inclusive range of block levels.
struct LevelRange {
  int first = 0;
  int last = 0;
};

/// How a finite energy prefix E_0..E_{K-1} is continued past level K-1. The
/// rule acts on the surplus E_j - |B_j| e_inf.
enum class EnergyTail {
  Linear,    // surplus continues with its last increment
  Hold,      // surplus stays at its last value
  Infinite,  // E_j = +inf, blocks of that size are forbidden
};

/// Block energies E_j together with the bulk energy e_inf = lim E_j / |B_j|.
///
/// This is the mu-independent part of the parametric activity
/// z_j(mu) = exp(|B_j| mu - E_j). Quantities are handled through the surplus
/// E_j - |B_j| e_inf = -log u_j, which stays O(1) or grows slowly where E_j
/// itself grows like the volume.
class EnergyLandscape {
 public:
  /// E_j = lambda for all j (so e_inf = 0).
  static EnergyLandscape constant(double lambda);
  /// Explicit prefix; +inf entries are allowed, at least one must be finite.
  static EnergyLandscape from_prefix(const LatticeParams& params, std::vector<double> energies,
                                     double e_inf, EnergyTail tail = EnergyTail::Linear);
  /// Prefix given through the surplus E_j - |B_j| e_inf = -log u_j, which is
  /// kept exactly; use this when E_j itself would lose the surplus to rounding.
  static EnergyLandscape from_surplus(const LatticeParams& params, std::vector<double> surplus, double e_inf,
                                      EnergyTail tail = EnergyTail::Linear);
  /// E_j = J (-|B_j| + 2d 2^{j(d-1)}) on every representable level.
  static EnergyLandscape surface(const LatticeParams& params, double coupling);

  bool is_constant() const noexcept { return constant_; }
  /// lambda for the constant landscape.
  double constant_energy() const noexcept { return lambda_; }
  double e_inf() const noexcept { return e_inf_; }
  EnergyTail tail() const noexcept { return tail_; }
  /// Supplied prefix (empty for the constant landscape).
  const std::vector<double>& prefix() const noexcept { return energies_; }
  /// True when the surplus was supplied and the energies derived from it.
  bool surplus_is_primary() const noexcept { return surplus_primary_; }

  /// E_j - |B_j| e_inf (+inf where E_j = +inf).
  double surplus(const LatticeParams& params, int j) const;
  double energy(const LatticeParams& params, int j) const;
  /// log u_j = |B_j| e_inf - E_j.
  double log_u(const LatticeParams& params, int j) const { return -surplus(params, j); }
  /// log eps_j = E_j - 2^d E_{j-1}, for j >= 1. Independent of mu.
  double log_eps(const LatticeParams& params, int j) const;

  /// sum_{j > level} u_j including the extrapolated tail; +inf when not summable.
  double u_tail_after(const LatticeParams& params, int level) const;

  /// Validation notes produced at construction (e.g. E_j/|B_j| not near e_inf).
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  EnergyLandscape() = default;

  bool constant_ = false;
  bool surplus_primary_ = false;
  double lambda_ = 0.0;
  std::vector<double> energies_;
  std::vector<double> surplus_;
  double e_inf_ = 0.0;
  EnergyTail tail_ = EnergyTail::Linear;
  std::vector<std::string> warnings_;
};

using FreeEnergyModel = EnergyLandscape;

enum class ModelKind { Table, Energy, ConstantEnergy };

/// Block activities z_j >= 0. Values are held in the log domain; linear values
/// are derived on demand.
class ActivityModel {
 public:
  /// Explicit z_0..z_K, zero beyond the table.
  static ActivityModel table(const std::vector<double>& z);
  static ActivityModel table_from_log(std::vector<double> log_z);
  /// z_j(mu) = exp(|B_j| mu - E_j).
  static ActivityModel energy(EnergyLandscape landscape, double mu);
  static ActivityModel constant_energy(double lambda, double mu);

  ModelKind kind() const noexcept;

  /// log z_j; -inf for vanishing activity.
  double log_activity(const LatticeParams& params, int j) const;
  /// z_j; +inf when log z_j exceeds the double range (use log_activity then).
  double activity(const LatticeParams& params, int j) const;
  /// log z_j / |B_j|, computed without forming |B_j| mu for energy models.
  double log_activity_per_site(const LatticeParams& params, int j) const;
  /// log z_j - 2^d log z_{j-1}; mu-free and exact for energy models.
  double log_activity_ratio(const LatticeParams& params, int j) const;

  /// Number of table entries; -1 for energy models (infinite support).
  int table_size() const noexcept;
  const std::vector<double>& log_table() const;

  const EnergyLandscape* landscape() const noexcept;
  std::optional<double> mu() const noexcept;
  ActivityModel with_mu(double mu) const;

 private:
  struct Table {
    std::vector<double> log_z;
  };
  struct Energy {
    EnergyLandscape landscape;
    double mu;
  };

  explicit ActivityModel(std::variant<Table, Energy> data) : data_(std::move(data)) {}

  std::variant<Table, Energy> data_;
};

struct StabilityReport {
  /// limsup of log z_j / |B_j| over the zero-extended sequence.
  double theta_star;
  /// max of log z_j / |B_j| over the evaluated window.
  double window_max;
  /// Limit of the tail: -inf for finite tables, mu - e_inf for energy models.
  double tail_limit;
  bool stable;
  LevelRange window;
};

StabilityReport stability_report(const ActivityModel& model, const LatticeParams& params,
                                 LevelRange window);

/// ||z||_theta = sum_j z_j exp(-theta |B_j|) / |B_j|, truncated at `levels`.
double stability_norm(const ActivityModel& model, const LatticeParams& params, double theta,
                      int levels);

}  // namespace hiercubes
