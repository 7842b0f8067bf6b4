#include "hiercubes/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hiercubes/error.hpp"
#include "hiercubes/numeric.hpp"

namespace hiercubes {

namespace {

constexpr double kEinfTolerance = 1e-9;
constexpr double kMaterializeLimit = 700.0;

}  // namespace

EnergyLandscape EnergyLandscape::constant(double lambda) {
  require(std::isfinite(lambda), "constant energy must be finite");
  EnergyLandscape out;
  out.constant_ = true;
  out.lambda_ = lambda;
  out.e_inf_ = 0.0;
  return out;
}

EnergyLandscape EnergyLandscape::from_prefix(const LatticeParams& params, std::vector<double> energies,
                                             double e_inf, EnergyTail tail) {
  require(!energies.empty(), "energy prefix must not be empty");
  require(std::isfinite(e_inf), "e_inf must be finite");
  require(static_cast<int>(energies.size()) <= params.max_level() + 1,
          "energy prefix longer than the representable level range");
  bool any_finite = false;
  for (double e : energies) {
    require(!std::isnan(e) && e != -kInf, "energies must be real or +inf");
    any_finite = any_finite || std::isfinite(e);
  }
  require(any_finite, "at least one block energy must be finite");

  EnergyLandscape out;
  out.e_inf_ = e_inf;
  out.tail_ = tail;
  out.surplus_.resize(energies.size());
  for (std::size_t j = 0; j < energies.size(); ++j) {
    const double vol = params.block_volume(static_cast<int>(j));
    out.surplus_[j] = std::isfinite(energies[j]) ? energies[j] - vol * e_inf : kInf;
  }

  const int k = static_cast<int>(energies.size());
  const int start = k - std::max(1, k / 4);
  for (int j = start; j < k; ++j) {
    if (!std::isfinite(energies[j])) continue;
    const double per_site = energies[j] / params.block_volume(j);
    if (std::abs(per_site - e_inf) > kEinfTolerance * std::max(1.0, std::abs(e_inf))) {
      std::ostringstream msg;
      msg << "E_" << j << "/|B_" << j << "| = " << per_site << " is not within "
          << kEinfTolerance << " of e_inf = " << e_inf;
      out.warnings_.push_back(msg.str());
    }
  }
  out.energies_ = std::move(energies);
  return out;
}

EnergyLandscape EnergyLandscape::from_surplus(const LatticeParams& params, std::vector<double> surplus,
                                              double e_inf, EnergyTail tail) {
  require(!surplus.empty(), "surplus prefix must not be empty");
  std::vector<double> energies(surplus.size());
  for (std::size_t j = 0; j < surplus.size(); ++j) {
    require(!std::isnan(surplus[j]) && surplus[j] != -kInf, "surplus must be real or +inf");
    energies[j] = std::isfinite(surplus[j]) ? surplus[j] + params.block_volume(static_cast<int>(j)) * e_inf : kInf;
  }
  EnergyLandscape out = from_prefix(params, std::move(energies), e_inf, tail);
  out.surplus_ = std::move(surplus);
  out.surplus_primary_ = true;
  return out;
}

EnergyLandscape EnergyLandscape::surface(const LatticeParams& params, double coupling) {
  require(std::isfinite(coupling), "coupling must be finite");
  const int levels = params.max_level() + 1;
  std::vector<double> surplus(levels);
  const int d = params.d();
  // E_j + J |B_j| = J |dB_j| = 2 d J 2^{j(d-1)}
  for (int j = 0; j < levels; ++j) surplus[j] = coupling * 2.0 * d * std::ldexp(1.0, j * (d - 1));
  return from_surplus(params, std::move(surplus), -coupling, EnergyTail::Linear);
}

double EnergyLandscape::surplus(const LatticeParams& params, int j) const {
  require(j >= 0, "block level must be nonnegative");
  (void)params;
  if (constant_) return lambda_;
  const int k = static_cast<int>(surplus_.size());
  if (j < k) return surplus_[j];
  switch (tail_) {
    case EnergyTail::Infinite:
      return kInf;
    case EnergyTail::Hold:
      return surplus_[k - 1];
    case EnergyTail::Linear:
      if (k >= 2 && std::isfinite(surplus_[k - 1]) && std::isfinite(surplus_[k - 2])) {
        const double slope = surplus_[k - 1] - surplus_[k - 2];
        return surplus_[k - 1] + static_cast<double>(j - k + 1) * slope;
      }
      return surplus_[k - 1];
  }
  return kInf;
}

double EnergyLandscape::energy(const LatticeParams& params, int j) const {
  const double s = surplus(params, j);
  if (!std::isfinite(s)) return s;
  return s + params.block_volume(j) * e_inf_;
}

double EnergyLandscape::log_eps(const LatticeParams& params, int j) const {
  require(j >= 1, "eps_j is defined for j >= 1");
  if (constant_) return -static_cast<double>(params.children() - 1) * lambda_;
  return surplus(params, j) - params.children() * surplus(params, j - 1);
}

double EnergyLandscape::u_tail_after(const LatticeParams& params, int level) const {
  if (constant_) return kInf;
  const int k = static_cast<int>(surplus_.size());
  KahanSum sum;
  for (int j = std::max(level + 1, 0); j < k; ++j) sum += std::exp(-surplus_[j]);
  const int first_extrapolated = std::max(level + 1, k);
  const double last = surplus_[k - 1];
  switch (tail_) {
    case EnergyTail::Infinite:
      break;
    case EnergyTail::Hold:
      if (std::isfinite(last)) return kInf;
      break;
    case EnergyTail::Linear: {
      const double s0 = surplus(params, first_extrapolated);
      if (!std::isfinite(s0)) break;
      const double s1 = surplus(params, first_extrapolated + 1);
      const double slope = s1 - s0;
      if (!(slope > 0)) return kInf;
      sum += std::exp(-s0) / -std::expm1(-slope);
      break;
    }
  }
  return sum.value();
}

ActivityModel ActivityModel::table(const std::vector<double>& z) {
  require(!z.empty(), "activity table must not be empty");
  std::vector<double> log_z(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    require(std::isfinite(z[j]) && z[j] >= 0, "activities must be finite and nonnegative");
    log_z[j] = z[j] > 0 ? std::log(z[j]) : -kInf;
  }
  return ActivityModel(Table{std::move(log_z)});
}

ActivityModel ActivityModel::table_from_log(std::vector<double> log_z) {
  require(!log_z.empty(), "activity table must not be empty");
  for (double v : log_z) require(!std::isnan(v) && v != kInf, "log activities must be < +inf");
  return ActivityModel(Table{std::move(log_z)});
}

ActivityModel ActivityModel::energy(EnergyLandscape landscape, double mu) {
  require(std::isfinite(mu), "chemical potential must be finite");
  return ActivityModel(Energy{std::move(landscape), mu});
}

ActivityModel ActivityModel::constant_energy(double lambda, double mu) {
  return energy(EnergyLandscape::constant(lambda), mu);
}

ModelKind ActivityModel::kind() const noexcept {
  if (const auto* e = std::get_if<Energy>(&data_)) {
    return e->landscape.is_constant() ? ModelKind::ConstantEnergy : ModelKind::Energy;
  }
  return ModelKind::Table;
}

double ActivityModel::log_activity(const LatticeParams& params, int j) const {
  require(j >= 0, "block level must be nonnegative");
  if (const auto* t = std::get_if<Table>(&data_)) {
    return j < static_cast<int>(t->log_z.size()) ? t->log_z[j] : -kInf;
  }
  const auto& e = std::get<Energy>(data_);
  const double s = e.landscape.surplus(params, j);
  if (!std::isfinite(s)) return -kInf;
  return params.block_volume(j) * (e.mu - e.landscape.e_inf()) - s;
}

double ActivityModel::activity(const LatticeParams& params, int j) const {
  const double lz = log_activity(params, j);
  if (lz >= kMaterializeLimit) return kInf;
  return std::exp(lz);
}

double ActivityModel::log_activity_per_site(const LatticeParams& params, int j) const {
  if (std::holds_alternative<Table>(data_)) {
    return log_activity(params, j) / params.block_volume(j);
  }
  const auto& e = std::get<Energy>(data_);
  const double s = e.landscape.surplus(params, j);
  if (!std::isfinite(s)) return -kInf;
  return (e.mu - e.landscape.e_inf()) - s / params.block_volume(j);
}

double ActivityModel::log_activity_ratio(const LatticeParams& params, int j) const {
  require(j >= 1, "activity ratio is defined for j >= 1");
  if (const auto* e = std::get_if<Energy>(&data_)) {
    const double cur = e->landscape.surplus(params, j);
    const double prev = e->landscape.surplus(params, j - 1);
    if (!std::isfinite(cur)) return -kInf;
    if (!std::isfinite(prev)) return kInf;
    return -e->landscape.log_eps(params, j);
  }
  const double cur = log_activity(params, j);
  const double prev = log_activity(params, j - 1);
  if (cur == -kInf) return -kInf;
  if (prev == -kInf) return kInf;
  return cur - params.children() * prev;
}

int ActivityModel::table_size() const noexcept {
  if (const auto* t = std::get_if<Table>(&data_)) return static_cast<int>(t->log_z.size());
  return -1;
}

const std::vector<double>& ActivityModel::log_table() const {
  const auto* t = std::get_if<Table>(&data_);
  if (t == nullptr) fail(ErrorCode::UnsupportedModel, "model is not a table");
  return t->log_z;
}

const EnergyLandscape* ActivityModel::landscape() const noexcept {
  if (const auto* e = std::get_if<Energy>(&data_)) return &e->landscape;
  return nullptr;
}

std::optional<double> ActivityModel::mu() const noexcept {
  if (const auto* e = std::get_if<Energy>(&data_)) return e->mu;
  return std::nullopt;
}

ActivityModel ActivityModel::with_mu(double mu) const {
  const auto* e = std::get_if<Energy>(&data_);
  if (e == nullptr) fail(ErrorCode::UnsupportedModel, "only energy models carry a chemical potential");
  return energy(e->landscape, mu);
}

StabilityReport stability_report(const ActivityModel& model, const LatticeParams& params,
                                 LevelRange window) {
  require(window.first >= 0 && window.first <= window.last, "stability window must be nonempty");
  double window_max = -kInf;
  for (int j = window.first; j <= window.last; ++j) {
    window_max = std::max(window_max, model.log_activity_per_site(params, j));
  }
  double tail = -kInf;
  if (const auto* land = model.landscape()) {
    tail = *model.mu() - land->e_inf();
  }
  return StabilityReport{tail, window_max, tail, tail < kInf, window};
}

double stability_norm(const ActivityModel& model, const LatticeParams& params, double theta, int levels) {
  require(levels >= 0, "levels must be nonnegative");
  KahanSum sum;
  for (int j = 0; j <= levels; ++j) {
    const double per_site = model.log_activity_per_site(params, j);
    if (per_site == -kInf) continue;
    const double vol = params.block_volume(j);
    sum += std::exp(vol * (per_site - theta) - params.log_block_volume(j));
  }
  return sum.value();
}

}  // namespace hiercubes
