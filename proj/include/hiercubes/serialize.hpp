#pragma once

#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "hiercubes/density.hpp"
#include "hiercubes/entropy.hpp"
#include "hiercubes/lattice.hpp"
#include "hiercubes/model.hpp"
#include "hiercubes/phase.hpp"
#include "hiercubes/pressure.hpp"
#include "hiercubes/sampler.hpp"

namespace hiercubes {

using Json = nlohmann::ordered_json;

/// A parsed model file. `mu` is optional so that mu-free commands (phase)
/// can share one file format; commands needing it take an override.
struct ModelSpec {
  int d = 1;
  std::string type;
  std::vector<double> z;
  std::optional<EnergyLandscape> landscape;
  std::optional<double> mu;

  LatticeParams params() const { return LatticeParams(d); }
  /// Throws InvalidArgument when a mu is needed and neither is given.
  ActivityModel activity(std::optional<double> mu_override = std::nullopt) const;
};

/// Parses {"d", "model": {"type": ...}}. Unknown keys are rejected.
ModelSpec parse_model(const Json& doc);
ModelSpec load_model(const std::string& path);

/// {"d", "rho": [...], "sigma_inf"?}.
DensityProfile parse_profile(const Json& doc);
DensityProfile load_profile(const std::string& path);

/// {"z": [...]} with numbers or rational strings such as "3/7".
std::vector<mpq_class> parse_rationals(const Json& doc);

Json load_json(const std::string& path);

/// Finite doubles as numbers, others as "inf", "-inf" or "nan".
Json number(double x);
Json numbers(const std::vector<double>& xs);
/// Shortest round-trip text of a double; non-finite values as above.
std::string format_double(double x);

Json to_json(const PressureResult& r);
Json to_json(const DensityProfile& profile, const LatticeParams& params);
Json to_json(const Inversion& inv);
Json to_json(const PhaseReport& report);
Json to_json(const SampleStats& stats);
Json to_json(const std::vector<Cube>& cubes);

/// Rows (j, rho_j, nu_j, zhat_j, z_j).
std::string densities_csv(const DensityProfile& profile, const EffectiveActivities& ea, const ActivityModel& model);

}  // namespace hiercubes
