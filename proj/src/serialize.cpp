#include "hiercubes/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hiercubes/error.hpp"

namespace hiercubes {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::InvalidArgument, what); }

void only_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) bad(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) bad("unknown field '" + key + "' in " + where);
  }
}

const Json& field(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) bad("missing field '" + key + "' in " + where);
  return obj.at(key);
}

double real(const Json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  bad(what + " must be a number or \"inf\"");
}

double finite_real(const Json& v, const std::string& what) {
  if (!v.is_number()) bad(what + " must be a finite number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(what + " must be a finite number");
  return x;
}

std::vector<double> reals(const Json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) bad(what + " must be a nonempty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(real(v[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

EnergyTail parse_tail(const Json& v) {
  if (!v.is_string()) bad("tail must be a string");
  const auto s = v.get<std::string>();
  if (s == "linear") return EnergyTail::Linear;
  if (s == "hold") return EnergyTail::Hold;
  if (s == "inf") return EnergyTail::Infinite;
  bad("tail must be one of linear, hold, inf");
}

}  // namespace

ActivityModel ModelSpec::activity(std::optional<double> mu_override) const {
  if (type == "table") return ActivityModel::table(z);
  const auto m = mu_override ? mu_override : mu;
  if (!m) bad("model needs a chemical potential (field \"mu\" or --mu)");
  if (type == "constant_energy") return ActivityModel::constant_energy(landscape->constant_energy(), *m);
  return ActivityModel::energy(*landscape, *m);
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    bad(path + ": " + e.what());
  }
}

ModelSpec parse_model(const Json& doc) {
  only_keys(doc, {"d", "model"}, "model file");
  const Json& dv = field(doc, "d", "model file");
  if (!dv.is_number_integer()) bad("d must be an integer");
  ModelSpec spec;
  spec.d = dv.get<int>();
  if (spec.d < 1 || spec.d > LatticeParams::kMaxDimension) bad("d out of range");
  const LatticeParams params(spec.d);
  const Json& m = field(doc, "model", "model file");
  if (!m.is_object()) bad("model must be an object");
  const Json& tv = field(m, "type", "model");
  if (!tv.is_string()) bad("model type must be a string");
  spec.type = tv.get<std::string>();
  if (m.contains("mu")) spec.mu = finite_real(m.at("mu"), "mu");

  if (spec.type == "table") {
    only_keys(m, {"type", "z"}, "table model");
    spec.z = reals(field(m, "z", "table model"), "z");
    for (double x : spec.z)
      if (!(x >= 0) || !std::isfinite(x)) bad("table activities must be finite and nonnegative");
  } else if (spec.type == "constant_energy") {
    only_keys(m, {"type", "lambda", "mu"}, "constant_energy model");
    spec.landscape = EnergyLandscape::constant(finite_real(field(m, "lambda", "model"), "lambda"));
  } else if (spec.type == "energy") {
    only_keys(m, {"type", "E", "surplus", "e_inf", "mu", "tail"}, "energy model");
    const double e_inf = finite_real(field(m, "e_inf", "energy model"), "e_inf");
    const EnergyTail tail = m.contains("tail") ? parse_tail(m.at("tail")) : EnergyTail::Linear;
    if (m.contains("E") == m.contains("surplus")) bad("energy model needs exactly one of E and surplus");
    if (m.contains("E")) {
      spec.landscape = EnergyLandscape::from_prefix(params, reals(m.at("E"), "E"), e_inf, tail);
    } else {
      spec.landscape = EnergyLandscape::from_surplus(params, reals(m.at("surplus"), "surplus"), e_inf, tail);
    }
  } else if (spec.type == "surface") {
    only_keys(m, {"type", "J", "mu"}, "surface model");
    spec.landscape = EnergyLandscape::surface(params, finite_real(field(m, "J", "surface model"), "J"));
  } else {
    bad("unknown model type '" + spec.type + "'");
  }
  return spec;
}

ModelSpec load_model(const std::string& path) { return parse_model(load_json(path)); }

DensityProfile parse_profile(const Json& doc) {
  only_keys(doc, {"d", "rho", "sigma_inf"}, "profile");
  const Json& dv = field(doc, "d", "profile");
  if (!dv.is_number_integer()) bad("d must be an integer");
  const int d = dv.get<int>();
  if (d < 1 || d > LatticeParams::kMaxDimension) bad("d out of range");
  const auto rho = reals(field(doc, "rho", "profile"), "rho");
  const double sigma_inf = doc.contains("sigma_inf") ? finite_real(doc.at("sigma_inf"), "sigma_inf") : 0.0;
  return make_profile(d, rho, sigma_inf);
}

DensityProfile load_profile(const std::string& path) { return parse_profile(load_json(path)); }

std::vector<mpq_class> parse_rationals(const Json& doc) {
  const Json& zv = doc.is_object() ? (only_keys(doc, {"z"}, "activity file"), field(doc, "z", "activity file")) : doc;
  if (!zv.is_array() || zv.empty()) bad("z must be a nonempty array");
  std::vector<mpq_class> out;
  for (const auto& v : zv) {
    mpq_class q;
    if (v.is_number_integer()) {
      q = mpq_class(v.get<long>());
    } else if (v.is_number()) {
      const double x = v.get<double>();
      if (!std::isfinite(x)) bad("activities must be finite");
      q = mpq_class(x);  // exact binary value
    } else if (v.is_string()) {
      if (q.set_str(v.get<std::string>(), 10) != 0) bad("cannot parse rational '" + v.get<std::string>() + "'");
      if (q.get_den() == 0) bad("zero denominator");
      q.canonicalize();
    } else {
      bad("activities must be numbers or rational strings");
    }
    if (q < 0) bad("activities must be nonnegative");
    out.push_back(q);
  }
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

Json numbers(const std::vector<double>& xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(number(x));
  return out;
}

Json to_json(const PressureResult& r) {
  Json out;
  out["p"] = number(r.p);
  out["N_used"] = r.N_used;
  out["converged"] = r.converged;
  out["regime_hint"] = std::string(to_string(r.regime_hint));
  out["exact_tail"] = r.exact_tail;
  out["theta_star"] = number(r.theta_star);
  out["tail_bound"] = number(r.activities.tail_bound);
  std::vector<double> zhat;
  for (int j = 0; j <= r.activities.N; ++j) zhat.push_back(r.activities.zhat(j));
  out["zhat"] = numbers(zhat);
  out["p_partial"] = numbers(r.activities.p_partial);
  return out;
}

Json to_json(const DensityProfile& profile, const LatticeParams& params) {
  Json out;
  out["d"] = profile.d;
  out["N"] = profile.N;
  out["rho"] = numbers(profile.rho);
  std::vector<double> nu;
  for (int j = 0; j <= profile.N; ++j) nu.push_back(profile.nu(params, j));
  out["nu"] = numbers(nu);
  out["sigma"] = number(profile.sigma);
  out["sigma_inf"] = number(profile.sigma_inf);
  return out;
}

Json to_json(const Inversion& inv) {
  Json out;
  out["p"] = number(inv.p);
  out["log_z"] = numbers(inv.log_z);
  out["log_zhat"] = numbers(inv.log_zhat);
  std::vector<double> z;
  for (std::size_t j = 0; j < inv.log_z.size(); ++j) z.push_back(inv.z(static_cast<int>(j)));
  out["z"] = numbers(z);
  out["p_partial"] = numbers(inv.p_partial);
  return out;
}

Json to_json(const PhaseReport& report) {
  Json out;
  out["kind"] = std::string(to_string(report.kind));
  out["mu_c"] = number(report.mu_c);
  out["mu_c_uncertainty"] = number(report.mu_c_uncertainty);
  out["sigma_c"] = report.sigma_c ? number(*report.sigma_c) : Json(nullptr);
  out["certificate"] = std::string(to_string(report.certificate));
  out["zeta"] = numbers(report.zeta);
  out["rho_star"] = numbers(report.rho_star);
  out["cross_check"] = report.cross_check ? number(*report.cross_check) : Json(nullptr);
  out["notes"] = report.notes;
  return out;
}

namespace {

Json mean_se(const std::vector<MeanSE>& xs) {
  Json mean = Json::array(), se = Json::array();
  for (const auto& x : xs) {
    mean.push_back(number(x.mean));
    se.push_back(number(x.se));
  }
  Json out;
  out["mean"] = mean;
  out["se"] = se;
  return out;
}

}  // namespace

Json to_json(const SampleStats& stats) {
  Json out;
  out["d"] = stats.d;
  out["n"] = stats.n;
  out["replicas"] = stats.replicas;
  out["seed"] = stats.seed;
  out["rho_fixed"] = mean_se(stats.rho_fixed);
  out["rho_volume"] = mean_se(stats.rho_volume);
  out["nu"] = mean_se(stats.nu);
  out["sigma"] = {{"mean", number(stats.sigma.mean)}, {"se", number(stats.sigma.se)}};
  return out;
}

Json to_json(const std::vector<Cube>& cubes) {
  Json out = Json::array();
  for (const auto& c : cubes) {
    Json rec;
    rec["level"] = c.level;
    rec["corner"] = c.corner;
    rec["side"] = c.side;
    out.push_back(std::move(rec));
  }
  return out;
}

std::string densities_csv(const DensityProfile& profile, const EffectiveActivities& ea, const ActivityModel& model) {
  const LatticeParams params(profile.d);
  std::ostringstream out;
  out << "j,rho,nu,zhat,z\n";
  for (int j = 0; j <= profile.N; ++j) {
    const double zhat = j <= ea.N ? ea.zhat(j) : kNaN;
    out << j << ',' << format_double(profile.rho[j]) << ',' << format_double(profile.nu(params, j)) << ','
        << format_double(zhat) << ',' << format_double(model.activity(params, j)) << '\n';
  }
  return out.str();
}

}  // namespace hiercubes
