// hiercubes command line tool. Every subcommand is a pure function of its
// flags, the files they name and the seed.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hiercubes/density.hpp"
#include "hiercubes/entropy.hpp"
#include "hiercubes/error.hpp"
#include "hiercubes/oracle.hpp"
#include "hiercubes/phase.hpp"
#include "hiercubes/pressure.hpp"
#include "hiercubes/sampler.hpp"
#include "hiercubes/serialize.hpp"

#ifndef HIERCUBES_VERSION
#define HIERCUBES_VERSION "0.0.0"
#endif

using namespace hiercubes;

namespace {

constexpr int kOk = 0;
constexpr int kConfig = 2;
constexpr int kUndetermined = 3;
constexpr int kNumeric = 4;

struct Options {
  std::string config;
  double tol = 1e-10;
  int max_level = 48;
  std::string out;
  std::uint64_t seed = 0;
  bool strict = false;
  std::optional<double> mu;
  double mu_min = 0.0, mu_max = 1.0;
  int steps = 100;
  int level = 4;
  std::uint64_t replicas = 10000;
  std::string profile;
  std::string z_file;
  int d = 1;
  int n = 2;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidProfile:
    case ErrorCode::UnsupportedModel:
    case ErrorCode::OutsideUnitBall:
    case ErrorCode::InfeasibleCounts:
    case ErrorCode::TooLarge:
    case ErrorCode::MixedEnsembles:
      return kConfig;
    case ErrorCode::Undetermined:
      return kUndetermined;
    default:
      return kNumeric;
  }
}

unsigned thread_cap() {
  const char* env = std::getenv("HIERCUBES_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw ConfigError("HIERCUBES_THREADS must be a positive integer");
  return static_cast<unsigned>(v);
}

std::string format_of(const Options& o, const std::string& fallback) {
  const std::string f = o.out.empty() ? fallback : o.out;
  if (f != "json" && f != "csv") throw ConfigError("--out must be json or csv");
  return f;
}

ModelSpec need_model(const Options& o) {
  if (o.config.empty()) throw ConfigError("--config is required");
  auto spec = load_model(o.config);
  if (spec.landscape)
    for (const auto& w : spec.landscape->warnings()) std::cerr << "warning: " << w << '\n';
  return spec;
}

Json meta(const std::string& command, const Options& o) {
  Json m;
  m["command"] = command;
  m["version"] = HIERCUBES_VERSION;
  if (!o.config.empty()) m["config"] = o.config;
  m["tol"] = o.tol;
  m["max_level"] = o.max_level;
  m["seed"] = o.seed;
  return m;
}

void emit(Json doc) { std::cout << doc.dump(2) << '\n'; }

int strict_exit(const Options& o, bool undetermined) {
  if (undetermined) {
    std::cerr << "warning: result is undetermined\n";
    if (o.strict) return kUndetermined;
  }
  return kOk;
}

int cmd_pressure(const Options& o) {
  const auto spec = need_model(o);
  const auto format = format_of(o, "json");
  const auto r = pressure(spec.activity(o.mu), spec.params(), o.tol, o.max_level);
  if (format == "csv") {
    std::cout << "j,zhat,p_partial\n";
    for (int j = 0; j <= r.activities.N; ++j)
      std::cout << j << ',' << format_double(r.activities.zhat(j)) << ','
                << format_double(r.activities.p_partial[j]) << '\n';
  } else {
    Json doc = to_json(r);
    doc["meta"] = meta("pressure", o);
    emit(doc);
  }
  return strict_exit(o, r.regime_hint == Regime::Undetermined);
}

int cmd_densities(const Options& o) {
  const auto spec = need_model(o);
  const auto format = format_of(o, "json");
  const auto model = spec.activity(o.mu);
  const auto r = pressure(model, spec.params(), o.tol, o.max_level);
  const auto profile = densities(r);
  if (format == "csv") {
    std::cout << densities_csv(profile, r.activities, model);
  } else {
    Json doc = to_json(profile, spec.params());
    doc["p"] = number(r.p);
    doc["regime_hint"] = std::string(to_string(r.regime_hint));
    std::vector<double> zhat;
    for (int j = 0; j <= profile.N && j <= r.activities.N; ++j) zhat.push_back(r.activities.zhat(j));
    doc["zhat"] = numbers(zhat);
    doc["meta"] = meta("densities", o);
    emit(doc);
  }
  return kOk;
}

DensityProfile need_profile(const Options& o) {
  if (o.profile.empty()) throw ConfigError("--profile is required");
  return load_profile(o.profile);
}

int cmd_invert(const Options& o) {
  const auto profile = need_profile(o);
  const auto format = format_of(o, "json");
  const LatticeParams params(profile.d);
  const auto inv = invert_densities(profile, params);
  if (format == "csv") {
    std::cout << "j,rho,zhat,log_z\n";
    for (int j = 0; j <= profile.N; ++j)
      std::cout << j << ',' << format_double(profile.rho[j]) << ',' << format_double(inv.zhat(j)) << ','
                << format_double(inv.log_z[j]) << '\n';
  } else {
    Json doc = to_json(inv);
    doc["equation_of_state"] = number(equation_of_state(profile, params));
    doc["meta"] = meta("invert", o);
    emit(doc);
  }
  return kOk;
}

int cmd_entropy(const Options& o) {
  const auto profile = need_profile(o);
  format_of(o, "json");
  const LatticeParams params(profile.d);
  Json doc;
  const auto s = entropy(profile, params);
  doc["s"] = number(s.s);
  doc["s_upper_bound"] = number(s.upper_bound);
  doc["s_hat"] = number(entropy_hat_form(profile, params));
  doc["s_ber"] = number(bernoulli_entropy(profile, params));
  Json notes = Json::array();
  try {
    const auto phi = phi_series(profile, params);
    doc["phi"] = number(phi.phi);
    doc["tail_bound"] = number(phi.tail_bound);
  } catch (const Error& e) {
    doc["phi"] = nullptr;
    doc["tail_bound"] = nullptr;
    notes.push_back(e.what());
  }
  const auto mu = chemical_potentials(profile, params);
  doc["mu"] = numbers(mu.mu);
  doc["mu_inf"] = number(mu.mu_inf);
  doc["mu_ber"] = numbers(mu.mu_ber);
  doc["f"] = nullptr;
  if (!o.config.empty()) {
    const auto spec = need_model(o);
    if (spec.d != profile.d) throw ConfigError("model and profile dimensions differ");
    if (spec.landscape) doc["f"] = number(free_energy(profile, *spec.landscape, params));
    if (spec.type == "table" || o.mu || spec.mu) {
      doc["legendre_objective"] = number(legendre_objective(profile, spec.activity(o.mu), params));
    }
  }
  doc["notes"] = notes;
  doc["meta"] = meta("entropy", o);
  emit(doc);
  return kOk;
}

int cmd_phase(const Options& o) {
  const auto spec = need_model(o);
  format_of(o, "json");
  if (!spec.landscape) throw Error(ErrorCode::UnsupportedModel, "phase analysis needs an energy model");
  PhaseOptions opt;
  opt.N = o.max_level;
  opt.tol = o.tol;
  const auto report = classify_phase(*spec.landscape, spec.params(), opt);
  Json doc = to_json(report);
  doc["meta"] = meta("phase", o);
  emit(doc);
  return strict_exit(o, report.kind == PhaseKind::Undetermined);
}

int cmd_phase_scan(const Options& o) {
  const auto spec = need_model(o);
  const auto format = format_of(o, "csv");
  if (!spec.landscape) throw Error(ErrorCode::UnsupportedModel, "phase-scan needs an energy model");
  if (o.steps < 1) throw ConfigError("--steps must be positive");
  if (!(o.mu_min <= o.mu_max)) throw ConfigError("--mu-min must not exceed --mu-max");
  struct Row {
    double mu, p, sigma;
    Regime regime;
  };
  std::vector<Row> rows(o.steps);
  auto eval = [&](int i) {
    const double mu = o.steps == 1 ? o.mu_min : o.mu_min + (o.mu_max - o.mu_min) * i / (o.steps - 1);
    const auto r = pressure(spec.activity(mu), spec.params(), o.tol, o.max_level);
    const double sigma = r.regime_hint == Regime::Undetermined ? kNaN : densities(r).sigma;
    rows[i] = {mu, r.p, sigma, r.regime_hint};
  };
  unsigned threads = thread_cap();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, o.steps);
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = static_cast<int>(t); i < o.steps; i += static_cast<int>(threads)) eval(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  bool undetermined = false;
  if (format == "csv") {
    std::cout << "mu,p,sigma,regime\n";
    for (const auto& r : rows)
      std::cout << format_double(r.mu) << ',' << format_double(r.p) << ',' << format_double(r.sigma) << ','
                << to_string(r.regime) << '\n';
  } else {
    Json doc;
    Json arr = Json::array();
    for (const auto& r : rows)
      arr.push_back({{"mu", number(r.mu)}, {"p", number(r.p)}, {"sigma", number(r.sigma)},
                     {"regime", std::string(to_string(r.regime))}});
    doc["rows"] = arr;
    doc["meta"] = meta("phase-scan", o);
    emit(doc);
  }
  for (const auto& r : rows) undetermined |= r.regime == Regime::Undetermined;
  return strict_exit(o, undetermined);
}

int cmd_sample(const Options& o) {
  const auto spec = need_model(o);
  const auto format = format_of(o, "json");
  if (o.level < 0) throw ConfigError("--level must be nonnegative");
  if (o.replicas < 1) throw ConfigError("--replicas must be positive");
  const auto params = spec.params();
  const auto ea = effective_activities(spec.activity(o.mu), params, o.level);
  const auto stats = sample_stats(ea, o.level, o.replicas, o.seed, thread_cap());
  const auto exact = finite_volume_densities(ea, o.level);
  if (format == "csv") {
    std::cout << "j,rho_exact,rho_fixed,rho_fixed_se,rho_volume,rho_volume_se\n";
    for (int j = 0; j <= o.level; ++j)
      std::cout << j << ',' << format_double(exact.rho[j]) << ',' << format_double(stats.rho_fixed[j].mean) << ','
                << format_double(stats.rho_fixed[j].se) << ',' << format_double(stats.rho_volume[j].mean) << ','
                << format_double(stats.rho_volume[j].se) << '\n';
  } else {
    Json doc = to_json(stats);
    doc["rho_exact"] = numbers(exact.rho);
    doc["sigma_exact"] = number(exact.sigma);
    doc["meta"] = meta("sample", o);
    emit(doc);
  }
  return kOk;
}

int cmd_fractal(const Options& o) {
  const auto spec = need_model(o);
  if (o.level < 0) throw ConfigError("--level must be nonnegative");
  const auto params = spec.params();
  const auto model = spec.activity(o.mu);
  const auto ea = effective_activities(model, params, o.level);
  const auto config = sample_configuration(ea, o.level, o.seed);
  Json doc;
  doc["d"] = spec.d;
  doc["n"] = o.level;
  doc["mu"] = model.mu() ? number(*model.mu()) : Json(nullptr);
  doc["seed"] = o.seed;
  // occupation probability q_j = zhat_j / (1 + zhat_j) of a node at level j
  std::vector<double> q;
  for (int j = 0; j <= o.level; ++j) q.push_back(logistic_from_log(ea.log_zhat[j]));
  doc["q"] = numbers(q);
  doc["cubes"] = to_json(fractal_export(config));
  Json notes = Json::array();
  if (o.level >= 2) {
    double lo = q[1], hi = q[1];
    for (int j = 1; j <= o.level; ++j) {
      lo = std::min(lo, q[j]);
      hi = std::max(hi, q[j]);
    }
    if (hi - lo > 1e-12 * std::max(1.0, hi))
      notes.push_back("occupation probability varies with the level, so K_n is not a constant-q fractal percolation set");
  }
  doc["notes"] = notes;
  doc["meta"] = meta("fractal", o);
  const std::string text = doc.dump(2) + "\n";
  if (o.out.empty() || o.out == "-") {
    std::cout << text;
  } else {
    std::ofstream file(o.out, std::ios::binary);
    if (!file) throw ConfigError("cannot write " + o.out);
    file << text;
  }
  return kOk;
}

int cmd_oracle(const Options& o) {
  format_of(o, "json");
  if (o.d < 1 || o.n < 0) throw ConfigError("--d must be positive and --n nonnegative");
  const LatticeParams params(o.d);
  std::vector<mpq_class> z(o.n + 1, 1);
  if (!o.z_file.empty()) {
    auto given = parse_rationals(load_json(o.z_file));
    // zero-extended like a finite table
    given.resize(o.n + 1, mpq_class(0));
    z = std::move(given);
  }
  const EnumerationOracle oracle(params, o.n);
  const mpq_class xi = oracle.partition(z);
  Json doc;
  doc["d"] = o.d;
  doc["n"] = o.n;
  Json zs = Json::array();
  for (const auto& q : z) zs.push_back(q.get_str());
  doc["z"] = zs;
  doc["Xi"] = {{"log", number(log_rational(xi))}, {"rational", xi.get_str()}};
  doc["configurations"] = oracle.configurations().size();
  Json rho = Json::array();
  for (int j = 0; j <= o.n; ++j) {
    const auto p = oracle.block_probability(z, PlacedBlock{j, std::vector<std::uint64_t>(o.d, 0)});
    rho.push_back({{"level", j}, {"rational", p.get_str()}, {"value", number(p.get_d())}});
  }
  doc["rho"] = rho;
  Json counts = Json::array();
  for (const auto& [c, mult] : oracle.count_table()) counts.push_back({{"N", c}, {"count", mult}});
  doc["counts"] = counts;
  doc["meta"] = meta("oracle", o);
  emit(doc);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical mixtures of cubes: pressure, densities, entropy, phases, sampling"};
  app.set_version_flag("--version", HIERCUBES_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config, "Model JSON file");
  app.add_option("--tol", o.tol, "Tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--max-level", o.max_level, "Truncation level")->capture_default_str()->check(CLI::Range(0, 1000));
  app.add_option("--out", o.out, "Output format json|csv (a file path for fractal)");
  app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
  app.add_flag("--strict", o.strict, "Exit 3 when the result is undetermined");

  std::string chosen;
  auto add = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->callback([&chosen, name] { chosen = name; });
    return sub;
  };
  auto mu_opt = [&](CLI::App* sub) { return sub->add_option("--mu", o.mu, "Chemical potential override"); };

  auto* p = add("pressure", "Pressure and effective activities");
  mu_opt(p);
  auto* dn = add("densities", "Block densities and packing fraction");
  mu_opt(dn);
  auto* inv = add("invert", "Activities from a density profile");
  inv->add_option("--profile", o.profile, "Profile JSON file");
  auto* ent = add("entropy", "Entropy, chemical potentials and free energy of a profile");
  ent->add_option("--profile", o.profile, "Profile JSON file");
  mu_opt(ent);
  add("phase", "Phase classification");
  auto* scan = add("phase-scan", "Pressure and packing fraction over a grid of mu");
  scan->add_option("--mu-min", o.mu_min)->capture_default_str();
  scan->add_option("--mu-max", o.mu_max)->capture_default_str();
  scan->add_option("--steps", o.steps)->capture_default_str();
  auto* smp = add("sample", "Empirical densities from sampled configurations");
  smp->add_option("--level", o.level)->capture_default_str();
  smp->add_option("--replicas", o.replicas)->capture_default_str();
  mu_opt(smp);
  auto* fr = add("fractal", "Geometry of one sampled configuration");
  fr->add_option("--level", o.level)->capture_default_str();
  mu_opt(fr);
  auto* orc = add("oracle", "Exact enumeration on a small lattice");
  orc->add_option("--d", o.d)->capture_default_str();
  orc->add_option("--n", o.n)->capture_default_str();
  orc->add_option("--z", o.z_file, "Activities JSON file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (chosen == "pressure") return cmd_pressure(o);
    if (chosen == "densities") return cmd_densities(o);
    if (chosen == "invert") return cmd_invert(o);
    if (chosen == "entropy") return cmd_entropy(o);
    if (chosen == "phase") return cmd_phase(o);
    if (chosen == "phase-scan") return cmd_phase_scan(o);
    if (chosen == "sample") return cmd_sample(o);
    if (chosen == "fractal") return cmd_fractal(o);
    if (chosen == "oracle") return cmd_oracle(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
  return kConfig;
}
