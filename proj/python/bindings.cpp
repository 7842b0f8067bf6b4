#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "hiercubes/density.hpp"
#include "hiercubes/entropy.hpp"
#include "hiercubes/error.hpp"
#include "hiercubes/oracle.hpp"
#include "hiercubes/phase.hpp"
#include "hiercubes/pressure.hpp"
#include "hiercubes/sampler.hpp"
#include "hiercubes/serialize.hpp"

namespace py = pybind11;
using namespace hiercubes;

namespace {

// dict <-> Json through the json module keeps one schema for CLI and Python.
Json from_py(const py::object& obj) {
  const auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
  return Json::parse(text);
}

py::object to_py(const Json& doc) { return py::module_::import("json").attr("loads")(doc.dump()); }

ModelSpec model_of(const py::dict& model) { return parse_model(from_py(model)); }

py::object pressure_py(const py::dict& model, double tol, int max_level, std::optional<double> mu) {
  const auto spec = model_of(model);
  return to_py(to_json(pressure(spec.activity(mu), spec.params(), tol, max_level)));
}

py::object densities_py(const py::dict& model, double tol, int max_level, std::optional<double> mu) {
  const auto spec = model_of(model);
  const auto r = pressure(spec.activity(mu), spec.params(), tol, max_level);
  Json doc = to_json(densities(r), spec.params());
  doc["p"] = number(r.p);
  doc["regime_hint"] = std::string(to_string(r.regime_hint));
  return to_py(doc);
}

py::object invert_py(const py::dict& profile) {
  const auto prof = parse_profile(from_py(profile));
  const LatticeParams params(prof.d);
  Json doc = to_json(invert_densities(prof, params));
  doc["equation_of_state"] = number(equation_of_state(prof, params));
  return to_py(doc);
}

py::object entropy_py(const py::dict& profile) {
  const auto prof = parse_profile(from_py(profile));
  const LatticeParams params(prof.d);
  const auto s = entropy(prof, params);
  Json doc;
  doc["s"] = number(s.s);
  doc["s_upper_bound"] = number(s.upper_bound);
  doc["s_hat"] = number(entropy_hat_form(prof, params));
  doc["s_ber"] = number(bernoulli_entropy(prof, params));
  return to_py(doc);
}

py::object phase_py(const py::dict& model, int N, double tol) {
  const auto spec = model_of(model);
  if (!spec.landscape) fail(ErrorCode::UnsupportedModel, "phase analysis needs an energy model");
  PhaseOptions opt;
  opt.N = N;
  opt.tol = tol;
  return to_py(to_json(classify_phase(*spec.landscape, spec.params(), opt)));
}

py::object sample_py(const py::dict& model, int level, std::uint64_t replicas, std::uint64_t seed,
                     std::optional<double> mu, unsigned threads) {
  const auto spec = model_of(model);
  const auto ea = effective_activities(spec.activity(mu), spec.params(), level);
  SampleStats stats;
  {
    py::gil_scoped_release release;
    stats = sample_stats(ea, level, replicas, seed, threads);
  }
  return to_py(to_json(stats));
}

py::object fractal_py(const py::dict& model, int level, std::uint64_t seed, std::optional<double> mu) {
  const auto spec = model_of(model);
  const auto ea = effective_activities(spec.activity(mu), spec.params(), level);
  return to_py(to_json(fractal_export(sample_configuration(ea, level, seed))));
}

std::vector<mpq_class> rationals(const py::list& z) {
  Json arr = Json::array();
  for (const auto& v : z) {
    if (py::isinstance<py::str>(v)) {
      arr.push_back(v.cast<std::string>());
    } else if (py::isinstance<py::int_>(v)) {
      arr.push_back(v.cast<long>());
    } else {
      arr.push_back(v.cast<double>());
    }
  }
  return parse_rationals(arr);
}

py::tuple oracle_partition_py(int d, int n, const py::list& z) {
  auto q = rationals(z);
  q.resize(n + 1, mpq_class(0));
  const auto v = enumerate_partition(LatticeParams(d), n, q);
  return py::make_tuple(v.exact.get_str(), v.log_value);
}

std::string block_probability_py(int d, int n, const py::list& z, int level, std::vector<std::uint64_t> offset) {
  auto q = rationals(z);
  q.resize(n + 1, mpq_class(0));
  return block_probability(LatticeParams(d), n, q, PlacedBlock{level, std::move(offset)}).get_str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hierarchical mixtures of cubes";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetObject(error.ptr(), py::make_tuple(e.what(), std::string(to_string(e.code()))).ptr());
    }
  });

  m.def("pressure", &pressure_py, py::arg("model"), py::arg("tol") = 1e-10, py::arg("max_level") = 48,
        py::arg("mu") = py::none());
  m.def("densities", &densities_py, py::arg("model"), py::arg("tol") = 1e-10, py::arg("max_level") = 48,
        py::arg("mu") = py::none());
  m.def(
      "log_partition_function",
      [](const py::dict& model, int n, std::optional<double> mu) {
        const auto spec = model_of(model);
        return log_partition_function(spec.activity(mu), spec.params(), n);
      },
      py::arg("model"), py::arg("n"), py::arg("mu") = py::none());
  m.def("invert", &invert_py, py::arg("profile"));
  m.def("entropy", &entropy_py, py::arg("profile"));
  m.def(
      "multicanonical_logcount",
      [](int d, int n, const std::vector<std::uint64_t>& counts) {
        return exact_multicanonical_logcount(LatticeParams(d), n, counts);
      },
      py::arg("d"), py::arg("n"), py::arg("counts"));
  m.def("classify_phase", &phase_py, py::arg("model"), py::arg("N") = 48, py::arg("tol") = 1e-10);
  m.def("c_d", [](int d) { return c_d(LatticeParams(d)); }, py::arg("d"));
  m.def("lambda_d", [](int d) { return lambda_d(LatticeParams(d)); }, py::arg("d"));
  m.def(
      "fixed_points",
      [](double eps, int d) {
        const auto fp = fixed_points(eps, LatticeParams(d));
        return py::make_tuple(fp.x_minus, fp.x_plus);
      },
      py::arg("eps"), py::arg("d"));
  m.def("sample_stats", &sample_py, py::arg("model"), py::arg("level"), py::arg("replicas"), py::arg("seed") = 0,
        py::arg("mu") = py::none(), py::arg("threads") = 0);
  m.def("fractal", &fractal_py, py::arg("model"), py::arg("level"), py::arg("seed") = 0, py::arg("mu") = py::none());
  m.def("oracle_partition", &oracle_partition_py, py::arg("d"), py::arg("n"), py::arg("z"));
  m.def("block_probability", &block_probability_py, py::arg("d"), py::arg("n"), py::arg("z"), py::arg("level"),
        py::arg("offset"));
  m.def(
      "multicanonical_count",
      [](int d, int n, const std::vector<std::uint64_t>& counts) {
        return multicanonical_count(LatticeParams(d), n, counts);
      },
      py::arg("d"), py::arg("n"), py::arg("counts"));
}
