#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"

#include "critlab/commands.hpp"
#include "critlab/config.hpp"
#include "critlab/error.hpp"

namespace py = pybind11;
using namespace critlab;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

py::dict run(const std::string& command, const std::string& config, const std::string& base_dir,
             const std::string& tol_overrides, bool dump_fields) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(config);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::schema, "config is not valid JSON: " + std::string(e.what()));
  }
  ProblemConfig cfg = parse_config(j, base_dir);
  if (!tol_overrides.empty()) {
    try {
      apply_tolerance_overrides(cfg, nlohmann::json::parse(tol_overrides));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::schema, "tolerance overrides are not valid JSON: " +
                                         std::string(e.what()));
    }
  }

  CommandOutput out;
  std::string report;
  std::vector<double> coords;
  std::vector<long long> index;
  {
    py::gil_scoped_release release;
    const Problem pb = build_problem(cfg);
    out = run_command(command, pb, dump_fields);
    report = make_report(command, cfg, out).dump();
    const Domain& dom = pb.ex.outer();
    const int d = pb.ex.grid().dim;
    for (std::size_t l = 0; l < dom.size(); ++l) {
      index.push_back(static_cast<long long>(dom.node(l)));
      const Point p = dom.coord(l);
      for (int k = 0; k < d; ++k) coords.push_back(p[k]);
    }
  }

  py::dict fields;
  for (const auto& [name, f] : out.fields) fields[py::str(name)] = to_array(f);
  py::array_t<double> xy = to_array(coords);
  const auto n = static_cast<py::ssize_t>(index.size());
  xy.resize({n, static_cast<py::ssize_t>(coords.size()) / std::max<py::ssize_t>(n, 1)});

  py::dict res;
  res["report"] = report;
  res["timings"] = out.timings.dump();
  res["definitive"] = out.definitive;
  res["fields"] = fields;
  res["coords"] = xy;
  py::array_t<long long> idx(n);
  std::copy(index.begin(), index.end(), idx.mutable_data());
  res["index"] = idx;
  res["table"] = out.table;
  return res;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "criticality analysis of discrete Schroedinger-type operators";
  m.attr("__version__") = CRITLAB_VERSION;

  static py::handle exc = py::exception<Error>(m, "CritlabError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(exc)(e.what());
      err.attr("code") = to_string(e.code());
      PyErr_SetObject(exc.ptr(), err.ptr());
    }
  });

  m.def("commands", &command_names);
  m.def("run", &run, py::arg("command"), py::arg("config"), py::arg("base_dir") = "",
        py::arg("tol_overrides") = "", py::arg("dump_fields") = false,
        "Run one command on a JSON config string. Returns report JSON, fields and coordinates.");
}
