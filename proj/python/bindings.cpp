#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "ghzw/errors.hpp"
#include "ghzw/expdata.hpp"
#include "ghzw/inflation.hpp"
#include "ghzw/polytope.hpp"
#include "ghzw/qsim.hpp"
#include "ghzw/witness.hpp"
#include "ghzw/witness_json.hpp"

namespace py = pybind11;
using namespace ghzw;

namespace {

struct Builtin {
  Witness w;
  MeasurementStrategy s;
  int n;
};

Builtin builtin(const std::string& name, int n) {
  if (name == "W3") return {build_w3(), w3_strategy(), 3};
  if (name == "W4") return {build_w4(), w4_strategy(), 4};
  if (name == "NParty") return {build_n_party(n), n_party_strategy(n), n};
  throw DomainError("unknown witness '" + name + "' (W3, W4, NParty)");
}

// Owns the constraint system so the solver's reference stays valid.
class InflationSystem {
 public:
  InflationSystem(int n_parties, int order)
      : scenario_(Scenario::make(std::vector<int>(n_parties, 2))),
        cs_(std::make_unique<InflationConstraintSystem>(build_constraint_system(ring_inflation(scenario_, order), scenario_))),
        solver_(std::make_unique<InflationSolver>(*cs_)) {}

  py::dict visibility(const Behavior& b) {
    const VisibilityResult r = solver_->visibility(b);
    const CertificateReport rep = verify_certificate(*cs_, r.certificate, b);
    py::dict d;
    d["tau"] = r.tau;
    d["visibility"] = r.visibility;
    d["feasible"] = r.tau <= 1.0 + 1e-7;
    d["certificate_ok"] = rep.ok;
    d["certificate_value"] = rep.value;
    return d;
  }
  bool feasible(const Behavior& b) { return solver_->feasible(b); }
  double gmf_lower_bound(const Behavior& b) { return solver_->gmf_lower_bound(b); }
  const InflationConstraintSystem& system() const { return *cs_; }

 private:
  Scenario scenario_;
  std::unique_ptr<InflationConstraintSystem> cs_;
  std::unique_ptr<InflationSolver> solver_;
};

}  // namespace

PYBIND11_MODULE(_ghzw, m) {
  m.attr("__version__") = GHZW_VERSION_STRING;

  py::register_exception<Error>(m, "GhzwError", PyExc_RuntimeError);

  py::class_<Behavior>(m, "Behavior")
      .def(py::init<std::vector<int>, std::vector<double>>(), py::arg("inputs"), py::arg("table"))
      .def_property_readonly("inputs", &Behavior::inputs)
      .def_property_readonly("table", &Behavior::table)
      .def_property_readonly("n_parties", &Behavior::n_parties)
      .def("prob", &Behavior::prob, py::arg("setting"), py::arg("outcome"))
      .def("is_nonsignalling", &Behavior::is_nonsignalling, py::arg("tol") = 1e-9)
      .def_static("uniform", &Behavior::uniform);

  py::class_<Witness>(m, "Witness")
      .def_readonly("name", &Witness::name)
      .def_readonly("bound", &Witness::bound)
      .def_readonly("inputs_per_party", &Witness::inputs_per_party)
      .def_property_readonly("n_terms", [](const Witness& w) { return w.terms.size(); })
      .def("to_json", [](const Witness& w) { return witness_to_json(w); })
      .def_static("from_json", [](const std::string& s) { return witness_from_json(s); });

  py::class_<Threshold>(m, "Threshold")
      .def_readonly("p", &Threshold::p)
      .def_readonly("fidelity", &Threshold::fidelity);

  m.def("build_w3", &build_w3);
  m.def("build_w4", &build_w4);
  m.def("build_n_party", &build_n_party, py::arg("n"));
  m.def("evaluate", py::overload_cast<const Witness&, const Behavior&>(&evaluate));
  m.def("evaluate_terms", &evaluate_terms);

  m.def(
      "ghz_behavior", [](const std::string& name, int n) {
        const Builtin b = builtin(name, n);
        return behavior_from_state(ghz_state(b.n), b.s);
      },
      py::arg("witness"), py::arg("n") = 5, "Ideal GHZ behavior under the witness's measurement strategy.");
  m.def(
      "noisy_ghz_behavior", [](const std::string& name, double p, double k, int n) {
        const Builtin b = builtin(name, n);
        return behavior_from_state(noisy_ghz(b.n, p, k), b.s);
      },
      py::arg("witness"), py::arg("p"), py::arg("k") = 0.0, py::arg("n") = 5);
  m.def(
      "ideal_strategy_value", [](const std::string& name, int n) {
        const Builtin b = builtin(name, n);
        return evaluate(b.w, behavior_from_state(ghz_state(b.n), b.s));
      },
      py::arg("witness"), py::arg("n") = 5);
  m.def(
      "threshold_mixed_noise", [](const std::string& name, double k, int n) {
        const Builtin b = builtin(name, n);
        return threshold_mixed_noise(b.w, b.s, b.n, k);
      },
      py::arg("witness"), py::arg("k"), py::arg("n") = 5);

  m.def("local_deterministic_vertices", [](const std::vector<int>& inputs) { return local_deterministic_vertices(inputs); });
  m.def(
      "nonsignalling_extremum", [](const Witness& w, bool maximize) {
        return extremize_over_nonsignalling(w, maximize ? Sense::Maximize : Sense::Minimize).value;
      },
      py::arg("witness"), py::arg("maximize") = false);
  m.def(
      "polytope_visibility", [](const Behavior& t, const std::vector<Behavior>& v) { return polytope_visibility(t, v); },
      py::arg("target"), py::arg("vertices"));

  py::class_<InflationSystem>(m, "InflationSystem")
      .def(py::init<int, int>(), py::arg("n_parties"), py::arg("order") = 2)
      .def_property_readonly("n_columns", [](const InflationSystem& s) { return s.system().n_columns; })
      .def_property_readonly("n_classes", [](const InflationSystem& s) { return s.system().n_classes; })
      .def_property_readonly("m1_rows", [](const InflationSystem& s) { return s.system().M1.rows(); })
      .def_property_readonly("m2_rows", [](const InflationSystem& s) { return s.system().M2.rows(); })
      .def_property_readonly("nonzeros", [](const InflationSystem& s) { return s.system().nonzeros(); })
      .def("visibility", &InflationSystem::visibility)
      .def("feasible", &InflationSystem::feasible)
      .def("gmf_lower_bound", &InflationSystem::gmf_lower_bound);

  py::class_<ExperimentDataset>(m, "ExperimentDataset")
      .def_property_readonly("n_records", [](const ExperimentDataset& d) { return d.records.size(); })
      .def("labels",
           [](const ExperimentDataset& d) {
             std::vector<std::string> out;
             for (const CountRecord& r : d.records) out.push_back(r.label.str());
             return out;
           })
      .def("counts", [](const ExperimentDataset& d, const std::string& label) {
        const auto& c = d.find(parse_label(label)).counts;
        return std::vector<std::int64_t>(c.begin(), c.end());
      });

  m.def("parse_dataset", &parse_dataset, py::arg("path"));
  m.def("eval_w3_from_data", &eval_w3_from_data);
  m.def("eval_w4_from_data", &eval_w4_from_data);
  m.def(
      "monte_carlo_sigma", [](const ExperimentDataset& ds, const std::string& which, int n, std::uint64_t seed) {
        DatasetEvaluator ev;
        if (which == "W3") ev = eval_w3_from_data;
        else if (which == "W4") ev = eval_w4_from_data;
        else throw DomainError("monte_carlo_sigma evaluates W3 or W4");
        py::gil_scoped_release release;
        const MonteCarloResult r = monte_carlo_sigma(ds, ev, n, seed);
        return std::make_pair(r.mean, r.sigma);
      },
      py::arg("dataset"), py::arg("witness"), py::arg("n_resamples") = 10000, py::arg("seed") = 1);
  m.def("stabilizer_fidelity", [](const ExperimentDataset& ds) {
    const StabilizerReport r = stabilizer_fidelity(ds);
    py::dict d;
    d["witness"] = r.witness;
    d["fidelity_bound"] = r.fidelity_bound;
    d["hom_visibility"] = r.hom_visibility;
    return d;
  });
}
