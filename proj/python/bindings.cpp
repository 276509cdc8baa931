#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mimosel/errors.hpp"
#include "mimosel/experiment.hpp"
#include "mimosel/oracle.hpp"
#include "mimosel/rounding.hpp"
#include "mimosel/scenario_io.hpp"
#include "mimosel/scp.hpp"

namespace py = pybind11;
using namespace mimosel;

namespace {

py::dict row_to_dict(const SweepRow& r) {
  py::dict d;
  d["theta_deg"] = r.theta_deg;
  d["mode"] = r.mode.label();
  d["power_adjust"] = r.power_adjust;
  d["sinr_full_db"] = r.sinr_full_db;
  d["sinr_scp_db"] = r.sinr_scp_db;
  d["sinr_oracle_db"] = r.sinr_oracle_db ? py::cast(*r.sinr_oracle_db) : py::none();
  d["gap_db"] = r.gap_db() ? py::cast(*r.gap_db()) : py::none();
  d["selection"] = r.selection.to_bitstring();
  d["seed"] = r.seed;
  d["failed"] = r.failed;
  d["error"] = r.error;
  d["merit_trace"] = r.merit_trace;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse MIMO radar virtual-array selection";

  static py::exception<Error> base(m, "Error");
  static py::exception<InvalidArgument> invalid(m, "InvalidArgument", base.ptr());
  static py::exception<ParseError> parse(m, "ParseError", base.ptr());
  static py::exception<BudgetExceeded> budget(m, "BudgetExceeded", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      py::set_error(invalid, e.what());
    } catch (const ParseError& e) {
      py::set_error(parse, e.what());
    } catch (const BudgetExceeded& e) {
      py::set_error(budget, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<ArrayGeometry>(m, "ArrayGeometry")
      .def(py::init([](int M, int N, double d_t, double d_r) { return ArrayGeometry{M, N, d_t, d_r}; }),
           py::arg("M"), py::arg("N"), py::arg("d_t"), py::arg("d_r"))
      .def_readwrite("M", &ArrayGeometry::M)
      .def_readwrite("N", &ArrayGeometry::N)
      .def_readwrite("d_t", &ArrayGeometry::d_t)
      .def_readwrite("d_r", &ArrayGeometry::d_r)
      .def("size", &ArrayGeometry::size);

  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("geometry", &Scenario::geometry)
      .def_readwrite("target_power_dbw", &Scenario::target_power_dbw)
      .def_readwrite("noise_power_dbw", &Scenario::noise_power_dbw)
      .def_property_readonly("target_theta_deg", [](const Scenario& s) { return s.target_theta.deg(); })
      .def("with_target",
           [](const Scenario& s, double theta_deg) { return s.with_target(Angle::degrees(theta_deg)); })
      .def("__str__", &format_scenario);

  m.def("parse_scenario", &parse_scenario, py::arg("path"));
  m.def("parse_scenario_text", [](const std::string& text) { return parse_scenario_text(text); });

  py::class_<SelectionMode>(m, "SelectionMode")
      .def_static("joint", &SelectionMode::joint, py::arg("k"))
      .def_static("factored", &SelectionMode::factored, py::arg("k_t"), py::arg("k_r"))
      .def_static("mfc", &SelectionMode::mfc, py::arg("k_m"), py::arg("k_r"))
      .def_static("hybrid", &SelectionMode::hybrid, py::arg("k_t"), py::arg("k_m"), py::arg("k_r"))
      .def("total", &SelectionMode::total)
      .def("label", &SelectionMode::label)
      .def("__repr__", [](const SelectionMode& s) { return "<SelectionMode " + s.label() + ">"; });

  py::class_<CovarianceModel>(m, "CovarianceModel")
      .def("size", &CovarianceModel::size)
      .def("covariance", [](const CovarianceModel& mdl) { return CMatrix(covariance_full(mdl)); });

  m.def("build_model", &build_model, py::arg("scenario"));
  m.def("sinr_db", [](const CovarianceModel& mdl, const std::string& bits) {
    const auto& g = mdl.geometry();
    return sinr_direct(mdl, SelectionVector::from_bitstring(bits, g.M, g.N));
  });
  m.def("f_logdet", &f_logdet, py::arg("model"), py::arg("c"));
  m.def("grad_f", &grad_f, py::arg("model"), py::arg("c"));
  m.def("is_feasible", [](const std::string& bits, const SelectionMode& mode, int M, int N) {
    return is_feasible(SelectionVector::from_bitstring(bits, M, N), mode);
  });

  m.def(
      "select",
      [](const CovarianceModel& mdl, const SelectionMode& mode, int n_samples, std::uint64_t seed) {
        const auto relaxed = run_scp(mdl, mode);
        RoundingConfig cfg;
        cfg.n_samples = n_samples;
        cfg.seed = seed;
        const auto r = randomized_rounding(mdl, mode, relaxed, cfg);
        py::dict d;
        d["selection"] = r.best.to_bitstring();
        d["sinr_db"] = r.sinr_db;
        d["c_star"] = relaxed.c_star;
        d["merit_trace"] = relaxed.objective_trace;
        return d;
      },
      py::arg("model"), py::arg("mode"), py::arg("n_samples") = 1000, py::arg("seed") = 1);

  m.def(
      "oracle",
      [](const CovarianceModel& mdl, const SelectionMode& mode, std::uint64_t budget) {
        OracleConfig cfg;
        cfg.budget = budget;
        const auto r = exhaustive_optimum(mdl, mode, cfg);
        return py::make_tuple(r.best.to_bitstring(), r.sinr_db, r.candidates_evaluated);
      },
      py::arg("model"), py::arg("mode"), py::arg("budget") = 10'000'000);

  m.def(
      "run_sweep",
      [](const Scenario& scenario, const std::vector<SelectionMode>& modes, const std::string& theta,
         bool oracle, bool power_adjust, int n_samples, std::uint64_t seed) {
        ExperimentPlan plan;
        plan.scenario = scenario;
        plan.modes = modes;
        plan.theta = ThetaGrid::parse(theta);
        plan.run_oracle = oracle;
        plan.power_adjust = power_adjust;
        plan.n_samples = n_samples;
        plan.seed = seed;
        std::vector<SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_sweep(plan);
        }
        py::list out;
        for (const auto& r : rows) out.append(row_to_dict(r));
        return py::make_tuple(out, format_results(rows));
      },
      py::arg("scenario"), py::arg("modes"), py::arg("theta") = "0:90:2", py::arg("oracle") = false,
      py::arg("power_adjust") = false, py::arg("n_samples") = 1000, py::arg("seed") = 1);
}
