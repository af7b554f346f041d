#include <optional>
#include <string>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sympflow/asymptotics.hpp"
#include "sympflow/errors.hpp"
#include "sympflow/examples.hpp"
#include "sympflow/flow.hpp"
#include "sympflow/hjcf.hpp"
#include "sympflow/sda.hpp"

namespace py = pybind11;

namespace sympflow {
namespace {

JordanSpec SpecFromString(const std::string& text) {
  return spec_from_json(json::parse(text));
}

Direction ParseDirection(const std::string& name) {
  if (name == "plus" || name == "+") return Direction::kPlus;
  if (name == "minus" || name == "-") return Direction::kMinus;
  throw UsageError("direction must be 'plus' or 'minus'");
}

BlockKind ParseKind(const std::string& name) {
  if (name == "r") return BlockKind::kR;
  if (name == "e") return BlockKind::kE;
  if (name == "c") return BlockKind::kC;
  if (name == "d") return BlockKind::kD;
  throw UsageError("block kind must be one of r, e, c, d");
}

py::dict TraceToDict(const SdaTrace& trace) {
  py::dict out;
  out["verdict"] = to_string(trace.verdict);
  out["steps"] = trace.records.size();
  out["message"] = trace.message;
  py::list residuals;
  for (const SdaRecord& r : trace.records) residuals.append(r.residual);
  out["residuals"] = residuals;
  if (!trace.records.empty()) {
    const SdaState& s = trace.last().state;
    out["solution"] = std::holds_alternative<Sda1State>(s)
                          ? Mat(std::get<Sda1State>(s).H)
                          : Mat(std::get<Sda2State>(s).Q);
  }
  return out;
}

}  // namespace
}  // namespace sympflow

PYBIND11_MODULE(_sympflow, m) {
  using namespace sympflow;
  m.doc() = "Doubling iterations, Riccati flows and their long-time limits.";

  static py::exception<Error> base(m, "SympflowError");
  static py::exception<PoleError> pole(m, "PoleError", base.ptr());
  static py::exception<HypothesisError> hyp(m, "HypothesisError", base.ptr());
  static py::exception<AssumptionError> assume(m, "AssumptionError", base.ptr());
  static py::exception<SpecError> spec_err(m, "SpecError", base.ptr());
  static py::exception<UsageError> usage(m, "UsageError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const PoleError& e) {
      PyErr_SetString(pole.ptr(), e.what());
    } catch (const HypothesisError& e) {
      PyErr_SetString(hyp.ptr(), e.what());
    } catch (const AssumptionError& e) {
      PyErr_SetString(assume.ptr(), e.what());
    } catch (const SpecError& e) {
      PyErr_SetString(spec_err.ptr(), e.what());
    } catch (const UsageError& e) {
      PyErr_SetString(usage.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(base.ptr(), e.what());
    }
  });

  m.def("make_J", &make_J, py::arg("n"));
  m.def("mat_exp", &mat_exp, py::arg("A"));

  m.def(
      "build_J", [](const std::string& spec) { return build_J(SpecFromString(spec)); },
      py::arg("spec_json"));
  m.def(
      "exp_J",
      [](const std::string& spec, double t) { return exp_J(SpecFromString(spec), t); },
      py::arg("spec_json"), py::arg("t"));
  m.def("kappa", &kappa, py::arg("n"));
  m.def("kappa_numeric", &kappa_numeric, py::arg("n"), py::arg("t"));
  m.def("digamma_det", &digamma_det, py::arg("k1"), py::arg("k2"));
  m.def("digamma_det_exact", &digamma_det_exact, py::arg("k1"), py::arg("k2"));

  m.def(
      "run_sda_nme",
      [](const Mat& A, const Mat& Q, double tol, int kmax) {
        return TraceToDict(run_sda(NmeProblem{A, Q}, tol, kmax));
      },
      py::arg("A"), py::arg("Q"), py::arg("tol") = 1e-13, py::arg("kmax") = 60);
  m.def(
      "run_sda_dare",
      [](const Mat& A, const Mat& G, const Mat& H, double tol, int kmax) {
        return TraceToDict(run_sda(DareProblem{A, G, H}, tol, kmax));
      },
      py::arg("A"), py::arg("G"), py::arg("H"), py::arg("tol") = 1e-13,
      py::arg("kmax") = 60);

  m.def(
      "rde_solve",
      [](const Mat& H, const Mat& W0, double t) { return rde_solve(H, W0, t); },
      py::arg("H"), py::arg("W0"), py::arg("t"));
  m.def(
      "singular_times",
      [](const Mat& H, const Mat& W0, double t0, double t1, int grid) {
        std::vector<double> out;
        for (const SingularTime& s : singular_times(H, W0, t0, t1, grid).times) {
          out.push_back(s.t);
        }
        return out;
      },
      py::arg("H"), py::arg("W0"), py::arg("t0"), py::arg("t1"),
      py::arg("grid") = 2001);

  py::class_<ExampleInstance>(m, "Instance")
      .def_readonly("S", &ExampleInstance::S)
      .def_readonly("W0", &ExampleInstance::W0)
      .def_readonly("H", &ExampleInstance::H)
      .def_property_readonly(
          "spec_json",
          [](const ExampleInstance& ex) { return spec_to_json(ex.spec).dump(); })
      .def(
          "flow_W",
          [](const ExampleInstance& ex, double t) -> std::optional<Mat> {
            const Frame f = ex.prop.frame(ex.W0, t);
            if (f.sigma_min() <= 1e-12) return std::nullopt;
            return Mat(f.bottom() * f.top().inverse());
          },
          py::arg("t"));
  m.def(
      "make_instance",
      [](const std::string& spec, std::uint64_t seed) {
        return make_instance(SpecFromString(spec), seed);
      },
      py::arg("spec_json"), py::arg("seed"));
  m.def("example_instance", &example_instance, py::arg("which"), py::arg("seed"));

  py::class_<GeneralPrediction>(m, "Prediction")
      .def_readonly("mu", &GeneralPrediction::mu)
      .def("constant_limit", &GeneralPrediction::constant_limit)
      .def("U1_at", &GeneralPrediction::U1_at, py::arg("t"))
      .def("W_inf", &GeneralPrediction::W_inf, py::arg("t"),
           py::arg("rank_tol") = 1e-12)
      .def("Q_inf_inv", &GeneralPrediction::Q_inf_inv, py::arg("t"),
           py::arg("rank_tol") = 1e-12)
      .def("to_json", [](const GeneralPrediction& p) {
        return prediction_to_json(p).dump();
      });
  m.def(
      "general_limit",
      [](const ExampleInstance& ex, const std::string& direction) {
        return general_limit(ex.spec, ex.S, ex.W0, ParseDirection(direction));
      },
      py::arg("instance"), py::arg("direction") = "plus");
  m.def(
      "elementary_limit_json",
      [](const ExampleInstance& ex, const std::string& kind,
         const std::string& direction) {
        const ElementaryPrediction p = elementary_limit(
            ParseKind(kind), ex.spec, ex.S, ex.W0, ParseDirection(direction));
        json j = prediction_to_json(p);
        if (p.orbit) {
          if (const auto bp = blowup_period(p)) {
            j["period"] = bp->period;
            j["t_star"] = bp->t_star;
          }
        }
        return j.dump();
      },
      py::arg("instance"), py::arg("kind"), py::arg("direction") = "plus");
  m.def(
      "sda_class_json",
      [](const std::string& spec) {
        return class_to_json(sda_class(SpecFromString(spec))).dump();
      },
      py::arg("spec_json"));
}
