#include "descfilt/batch_oracle.hpp"
#include "descfilt/errors.hpp"
#include "descfilt/minimax_filter.hpp"
#include "descfilt/model.hpp"
#include "descfilt/model_io.hpp"
#include "descfilt/reference_example.hpp"
#include "descfilt/regular_kalman.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pybind11::literals;
using namespace descfilt;

namespace {

FilterOptions options(double rank_tol) {
  FilterOptions o;
  o.rank_tol = rank_tol;
  return o;
}

}  // namespace

PYBIND11_MODULE(_descfilt, m) {
  m.doc() = "Minimax state estimation for linear descriptor systems";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::class_<DescriptorModel>(m, "DescriptorModel")
      .def(py::init<>())
      .def(py::init([](Index n, Index m_, Index p, Index tau, MatSeq F, MatSeq C, MatSeq H,
                       MatSeq S, MatSeq R) {
             return DescriptorModel{n, m_, p, tau, std::move(F), std::move(C), std::move(H),
                                    std::move(S), std::move(R)};
           }),
           "n"_a, "m"_a, "p"_a, "tau"_a, "F"_a, "C"_a, "H"_a, "S"_a, "R"_a)
      .def_readwrite("n", &DescriptorModel::n)
      .def_readwrite("m", &DescriptorModel::m)
      .def_readwrite("p", &DescriptorModel::p)
      .def_readwrite("tau", &DescriptorModel::tau)
      .def_readwrite("F", &DescriptorModel::F)
      .def_readwrite("C", &DescriptorModel::C)
      .def_readwrite("H", &DescriptorModel::H)
      .def_readwrite("S", &DescriptorModel::S)
      .def_readwrite("R", &DescriptorModel::R)
      .def("prefix", &DescriptorModel::prefix, "horizon"_a);

  py::class_<FilterState>(m, "FilterState")
      .def_readonly("k", &FilterState::k)
      .def_readonly("P", &FilterState::P)
      .def_readonly("r", &FilterState::r)
      .def_readonly("alpha", &FilterState::alpha);

  py::class_<EstimateReport>(m, "EstimateReport")
      .def_readonly("xhat", &EstimateReport::xhat)
      .def_readonly("beta", &EstimateReport::beta)
      .def_readonly("projector", &EstimateReport::projector)
      .def_readonly("observable_rank", &EstimateReport::observable_rank)
      .def_readonly("noncausality_index", &EstimateReport::noncausality_index)
      .def_readonly("consistent", &EstimateReport::consistent);

  py::class_<InformationalSet>(m, "InformationalSet")
      .def(py::init([](const FilterState& s, double rank_tol) {
             return InformationalSet(s, options(rank_tol));
           }),
           "state"_a, "rank_tol"_a = 0.0)
      .def_property_readonly("center", &InformationalSet::center)
      .def_property_readonly("beta", &InformationalSet::beta)
      .def_property_readonly("projector", &InformationalSet::projector)
      .def_property_readonly("noncausality_index", &InformationalSet::noncausality_index)
      .def("observable", &InformationalSet::observable, "ell"_a)
      .def("ell_error", &InformationalSet::ell_error, "ell"_a)
      .def("direction_bounds", &InformationalSet::direction_bounds, "ell"_a)
      .def("contains", &InformationalSet::contains, "x"_a)
      .def("report", &InformationalSet::report);

  py::class_<KalmanState>(m, "KalmanState")
      .def_readonly("k", &KalmanState::k)
      .def_readonly("P", &KalmanState::P)
      .def_readonly("x", &KalmanState::x);

  py::class_<BatchProblem>(m, "BatchProblem")
      .def_readonly("L", &BatchProblem::L)
      .def_readonly("H", &BatchProblem::H)
      .def_readonly("Q1", &BatchProblem::Q1)
      .def_readonly("Q2", &BatchProblem::Q2)
      .def_readonly("y", &BatchProblem::y);

  py::class_<BatchSolution>(m, "BatchSolution")
      .def_readonly("xstack", &BatchSolution::xstack)
      .def_readonly("min_value", &BatchSolution::min_value)
      .def_readonly("normal_matrix", &BatchSolution::normal_matrix);

  m.def("pinv", &pinv, "m"_a, "rank_tol"_a = 0.0);
  m.def("range_projector", &range_projector, "m"_a, "rank_tol"_a = 0.0);
  m.def("sym_rank", &sym_rank, "m"_a, "rank_tol"_a = 0.0);

  m.def("validate", [](const DescriptorModel& mdl) { return validate(mdl).issues; }, "model"_a);
  m.def("simulate",
        [](const DescriptorModel& mdl, const VecSeq& f, const VecSeq& g, const VecSeq& w,
           double rank_tol) {
          const Trajectory t = simulate(mdl, f, g, w, rank_tol);
          return py::make_tuple(t.states, t.outputs);
        },
        "model"_a, "f"_a, "g"_a, "w"_a, "rank_tol"_a = 0.0,
        "Returns (states, outputs).");
  m.def("budget", &budget, "model"_a, "f"_a, "g"_a);
  m.def("augment_ode", &augment_ode, "A"_a, "Htilde"_a, "S"_a, "R"_a);
  m.def("parse_model_spec", [](const std::string& text) { return parse_model_spec(text).model; },
        "text"_a);
  m.def("load_model_spec", [](const std::string& path) { return load_model_spec(path).model; },
        "path"_a);
  m.def("oscillator_model", &reference::oscillator_model, "tau"_a,
        "r0"_a = reference::kR0Substitute);
  m.def("oscillator_inputs",
        [](Index tau) {
          const InputSequences in = reference::oscillator_inputs(tau);
          return py::make_tuple(in.f, in.g, in.w);
        },
        "tau"_a, "Returns (f, g, w).");

  m.def("init", [](const DescriptorModel& mdl, const Vec& y0, double tol) {
    return init(mdl, y0, options(tol));
  }, "model"_a, "y0"_a, "rank_tol"_a = 0.0);
  m.def("step", [](const FilterState& s, const DescriptorModel& mdl, const Vec& y, double tol) {
    return step(s, mdl, y, options(tol));
  }, "state"_a, "model"_a, "y"_a, "rank_tol"_a = 0.0);
  m.def("run", [](const DescriptorModel& mdl, const VecSeq& ys, double tol) {
    return run(mdl, ys, options(tol));
  }, "model"_a, "ys"_a, "rank_tol"_a = 0.0);
  m.def("estimate", [](const FilterState& s, double tol) { return estimate(s, options(tol)); },
        "state"_a, "rank_tol"_a = 0.0);
  m.def("ell_error", [](const FilterState& s, const Vec& ell, double tol) {
    return ell_error(s, ell, options(tol));
  }, "state"_a, "ell"_a, "rank_tol"_a = 0.0);
  m.def("direction_bounds", [](const FilterState& s, const Vec& ell, double tol) {
    return direction_bounds(s, ell, options(tol));
  }, "state"_a, "ell"_a, "rank_tol"_a = 0.0);
  m.def("membership", [](const FilterState& s, const Vec& x, double tol) {
    return membership(s, x, options(tol));
  }, "state"_a, "x"_a, "rank_tol"_a = 0.0);

  m.def("assemble", &assemble, "model"_a, "ys"_a);
  m.def("solve", &solve, "problem"_a, "rank_tol"_a = 0.0);
  m.def("value_function", &value_function, "problem"_a, "last"_a, "rank_tol"_a = 0.0);
  m.def("decomposition_check", &decomposition_check, "problem"_a, "solution"_a, "x"_a);

  m.def("check_regularity", &check_regularity, "model"_a, "rank_tol"_a = 0.0);
  m.def("kalman_init", &kalman_init, "model"_a, "y0"_a, "rank_tol"_a = 0.0);
  m.def("kalman_step", &kalman_step, "state"_a, "model"_a, "y"_a, "rank_tol"_a = 0.0);
}
