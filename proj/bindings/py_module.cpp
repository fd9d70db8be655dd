// Python bindings for the core library. Engine-taking functions are exposed
// with a seed parameter instead; everything else mirrors the C++ API.

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <memory>
#include <vector>

#include "mfrp/errors.hpp"
#include "mfrp/exact.hpp"
#include "mfrp/gf2.hpp"
#include "mfrp/meanfield.hpp"
#include "mfrp/mfrp.hpp"
#include "mfrp/model.hpp"
#include "mfrp/numeric.hpp"
#include "mfrp/rng.hpp"

namespace py = pybind11;
using namespace mfrp;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lower bounds on log partition functions of pairwise binary models: "
            "mean field sharpened by random parity projections.";

  py::register_exception<CapError>(m, "CapError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  // --- rng ------------------------------------------------------------
  py::enum_<Stream>(m, "Stream")
      .value("MODEL", Stream::kModel)
      .value("PROJECTION", Stream::kProjection)
      .value("INIT", Stream::kInit)
      .value("WISH", Stream::kWish);
  m.def(
      "derive_seed",
      [](std::uint64_t master, Stream stream, const std::vector<std::uint64_t>& path) {
        return derive_seed(master, stream, std::span<const std::uint64_t>(path));
      },
      py::arg("master"), py::arg("stream"), py::arg("path") = std::vector<std::uint64_t>{},
      "Deterministic child seed addressed by (purpose, indices...).");

  // --- gf2 ------------------------------------------------------------
  py::class_<Gf2Matrix>(m, "Gf2Matrix")
      .def(py::init<>())
      .def(py::init<std::size_t, std::size_t>(), py::arg("rows"), py::arg("cols"))
      .def_property_readonly("rows", &Gf2Matrix::rows)
      .def_property_readonly("cols", &Gf2Matrix::cols)
      .def("get", &Gf2Matrix::get, py::arg("r"), py::arg("c"))
      .def("set", &Gf2Matrix::set, py::arg("r"), py::arg("c"), py::arg("v"))
      .def(py::self == py::self);

  py::class_<ConstraintSystem>(m, "ConstraintSystem")
      .def_readonly("m", &ConstraintSystem::m)
      .def_readonly("n", &ConstraintSystem::n)
      .def_readonly("C", &ConstraintSystem::C)
      .def_readonly("b", &ConstraintSystem::b)
      .def_readonly("perm", &ConstraintSystem::perm)
      .def_readonly("rank", &ConstraintSystem::rank)
      .def_readonly("consistent", &ConstraintSystem::consistent)
      .def("free_count", &ConstraintSystem::free_count)
      .def("pivot_var", &ConstraintSystem::pivot_var, py::arg("row"))
      .def("free_var", &ConstraintSystem::free_var, py::arg("slot"));

  m.def(
      "sample_projection",
      [](std::size_t n, std::size_t mm, std::uint64_t seed) {
        auto rng = make_engine(seed);
        return sample_projection(n, mm, rng);
      },
      py::arg("n"), py::arg("m"), py::arg("seed"),
      "Fair-coin parity system (A, b) drawn from the seeded engine.");
  m.def("rref_mod2", &rref_mod2, py::arg("a"), py::arg("b"));
  m.def("empty_system", &empty_system, py::arg("n"));
  m.def("member", &member, py::arg("cs"), py::arg("x"));
  m.def("count_solutions", &count_solutions, py::arg("cs"));

  // --- model ----------------------------------------------------------
  py::class_<Edge>(m, "Edge")
      .def_readonly("i", &Edge::i)
      .def_readonly("j", &Edge::j)
      .def_readonly("w", &Edge::w);

  py::class_<PairwiseModel>(m, "PairwiseModel")
      .def(py::init<>())
      .def(py::init<std::size_t>(), py::arg("n"))
      .def("num_vars", &PairwiseModel::num_vars)
      .def("unary", &PairwiseModel::unary, py::arg("i"))
      .def("set_unary", &PairwiseModel::set_unary, py::arg("i"), py::arg("w"))
      .def("add_unary", &PairwiseModel::add_unary, py::arg("i"), py::arg("w"))
      .def("add_edge", &PairwiseModel::add_edge, py::arg("i"), py::arg("j"), py::arg("w"))
      .def("const_offset", &PairwiseModel::const_offset)
      .def("set_const_offset", &PairwiseModel::set_const_offset, py::arg("c"))
      .def("add_const_offset", &PairwiseModel::add_const_offset, py::arg("c"))
      .def("edges", &PairwiseModel::edges)
      .def("neighbors", &PairwiseModel::neighbors, py::arg("i"))
      .def(py::self == py::self);

  m.def("theta_dot_phi", &theta_dot_phi, py::arg("model"), py::arg("x"));
  m.def(
      "ising_grid",
      [](std::size_t rows, std::size_t cols, double w_lo, double w_hi, double f_lo,
         double f_hi, std::uint64_t seed) {
        auto rng = make_engine(seed);
        return ising_grid(rows, cols, w_lo, w_hi, f_lo, f_hi, rng);
      },
      py::arg("rows"), py::arg("cols"), py::arg("w_lo") = -10.0, py::arg("w_hi") = 10.0,
      py::arg("f_lo") = -1.0, py::arg("f_hi") = 1.0, py::arg("seed") = 0,
      "Random mixed Ising grid in the {0,1} parameterization.");

  py::class_<RbmParams>(m, "RbmParams")
      .def(py::init<>())
      .def_readwrite("n_visible", &RbmParams::n_visible)
      .def_readwrite("n_hidden", &RbmParams::n_hidden)
      .def_readwrite("weights", &RbmParams::weights)
      .def_readwrite("visible_bias", &RbmParams::visible_bias)
      .def_readwrite("hidden_bias", &RbmParams::hidden_bias)
      .def("weight", &RbmParams::weight, py::arg("h"), py::arg("v"));

  m.def("rbm_to_model", &rbm_to_model, py::arg("params"));
  m.def("load_model", &load_model, py::arg("path"));
  m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
  m.def("load_rbm", &load_rbm, py::arg("path"));
  m.def("load_any_model", &load_any_model, py::arg("path"));

  // --- mean field -------------------------------------------------------
  py::class_<SolveOptions>(m, "SolveOptions")
      .def(py::init<>())
      .def_readwrite("tol", &SolveOptions::tol)
      .def_readwrite("max_sweeps", &SolveOptions::max_sweeps)
      .def_readwrite("timeout_s", &SolveOptions::timeout_s);

  py::class_<MfState>(m, "MfState")
      .def_readonly("mu", &MfState::mu)
      .def_readonly("elbo", &MfState::elbo)
      .def_readonly("iterations", &MfState::iterations)
      .def_readonly("converged", &MfState::converged);

  m.def(
      "elbo",
      [](const PairwiseModel& model, const std::vector<double>& mu) {
        return elbo(model, mu);
      },
      py::arg("model"), py::arg("mu"),
      "Fully factored evidence lower bound on log Z.");
  m.def(
      "mf_update_coordinate",
      [](const PairwiseModel& model, const std::vector<double>& mu, std::size_t k) {
        return mf_update_coordinate(model, mu, k);
      },
      py::arg("model"), py::arg("mu"), py::arg("k"));
  m.def("mf_ascent", &mf_ascent, py::arg("model"), py::arg("init_mu"),
        py::arg("opts") = SolveOptions{});
  m.def("mf_estimate", &mf_estimate, py::arg("model"), py::arg("restarts"),
        py::arg("opts"), py::arg("seed"));

  // --- projected states and runs ----------------------------------------
  py::class_<MarginalState>(m, "MarginalState")
      .def(py::init([](const ConstraintSystem& cs, std::vector<double> mu_free) {
             return MarginalState(std::make_shared<const ConstraintSystem>(cs),
                                  std::move(mu_free));
           }),
           py::arg("cs"), py::arg("mu_free"))
      .def("num_vars", &MarginalState::num_vars)
      .def("free_count", &MarginalState::free_count)
      .def("free_marginal", &MarginalState::free_marginal, py::arg("slot"))
      .def("set_free_marginal", &MarginalState::set_free_marginal, py::arg("slot"),
           py::arg("value"))
      .def("pivot_marginal", &MarginalState::pivot_marginal, py::arg("row"))
      .def("marginal", &MarginalState::marginal, py::arg("var"))
      .def("marginals", &MarginalState::marginals)
      .def("free_slot_of", &MarginalState::free_slot_of, py::arg("var"))
      .def("pivot_row_of", &MarginalState::pivot_row_of, py::arg("var"));

  m.def("constrained_singleton", &constrained_singleton, py::arg("state"), py::arg("var"));
  m.def("constrained_pairwise", &constrained_pairwise, py::arg("state"), py::arg("k"),
        py::arg("l"));
  m.def("projected_elbo", &projected_elbo, py::arg("model"), py::arg("state"),
        "Lower bound on log Z(A, b) under the constrained product law.");
  m.def("coordinate_update", &coordinate_update, py::arg("model"), py::arg("state"),
        py::arg("var"));

  py::class_<ProjectionEstimate>(m, "ProjectionEstimate")
      .def_readonly("m", &ProjectionEstimate::m)
      .def_readonly("log_gamma", &ProjectionEstimate::log_gamma)
      .def_readonly("ranks", &ProjectionEstimate::ranks)
      .def_readonly("aggregate_log", &ProjectionEstimate::aggregate_log)
      .def_readonly("mean_aggregate_log", &ProjectionEstimate::mean_aggregate_log)
      .def_readonly("wall_ms", &ProjectionEstimate::wall_ms)
      .def_readonly("total_sweeps", &ProjectionEstimate::total_sweeps);

  py::class_<MfrpResult>(m, "MfrpResult")
      .def_readonly("estimate", &MfrpResult::estimate)
      .def_readonly("best_states", &MfrpResult::best_states);

  m.def("mfrp_run", &mfrp_run, py::arg("model"), py::arg("m"), py::arg("trials"),
        py::arg("restarts"), py::arg("opts") = SolveOptions{}, py::arg("seed") = 0,
        "T parity draws at constraint count m, each solved with J restarts.");

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("curve", &SweepResult::curve)
      .def_readonly("best_index", &SweepResult::best_index);

  m.def("mfrp_sweep", &mfrp_sweep, py::arg("model"), py::arg("levels"), py::arg("trials"),
        py::arg("restarts"), py::arg("opts") = SolveOptions{}, py::arg("seed") = 0);

  py::enum_<MarginalAggregate>(m, "MarginalAggregate")
      .value("MEAN", MarginalAggregate::kMean)
      .value("MEDIAN", MarginalAggregate::kMedian);
  m.def("aggregate_marginals", &aggregate_marginals, py::arg("model"), py::arg("runs"),
        py::arg("rule") = MarginalAggregate::kMean);

  // --- exact references ---------------------------------------------------
  m.def("exact_log_z", &exact_log_z, py::arg("model"),
        py::arg("cap") = kDefaultEnumerationCap);
  m.def("exact_constrained_log_z", &exact_constrained_log_z, py::arg("model"),
        py::arg("cs"), py::arg("cap") = kDefaultEnumerationCap);

  py::class_<MapResult>(m, "MapResult")
      .def_readonly("x", &MapResult::x)
      .def_readonly("value", &MapResult::value);
  m.def("constrained_map", &constrained_map, py::arg("model"), py::arg("cs"),
        py::arg("cap") = kDefaultEnumerationCap);
  m.def("exact_marginals", &exact_marginals, py::arg("model"),
        py::arg("cap") = kDefaultEnumerationCap);

  py::class_<WishConfig>(m, "WishConfig")
      .def(py::init<>())
      .def_readwrite("trials", &WishConfig::trials)
      .def_readwrite("delta", &WishConfig::delta)
      .def_readwrite("alpha", &WishConfig::alpha)
      .def_readwrite("seed", &WishConfig::seed);
  m.def("wish_required_trials", &wish_required_trials, py::arg("n"), py::arg("delta"),
        py::arg("alpha"));
  m.def("wish_estimate", &wish_estimate, py::arg("model"), py::arg("cfg"),
        py::arg("cap") = kDefaultEnumerationCap,
        "Level-sum estimator of log Z from constrained MAP medians.");

  m.attr("DEFAULT_ENUMERATION_CAP") = kDefaultEnumerationCap;
}
