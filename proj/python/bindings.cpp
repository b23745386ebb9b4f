#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sepiter/oracle.hpp"
#include "sepiter/partition.hpp"
#include "sepiter/see_solver.hpp"
#include "sepiter/states.hpp"
#include "sepiter/witness.hpp"

namespace py = pybind11;
using namespace sepiter;

namespace {

MultipartiteOperator make_operator(const Matrix& m, const std::vector<int>& dims) {
    return MultipartiteOperator(m, SubsystemDims(dims));
}

std::vector<int> dims_list(const SubsystemDims& dims) {
    return {dims.values().begin(), dims.values().end()};
}

// a_1 ⊗ ... ⊗ a_N with subsystem 1 slowest
Vector kron_factors(const ProductState& s) {
    Vector out = Vector::Ones(1);
    for (const auto& f : s.factors()) {
        Vector next(out.size() * f.size());
        for (Eigen::Index i = 0; i < out.size(); ++i) next.segment(i * f.size(), f.size()) = out[i] * f;
        out = std::move(next);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Maximal separability eigenvalues and entanglement witnesses";

    py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<DegenerateProjection>(m, "DegenerateProjection", PyExc_RuntimeError);
    py::register_exception<NoConvergenceError>(m, "NoConvergenceError", PyExc_RuntimeError);

    py::class_<ProductState>(m, "ProductState")
        .def(py::init([](std::vector<Vector> factors) {
                 std::vector<int> dims;
                 for (const auto& f : factors) dims.push_back(static_cast<int>(f.size()));
                 return ProductState::normalized(std::move(factors), SubsystemDims(dims));
             }),
             py::arg("factors"), "Normalizes each factor.")
        .def_property_readonly("factors", &ProductState::factors)
        .def_property_readonly("dims", [](const ProductState& s) { return dims_list(s.dims()); })
        .def("vector", &kron_factors, "Full product vector, subsystem 1 slowest.")
        .def("__repr__", [](const ProductState& s) { return "ProductState(dims=" + s.dims().to_string() + ")"; });

    py::enum_<StartStrategy>(m, "StartStrategy")
        .value("OperatorBasis", StartStrategy::OperatorBasis)
        .value("EigenvectorProjection", StartStrategy::EigenvectorProjection)
        .value("Explicit", StartStrategy::Explicit);

    py::class_<SpiConfig>(m, "SpiConfig")
        .def(py::init<>())
        .def_readwrite("epsilon", &SpiConfig::epsilon)
        .def_readwrite("max_cycles", &SpiConfig::max_cycles)
        .def_readwrite("pi_epsilon", &SpiConfig::pi_epsilon)
        .def_readwrite("pi_max_iters", &SpiConfig::pi_max_iters)
        .def_readwrite("start_strategy", &SpiConfig::start_strategy)
        .def_readwrite("explicit_starts", &SpiConfig::explicit_starts)
        .def_readwrite("seed", &SpiConfig::seed)
        .def_readwrite("inner_shift", &SpiConfig::inner_shift)
        .def_readwrite("threads", &SpiConfig::threads);

    py::class_<SpiResult>(m, "SpiResult")
        .def_readonly("g", &SpiResult::g)
        .def_readonly("state", &SpiResult::state)
        .def_readonly("residual", &SpiResult::residual)
        .def_readonly("cycles", &SpiResult::cycles)
        .def_readonly("g_trace", &SpiResult::g_trace)
        .def_readonly("converged", &SpiResult::converged);

    py::class_<WitnessBound>(m, "WitnessBound")
        .def_readonly("g_max", &WitnessBound::g_max)
        .def_readonly("argmax", &WitnessBound::argmax)
        .def_readonly("per_start", &WitnessBound::per_start)
        .def_readonly("shift", &WitnessBound::shift);

    py::class_<Witness>(m, "Witness")
        .def_readonly("g_max", &Witness::g_max)
        .def_readonly("argmax", &Witness::argmax)
        .def_readonly("shift", &Witness::shift)
        .def_property_readonly("partition", [](const Witness& w) { return w.partition.to_string(); })
        .def_property_readonly("matrix", [](const Witness& w) { return w.L.matrix(); });

    py::class_<StateTest>(m, "StateTest")
        .def_readonly("value", &StateTest::value)
        .def_readonly("trace", &StateTest::trace)
        .def_readonly("entangled", &StateTest::entangled)
        .def_readonly("inconclusive", &StateTest::inconclusive);

    py::class_<OracleConfig>(m, "OracleConfig")
        .def(py::init<>())
        .def_readwrite("population", &OracleConfig::population)
        .def_readwrite("generations", &OracleConfig::generations)
        .def_readwrite("mutation_scale", &OracleConfig::mutation_scale)
        .def_readwrite("restarts", &OracleConfig::restarts)
        .def_readwrite("seed", &OracleConfig::seed)
        .def_readwrite("refine_iters", &OracleConfig::refine_iters)
        .def_readwrite("threads", &OracleConfig::threads);

    py::class_<OracleResult>(m, "OracleResult")
        .def_readonly("g", &OracleResult::g)
        .def_readonly("state", &OracleResult::state)
        .def_readonly("evaluations", &OracleResult::evaluations);

    m.def("swap_operator", [](int d) { return swap_operator(d).matrix(); }, py::arg("d"),
          "2*1 - V on d x d.");
    m.def("smolin_state", [] { return smolin_state().matrix(); });
    m.def("horodecki_state", [](double alpha) { return horodecki_state(alpha).matrix(); }, py::arg("alpha"));
    m.def(
        "random_operator",
        [](const std::vector<int>& dims, std::uint64_t seed) {
            return random_operator({SubsystemDims(dims), seed}).matrix();
        },
        py::arg("dims"), py::arg("seed"));

    m.def(
        "spi_solve",
        [](const Matrix& L, const std::vector<int>& dims, const ProductState& start, const SpiConfig& cfg) {
            const auto op = make_operator(L, dims);
            py::gil_scoped_release release;
            return spi_solve(op, start, cfg);
        },
        py::arg("matrix"), py::arg("dims"), py::arg("start"), py::arg("config") = SpiConfig{},
        "Runs SPI cycles from one start. The operator must be positive.");
    m.def(
        "max_separability_eigenvalue",
        [](const Matrix& L, const std::vector<int>& dims, const SpiConfig& cfg) {
            const auto op = make_operator(L, dims);
            py::gil_scoped_release release;
            return max_separability_eigenvalue(op, cfg);
        },
        py::arg("matrix"), py::arg("dims"), py::arg("config") = SpiConfig{});
    m.def(
        "build_witness",
        [](const Matrix& L, const std::vector<int>& dims, const std::string& partition, const SpiConfig& cfg) {
            const auto op = make_operator(L, dims);
            const auto part = partition.empty() ? Partition::finest(dims.size()) : Partition::parse(partition);
            py::gil_scoped_release release;
            return build_witness(op, part, cfg);
        },
        py::arg("matrix"), py::arg("dims"), py::arg("partition") = "", py::arg("config") = SpiConfig{},
        "Empty partition means one party per subsystem.");
    m.def(
        "test_state",
        [](const Witness& w, const Matrix& rho) { return test_state(w, DensityOperator(rho, w.L.dims())); },
        py::arg("witness"), py::arg("rho"));
    m.def(
        "oracle_gmax",
        [](const Matrix& L, const std::vector<int>& dims, const OracleConfig& cfg) {
            const auto op = make_operator(L, dims);
            py::gil_scoped_release release;
            return oracle_gmax(op, cfg);
        },
        py::arg("matrix"), py::arg("dims"), py::arg("config") = OracleConfig{});
}
