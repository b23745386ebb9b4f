#include <cmath>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "oracles.hpp"
#include "sepiter/random.hpp"
#include "sepiter/see_solver.hpp"
#include "sepiter/states.hpp"

using namespace sepiter;

namespace {

Vector vec(std::initializer_list<Complex> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (Complex x : xs) v[i++] = x;
    return v;
}

MultipartiteOperator diag(std::initializer_list<double> xs) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) m(i, i) = x, ++i;
    return MultipartiteOperator(m, SubsystemDims(std::vector<int>{static_cast<int>(xs.size())}));
}

double gamma2(const ProductState& s) { return std::norm(s.factor(0).dot(s.factor(1))); }

ProductState swap_pair(double g2) {
    return ProductState::normalized({vec({1, 0}), vec({std::sqrt(g2), std::sqrt(1 - g2)})}, SubsystemDims(std::vector<int>{2, 2}));
}

double lambda_max(const Matrix& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(Eigen::MatrixXcd(m), Eigen::EigenvaluesOnly)
        .eigenvalues()
        .maxCoeff();
}

SpiConfig cfg_with(StartStrategy s, int threads = 1) {
    SpiConfig c;
    c.start_strategy = s;
    c.threads = threads;
    return c;
}

const std::vector<std::vector<int>> kDimsCorpus = {{2, 2}, {2, 3}, {3, 3}, {2, 2, 2}};

}  // namespace

TEST_CASE("SpiConfig validation") {
    SpiConfig c;
    CHECK_NOTHROW(c.validate());
    c.epsilon = 0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = {};
    c.max_cycles = 0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = {};
    c.pi_epsilon = -1;
    CHECK_THROWS_AS(c.validate(), DomainError);
    CHECK(parse_start_strategy("eigproj") == StartStrategy::EigenvectorProjection);
    CHECK_THROWS(parse_start_strategy("nope"));
}

TEST_CASE("ensure_positive") {
    CHECK(ensure_positive(swap_operator(2)).shift == 0.0);
    const auto zero = MultipartiteOperator(Matrix::Zero(2, 2), SubsystemDims(std::vector<int>{2}));
    const auto z = ensure_positive(zero);
    CHECK(z.shift == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK((z.op.matrix() - 1e-6 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-20);
    CHECK(ensure_positive(diag({-1, 2})).shift == doctest::Approx(1.0 + 1e-6).epsilon(1e-14));

    // complex indefinite operator against the dense eigensolver
    const auto R = random_operator({SubsystemDims(std::vector<int>{3, 4}), 5});
    Matrix h = R.matrix();
    h.diagonal().array() -= 0.05;
    const double lowest = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues()[0];
    REQUIRE(lowest < 0.0);
    const auto shifted = ensure_positive(MultipartiteOperator(h, R.dims()));
    CHECK(shifted.shift == doctest::Approx(1e-6 - lowest).epsilon(1e-12));
}

TEST_CASE("power_iteration") {
    SpiConfig cfg;
    SUBCASE("diagonal") {
        const auto r = power_iteration(diag({1, 2, 3}), vec({1, 1, 1}) / std::sqrt(3.0), cfg);
        CHECK(r.converged);
        CHECK(r.eigenvalue == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(std::abs(std::abs(r.eigenvector[2]) - 1.0) < 1e-10);
    }
    SUBCASE("identity converges immediately") {
        const Vector v = vec({0.6, Complex(0, 0.8)});
        const auto r = power_iteration(MultipartiteOperator::identity(SubsystemDims(std::vector<int>{2})), v, cfg);
        CHECK(r.eigenvalue == doctest::Approx(1.0));
        CHECK(std::abs(std::abs(r.eigenvector.dot(v)) - 1.0) < 1e-14);
        CHECK(r.iterations <= 1);
    }
    SUBCASE("random 5x5 against the dense eigensolver") {
        const auto L = random_operator({SubsystemDims(std::vector<int>{5}), 2024});
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(L.matrix())};
        const auto r = power_iteration(L, Vector::Ones(5) / std::sqrt(5.0), cfg);
        CHECK(std::abs(r.eigenvalue - es.eigenvalues()[4]) < 1e-8);
        CHECK(std::abs(std::abs(r.eigenvector.dot(es.eigenvectors().col(4))) - 1.0) < 1e-8);
    }
    SUBCASE("budget exhaustion is flagged, not thrown") {
        SpiConfig tight;
        tight.pi_max_iters = 2;
        const auto r = power_iteration(diag({1, 1.0001}), vec({1, 1}) / std::sqrt(2.0), tight);
        CHECK_FALSE(r.converged);
    }
}

TEST_CASE("spi_cycle") {
    SpiConfig cfg;
    const auto L = swap_operator(2);
    SUBCASE("swap recurrence from |gamma|^2 = 1/2") {
        CHECK(std::abs(gamma2(spi_cycle(L, swap_pair(0.5), cfg)) - 0.1) < 1e-10);
    }
    SUBCASE("recurrence holds for other overlaps") {
        for (double g2 : {0.9, 0.3, 0.05}) CHECK(std::abs(gamma2(spi_cycle(L, swap_pair(g2), cfg)) - g2 / (9 - 8 * g2)) < 1e-10);
    }
    SUBCASE("orthogonal pair is a fixed point") {
        const auto s = ProductState::basis(SubsystemDims(std::vector<int>{2, 2}), std::vector<int>{0, 1});
        const auto t = spi_cycle(L, s, cfg);
        for (int j = 0; j < 2; ++j) CHECK(std::abs(std::abs(t.factor(j).dot(s.factor(j))) - 1.0) < 1e-12);
    }
    SUBCASE("single party is one power-iteration step") {
        const auto t = spi_cycle(diag({1, 3}), ProductState({vec({1, 1}) / std::sqrt(2.0)}, SubsystemDims(std::vector<int>{2})), cfg);
        CHECK((t.factor(0) - vec({1, 3}) / std::sqrt(10.0)).norm() < 1e-14);
    }
    SUBCASE("factors come back in canonical phase") {
        const auto R = random_operator({SubsystemDims(std::vector<int>{2, 3}), 8});
        const auto t = spi_cycle(R, random_product_state(R.dims(), 99), cfg);
        for (std::size_t j = 0; j < 2; ++j) {
            Eigen::Index k = 0;
            t.factor(j).cwiseAbs().maxCoeff(&k);
            CHECK(t.factor(j)[k].real() > 0.0);
            CHECK(t.factor(j)[k].imag() == 0.0);
        }
    }
}

TEST_CASE("n_orthogonality_residual") {
    const auto L = swap_operator(2);
    const auto orth = ProductState::basis(SubsystemDims(std::vector<int>{2, 2}), std::vector<int>{0, 1});
    CHECK(n_orthogonality_residual(L, orth, 2.0) < 1e-12);
    const auto par = ProductState::basis(SubsystemDims(std::vector<int>{2, 2}), std::vector<int>{0, 0});
    CHECK(n_orthogonality_residual(L, par, 1.0) < 1e-12);
    CHECK(oracle_ref::n_orthogonality_residual(L.matrix(), par.factors(), {2, 2}, 1.0) < 1e-12);
    CHECK(n_orthogonality_residual(L, swap_pair(0.5), 1.5) > 0.1);
}

TEST_CASE("property: residual matches the direct double-loop oracle and the first form") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto& dims = kDimsCorpus[seed % kDimsCorpus.size()];
        const auto L = random_operator({SubsystemDims(dims), 500 + seed});
        const auto s = random_product_state(SubsystemDims(dims), 900 + seed);
        const double g = expectation(L, s) + 0.01 * static_cast<double>(seed % 3);
        const double r = n_orthogonality_residual(L, s, g);
        CHECK(std::abs(r - oracle_ref::n_orthogonality_residual(L.matrix(), s.factors(), dims, g)) < 1e-12);
        CHECK(std::abs(r - first_form_residual(L, s, g)) < 1e-10);
        CHECK(r > 0.0);
    }
}

TEST_CASE("spi_solve") {
    SpiConfig cfg;
    const auto L = swap_operator(2);
    SUBCASE("swap from |gamma|^2 = 1/2 reaches g = 2") {
        const auto r = spi_solve(L, swap_pair(0.5), cfg);
        CHECK(r.converged);
        CHECK(std::abs(r.g - 2.0) < 1e-8);
        CHECK(r.residual < cfg.epsilon);
        CHECK(std::abs(r.state.factor(0).dot(r.state.factor(1))) < 1e-6);
        CHECK(first_form_residual(L, r.state, r.g) < 1e-6);
    }
    SUBCASE("parallel pair is a non-maximal fixed point") {
        const auto r = spi_solve(L, ProductState::basis(SubsystemDims(std::vector<int>{2, 2}), std::vector<int>{0, 0}), cfg);
        CHECK(r.converged);
        CHECK(r.cycles == 0);
        CHECK(r.g == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("single party equals power iteration") {
        const auto R = random_operator({SubsystemDims(std::vector<int>{6}), 17});
        const Vector start = Vector::Ones(6) / std::sqrt(6.0);
        const auto pi = power_iteration(R, start, cfg);
        const auto r = spi_solve(R, ProductState({start}, SubsystemDims(std::vector<int>{6})), cfg);
        CHECK(std::abs(r.g - pi.eigenvalue) < 1e-12);
    }
    SUBCASE("exhausted budget returns an unconverged result") {
        SpiConfig tight;
        tight.max_cycles = 1;
        const auto r = spi_solve(L, swap_pair(0.5), tight);
        CHECK_FALSE(r.converged);
        CHECK(r.cycles == 1);
    }
}

TEST_CASE("property: g_trace is monotone, g matches the state, bounds hold") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto& dims = kDimsCorpus[seed % kDimsCorpus.size()];
        const auto L = random_operator({SubsystemDims(dims), 3000 + seed});
        const auto r = spi_solve(L, random_product_state(SubsystemDims(dims), seed), SpiConfig{});
        REQUIRE(r.converged);
        for (std::size_t s = 1; s < r.g_trace.size(); ++s) CHECK(r.g_trace[s] >= r.g_trace[s - 1] - 1e-12);
        CHECK(std::abs(r.g - expectation(L, r.state)) < 1e-10);
        CHECK(r.residual < 1e-8);
        CHECK(r.g >= 0.0);
        CHECK(r.g <= lambda_max(L.matrix()) + 1e-10);
    }
}

TEST_CASE("property: forward-iteration identity at fixed points") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto& dims = kDimsCorpus[seed % kDimsCorpus.size()];
        const auto L = random_operator({SubsystemDims(dims), 4000 + seed});
        const auto r = spi_solve(L, random_product_state(SubsystemDims(dims), seed), SpiConfig{});
        REQUIRE(r.converged);
        const auto psi = apply(L, flatten(r.state));
        const auto Lp = partial_trace_last(psi);
        const double inner = expectation(Lp, r.state.prefix());
        CHECK(std::abs(r.g - std::sqrt(inner)) < 1e-8);
    }
}

TEST_CASE("starting_vectors") {
    SpiConfig cfg;
    CHECK(operator_basis_count(SubsystemDims(std::vector<int>{2, 2})) == 16);
    const auto qutrits = starting_vectors(MultipartiteOperator::identity(SubsystemDims(std::vector<int>{3, 3})),
                                          StartStrategy::OperatorBasis, cfg);
    CHECK(qutrits.size() == 81);
    for (const auto& s : qutrits) CHECK(std::abs(flatten(s).entries.norm() - 1.0) < 1e-12);

    // per-subsystem order: |0>, |1>, (|0>+|1>)/sqrt2, (|0>+i|1>)/sqrt2
    const auto q = SubsystemDims(std::vector<int>{2});
    CHECK(std::abs(operator_basis_state(q, 1).factor(0)[1] - 1.0) < 1e-15);
    CHECK(std::abs(operator_basis_state(q, 3).factor(0)[1] - Complex(0, 1) / std::sqrt(2.0)) < 1e-15);
    // subsystem 1 varies slowest
    const auto pair = operator_basis_state(SubsystemDims(std::vector<int>{2, 2}), 1);
    CHECK(std::abs(pair.factor(0)[0] - 1.0) < 1e-15);
    CHECK(std::abs(pair.factor(1)[1] - 1.0) < 1e-15);

    // operator-basis projectors span the full operator space
    Eigen::MatrixXcd span(4, 4);
    for (int k = 0; k < 4; ++k) {
        const Vector f = operator_basis_state(q, k).factor(0);
        const Matrix p = f * f.adjoint();
        for (int e = 0; e < 4; ++e) span(e, k) = p(e / 2, e % 2);
    }
    CHECK(Eigen::FullPivLU<Eigen::MatrixXcd>(span).rank() == 4);

    const auto ep = starting_vectors(swap_operator(2), StartStrategy::EigenvectorProjection, cfg);
    CHECK(ep.size() == 1);

    // a complex product vector is its own best product approximation
    const auto dims = SubsystemDims(std::vector<int>{2, 3, 2});
    const ProductState p = random_product_state(dims, 17);
    const Vector pv = flatten(p).entries;
    Matrix L = pv * pv.adjoint();
    L.diagonal().array() += 0.5;
    const auto found = starting_vectors(MultipartiteOperator(L, dims), StartStrategy::EigenvectorProjection, cfg);
    CHECK(std::abs(std::abs(flatten(found[0]).entries.dot(pv)) - 1.0) < 1e-10);
}

TEST_CASE("max_separability_eigenvalue examples") {
    SUBCASE("swap operator") {
        for (auto s : {StartStrategy::OperatorBasis, StartStrategy::EigenvectorProjection})
            CHECK(std::abs(max_separability_eigenvalue(swap_operator(2), cfg_with(s)).g_max - 2.0) < 1e-8);
    }
    SUBCASE("Bell projector plus identity, against a Bloch-grid search") {
        Vector phi = Vector::Zero(4);
        phi[0] = phi[3] = 1.0 / std::sqrt(2.0);
        const Matrix m = Matrix::Identity(4, 4) + phi * phi.adjoint();
        const auto L = MultipartiteOperator(m, SubsystemDims(std::vector<int>{2, 2}));
        const double grid = oracle_ref::two_qubit_grid_max(m, 24);
        CHECK(grid == doctest::Approx(1.5).epsilon(1e-12));
        const auto b = max_separability_eigenvalue(L, SpiConfig{});
        CHECK(std::abs(b.g_max - 1.5) < 1e-8);
        CHECK(b.g_max >= grid - 1e-8);
    }
    SUBCASE("Smolin state") {
        const auto S = smolin_state();
        CHECK(std::abs(max_separability_eigenvalue(S.as_operator(), SpiConfig{}).g_max - 0.125) < 1e-6);
    }
    SUBCASE("indefinite operator gets shifted and unshifted") {
        const auto L = MultipartiteOperator(kron(pauli(Pauli::Z), pauli(Pauli::Z)), SubsystemDims(std::vector<int>{2, 2}));
        const auto b = max_separability_eigenvalue(L, SpiConfig{});
        CHECK(b.shift == doctest::Approx(1.0 + 1e-6).epsilon(1e-14));
        CHECK(std::abs(b.g_max - 1.0) < 1e-8);
    }
    SUBCASE("explicit starts") {
        auto c = cfg_with(StartStrategy::Explicit);
        c.explicit_starts = {ProductState::basis(SubsystemDims(std::vector<int>{2, 2}), std::vector<int>{0, 0})};
        const auto b = max_separability_eigenvalue(swap_operator(2), c);
        CHECK(b.per_start.size() == 1);
        CHECK(b.g_max == doctest::Approx(1.0));
    }
}

TEST_CASE("property: g_max is the max over starts, lowest index on ties") {
    const auto L = swap_operator(2);
    const auto b = max_separability_eigenvalue(L, SpiConfig{});
    double best = -1.0;
    std::size_t first = 0;
    for (const auto& r : b.per_start)
        if (r.converged && r.g > best) best = r.g, first = r.start_index;
    CHECK(b.g_max == best);
    CHECK(b.per_start[first].g == b.g_max);
    CHECK(std::abs(expectation(L, b.argmax) - b.g_max) < 1e-10);
    for (const auto& r : b.per_start) CHECK(r.g <= b.g_max);
}

TEST_CASE("property: shift invariance of the argmax") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto& dims = kDimsCorpus[seed % kDimsCorpus.size()];
        const auto L = random_operator({SubsystemDims(dims), 6000 + seed});
        const double mu = 2.5, nu = 0.7;
        const Matrix shifted = mu * L.matrix() + nu * Matrix::Identity(L.matrix().rows(), L.matrix().cols());
        const auto a = max_separability_eigenvalue(L, SpiConfig{});
        const auto b = max_separability_eigenvalue(MultipartiteOperator(shifted, L.dims()), SpiConfig{});
        CHECK(std::abs(b.g_max - (mu * a.g_max + nu)) < 1e-8);
        for (std::size_t j = 0; j < dims.size(); ++j)
            CHECK(std::abs(std::abs(a.argmax.factor(j).dot(b.argmax.factor(j))) - 1.0) < 1e-8);
    }
}

TEST_CASE("property: results are bitwise independent of the thread count") {
    const auto L = random_operator({SubsystemDims(std::vector<int>{2, 2, 2}), 77});
    for (auto s : {StartStrategy::OperatorBasis, StartStrategy::EigenvectorProjection}) {
        const auto one = max_separability_eigenvalue(L, cfg_with(s, 1));
        const auto four = max_separability_eigenvalue(L, cfg_with(s, 4));
        CHECK(one.g_max == four.g_max);
        REQUIRE(one.per_start.size() == four.per_start.size());
        for (std::size_t i = 0; i < one.per_start.size(); ++i) {
            CHECK(one.per_start[i].g == four.per_start[i].g);
            CHECK(one.per_start[i].g_trace == four.per_start[i].g_trace);
        }
        for (std::size_t j = 0; j < 3; ++j) CHECK(one.argmax.factor(j) == four.argmax.factor(j));
    }
}

TEST_CASE("random_product_state is seeded") {
    const SubsystemDims d({3, 2});
    const auto a = random_product_state(d, 5), b = random_product_state(d, 5), c = random_product_state(d, 6);
    CHECK(a.factor(0) == b.factor(0));
    CHECK(a.factor(0) != c.factor(0));
}
