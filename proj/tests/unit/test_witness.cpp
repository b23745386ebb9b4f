#include <cmath>

#include "doctest.h"
#include "sepiter/random.hpp"
#include "sepiter/witness.hpp"

using namespace sepiter;

namespace {

Matrix singlet_projector() {
    Vector psi = Vector::Zero(4);
    psi[1] = 1.0 / std::sqrt(2.0);
    psi[2] = -1.0 / std::sqrt(2.0);
    return psi * psi.adjoint();
}

Matrix bell_projector() {
    Vector phi = Vector::Zero(4);
    phi[0] = phi[3] = 1.0 / std::sqrt(2.0);
    return phi * phi.adjoint();
}

/// sum_i p_i |a_i><a_i| with random product states and Dirichlet-like weights.
DensityOperator random_separable_mixture(const SubsystemDims& dims, std::uint64_t seed, int terms) {
    Rng rng(seed);
    Matrix rho = Matrix::Zero(dims.total(), dims.total());
    std::vector<double> w(terms);
    double total = 0.0;
    for (double& x : w) total += (x = -std::log(1.0 - rng.uniform()));
    for (int i = 0; i < terms; ++i) {
        const Vector a = flatten(random_product_state(dims, derive_seed(seed, i))).entries;
        rho += (w[i] / total) * a * a.adjoint();
    }
    const Matrix herm = 0.5 * (rho + rho.adjoint());
    return DensityOperator(herm / herm.trace().real(), dims);
}

}  // namespace

TEST_CASE("DensityOperator validation") {
    CHECK_THROWS_AS(DensityOperator(Matrix::Identity(2, 2), SubsystemDims(std::vector<int>{2})), StructuralError);
    Matrix neg = Matrix::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityOperator(neg, SubsystemDims(std::vector<int>{2})), StructuralError);
    CHECK_NOTHROW(DensityOperator(Matrix::Identity(2, 2) / 2.0, SubsystemDims(std::vector<int>{2})));
}

TEST_CASE("build_witness examples") {
    CHECK(std::abs(build_witness(swap_operator(2), Partition::finest(2), SpiConfig{}).g_max - 2.0) < 1e-8);
    const auto S = smolin_state().as_operator();
    CHECK(std::abs(build_witness(S, Partition::parse("1|2,3,4"), SpiConfig{}).g_max - 0.125) < 1e-6);
    const auto id = MultipartiteOperator::identity(SubsystemDims(std::vector<int>{2, 3}));
    CHECK(std::abs(build_witness(id, Partition::finest(2), SpiConfig{}).g_max - 1.0) < 1e-12);
}

TEST_CASE("test_state examples") {
    const auto w = build_witness(swap_operator(2), Partition::finest(2), SpiConfig{});
    SUBCASE("singlet is detected") {
        // V|Psi-> = -|Psi->, so tr(L rho) = 2 + 1
        const auto t = test_state(w, DensityOperator(singlet_projector(), SubsystemDims(std::vector<int>{2, 2})));
        CHECK(t.trace == doctest::Approx(3.0).epsilon(1e-14));
        CHECK(t.value == doctest::Approx(-1.0).epsilon(1e-8));
        CHECK(t.entangled);
    }
    SUBCASE("symmetric Bell state is not") {
        // V|Phi+> = |Phi+>, so tr(L rho) = 1 < g_max
        const auto t = test_state(w, DensityOperator(bell_projector(), SubsystemDims(std::vector<int>{2, 2})));
        CHECK(t.trace == doctest::Approx(1.0).epsilon(1e-14));
        CHECK_FALSE(t.entangled);
    }
    SUBCASE("maximally mixed state is not") {
        const auto t = test_state(w, DensityOperator(Matrix::Identity(4, 4) / 4.0, SubsystemDims(std::vector<int>{2, 2})));
        CHECK(t.trace == doctest::Approx(1.5).epsilon(1e-14));
        CHECK(t.value == doctest::Approx(0.5).epsilon(1e-8));
        CHECK_FALSE(t.entangled);
        CHECK_FALSE(t.inconclusive);
    }
    SUBCASE("Smolin against its own finest witness") {
        const auto S = smolin_state();
        const auto ws = build_witness(S.as_operator(), Partition::finest(4), SpiConfig{});
        const auto t = test_state(ws, S);
        CHECK(std::abs(t.trace - 0.25) < 1e-12);
        CHECK(t.entangled);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(test_state(w, DensityOperator(Matrix::Identity(6, 6) / 6.0, SubsystemDims(std::vector<int>{2, 3}))),
                        StructuralError);
    }
}

TEST_CASE("witness is non-negative on its own separability eigenvectors") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto L = random_operator({SubsystemDims(std::vector<int>{2, 3}), 70 + seed});
        const auto w = build_witness(L, Partition::finest(2), SpiConfig{});
        for (std::size_t i = 0; i < w.eigenvectors.size(); ++i)
            if (w.per_start[i].converged) CHECK(w.g_max - expectation(w.grouped, w.eigenvectors[i]) >= -1e-9);
    }
}

TEST_CASE("property: separable mixtures are never flagged") {
    const std::vector<std::vector<int>> corpus = {{2, 2}, {2, 3}, {3, 3}, {2, 2, 2}};
    for (std::size_t c = 0; c < corpus.size(); ++c) {
        const SubsystemDims dims(corpus[c]);
        const auto L = random_operator({dims, 123 + c});
        const auto w = build_witness(L, Partition::finest(dims.parties()), SpiConfig{});
        int flagged = 0;
        for (std::uint64_t k = 0; k < 200; ++k) {
            const auto rho = random_separable_mixture(dims, derive_seed(c, k), 1 + static_cast<int>(k % 6));
            if (test_state(w, rho).entangled) ++flagged;
        }
        CHECK(flagged == 0);
    }
}

TEST_CASE("property: the decision is invariant under L -> L + nu") {
    const SubsystemDims dims({2, 2});
    const auto L = MultipartiteOperator(Matrix::Identity(4, 4) + 2.0 * bell_projector(), dims);
    const auto L2 = MultipartiteOperator(L.matrix() + 0.8 * Matrix::Identity(4, 4), dims);
    const auto w1 = build_witness(L, Partition::finest(2), SpiConfig{});
    const auto w2 = build_witness(L2, Partition::finest(2), SpiConfig{});
    for (std::uint64_t k = 0; k < 20; ++k) {
        const double p = 0.05 * static_cast<double>(k);
        const DensityOperator rho(p * bell_projector() + (1 - p) * Matrix::Identity(4, 4) / 4.0, dims);
        const auto a = test_state(w1, rho), b = test_state(w2, rho);
        CHECK(std::abs(a.value - b.value) < 1e-10);
        CHECK(a.entangled == b.entangled);
    }
}

TEST_CASE("partition_scan on the Smolin state") {
    const auto S = smolin_state();
    const std::vector<Partition> parts = {Partition::parse("1,2|3,4"), Partition::parse("1|2,3,4")};
    const auto scan = partition_scan(S.as_operator(), S, parts, SpiConfig{});
    REQUIRE(scan.rows.size() == 2);
    CHECK(std::abs(scan.rows[0].g_max - 0.25) < 1e-6);
    CHECK_FALSE(scan.rows[0].entangled);
    CHECK(scan.rows[1].entangled);
    CHECK(std::abs(scan.k_bounds.at(2) - 0.25) < 1e-6);

    const auto zero = flatten(ProductState::basis(S.dims(), std::vector<int>{0, 0, 0, 0})).entries;
    const DensityOperator product(zero * zero.adjoint(), S.dims());
    for (const auto& row : partition_scan(S.as_operator(), product, parts, SpiConfig{}).rows)
        CHECK_FALSE(row.entangled);

    // rows keep input order and values under fan-out
    SpiConfig threaded;
    threaded.threads = 3;
    const std::vector<Partition> more = {Partition::parse("1|2|3|4"), Partition::parse("1,2|3,4"),
                                         Partition::parse("1,3|2,4"), Partition::parse("1|2,3,4")};
    const auto one = partition_scan(S.as_operator(), S, more, SpiConfig{});
    const auto three = partition_scan(S.as_operator(), S, more, threaded);
    for (std::size_t i = 0; i < more.size(); ++i) {
        CHECK(three.rows[i].partition == more[i]);
        CHECK(three.rows[i].g_max == one.rows[i].g_max);
    }
}

TEST_CASE("from_observables") {
    const SubsystemDims dims({2, 2});
    const auto zz = MultipartiteOperator(kron(pauli(Pauli::Z), pauli(Pauli::Z)), dims);
    const auto xx = MultipartiteOperator(kron(pauli(Pauli::X), pauli(Pauli::X)), dims);
    const auto yy = MultipartiteOperator(kron(pauli(Pauli::Y), pauli(Pauli::Y)), dims);
    SUBCASE("single observable") {
        const auto ow = from_observables({zz}, {1.0});
        CHECK(ow.nu == doctest::Approx(1.0 + 1e-6).epsilon(1e-14));
    }
    SUBCASE("Bell-diagonal family detects a Bell state") {
        // XX - YY + ZZ has |Phi+> as its +3 eigenvector; product states reach at most 1.
        const auto ow = from_observables({xx, yy, zz}, {1.0, -1.0, 1.0});
        const auto w = build_witness(ow.L, Partition::finest(2), SpiConfig{});
        CHECK(std::abs(w.g_max - (1.0 + ow.nu)) < 1e-8);
        const auto t = test_state(w, DensityOperator(bell_projector(), dims));
        CHECK(std::abs(t.trace - (3.0 + ow.nu)) < 1e-12);
        CHECK(t.entangled);
    }
    SUBCASE("zero coefficients give a multiple of the identity") {
        const auto ow = from_observables({zz, xx}, {0.0, 0.0});
        const auto w = build_witness(ow.L, Partition::finest(2), SpiConfig{});
        CHECK(std::abs(w.g_max - ow.nu) < 1e-15);
        CHECK_FALSE(test_state(w, DensityOperator(bell_projector(), dims)).entangled);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(from_observables({}, {}), StructuralError);
        CHECK_THROWS_AS(from_observables({zz}, {1.0, 2.0}), StructuralError);
    }
}

TEST_CASE("Horodecki grid at selected alphas") {
    const auto grid = horodecki_grid({1.0, 2.5, 4.5}, uniform_grid(0.25), SpiConfig{});
    CHECK(grid.cells.size() == 3 * 21);
    CHECK(grid.detected[0]);
    CHECK_FALSE(grid.detected[1]);
    CHECK(grid.detected[2]);
}

TEST_CASE("uniform_grid hits the integers exactly") {
    const auto g = uniform_grid(0.1);
    CHECK(g.size() == 51);
    CHECK(g[20] == 2.0);
    CHECK(g[30] == 3.0);
    CHECK(g.back() == 5.0);
}
