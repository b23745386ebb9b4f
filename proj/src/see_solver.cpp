#include "sepiter/see_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include <Eigen/Cholesky>
#include <lapacke.h>

#include "sepiter/random.hpp"

namespace sepiter {

const char* to_string(StartStrategy s) {
    switch (s) {
        case StartStrategy::OperatorBasis: return "basis";
        case StartStrategy::EigenvectorProjection: return "eigproj";
        case StartStrategy::Explicit: return "explicit";
    }
    return "?";
}

StartStrategy parse_start_strategy(std::string_view text) {
    if (text == "basis") return StartStrategy::OperatorBasis;
    if (text == "eigproj") return StartStrategy::EigenvectorProjection;
    if (text == "explicit") return StartStrategy::Explicit;
    throw DomainError("unknown start strategy '" + std::string(text) + "' (expected basis or eigproj)");
}

void SpiConfig::validate() const {
    if (!(epsilon > 0.0)) throw DomainError("SpiConfig: epsilon must be positive");
    if (!(pi_epsilon > 0.0)) throw DomainError("SpiConfig: pi_epsilon must be positive");
    if (max_cycles < 1) throw DomainError("SpiConfig: max_cycles must be >= 1");
    if (pi_max_iters < 1) throw DomainError("SpiConfig: pi_max_iters must be >= 1");
    if (!(inner_shift > 0.0)) throw DomainError("SpiConfig: inner_shift must be positive");
    if (threads < 1) throw DomainError("SpiConfig: threads must be >= 1");
    if (start_strategy == StartStrategy::Explicit && explicit_starts.empty())
        throw DomainError("SpiConfig: explicit start strategy without starting states");
}

OperatorView::OperatorView(const Matrix* dense, Matrix factor, SubsystemDims dims, double shift)
    : dense_(dense), factor_(std::move(factor)), dims_(std::move(dims)), shift_(shift) {}

OperatorView OperatorView::dense(const Matrix& matrix, SubsystemDims dims, double shift) {
    if (matrix.rows() != dims.total() || matrix.cols() != dims.total())
        throw StructuralError("OperatorView: matrix does not match dims " + dims.to_string());
    return OperatorView(&matrix, Matrix(), std::move(dims), shift);
}

OperatorView OperatorView::low_rank(Matrix factor, SubsystemDims dims, double shift) {
    if (factor.rows() != dims.total()) throw StructuralError("OperatorView: factor does not match dims");
    return OperatorView(nullptr, std::move(factor), std::move(dims), shift);
}

Vector OperatorView::apply(const Vector& v) const {
    Vector out;
    if (dense_ != nullptr) {
        out.noalias() = *dense_ * v;
    } else {
        const Vector coeff = factor_.adjoint() * v;
        out.noalias() = factor_ * coeff;
    }
    if (shift_ != 0.0) out += shift_ * v;
    return out;
}

namespace {

// Extreme eigenvalues, and optionally the top eigenvector, from a single
// Householder tridiagonalization.
struct ExtremeEigen {
    double lowest = 0.0;
    double highest = 0.0;
    Vector top;
};

void check_lapack(lapack_int info, const char* what) {
    if (info != 0) throw std::runtime_error(std::string(what) + " failed with info " + std::to_string(info));
}

ExtremeEigen extreme_eigen(const Matrix& m, bool want_vector) {
    const lapack_int n = static_cast<lapack_int>(m.rows());
    // Read column-major, the row-major buffer holds conj(m): same spectrum,
    // conjugated eigenvectors.
    Matrix a = m;
    auto* ap = reinterpret_cast<lapack_complex_double*>(a.data());
    std::vector<double> d(n), e(std::max<lapack_int>(n - 1, 1));
    std::vector<lapack_complex_double> tau(std::max<lapack_int>(n - 1, 1));
    check_lapack(LAPACKE_zhetrd(LAPACK_COL_MAJOR, 'L', n, ap, n, d.data(), e.data(), tau.data()), "zhetrd");

    auto eigenvalue_at = [&](lapack_int index, std::vector<lapack_int>& block, std::vector<lapack_int>& split) {
        lapack_int found = 0, nsplit = 0;
        std::vector<double> w(n);
        block.assign(n, 0);
        split.assign(n, 0);
        check_lapack(LAPACKE_dstebz('I', 'B', n, 0.0, 0.0, index, index, 0.0, d.data(), e.data(), &found, &nsplit,
                                    w.data(), block.data(), split.data()),
                     "dstebz");
        return w[0];
    };
    std::vector<lapack_int> block, split;
    ExtremeEigen out;
    out.lowest = eigenvalue_at(1, block, split);
    out.highest = eigenvalue_at(n, block, split);
    if (!want_vector) return out;

    Vector z(n);
    lapack_int fail = 0;
    // LAPACKE scans w over n entries
    std::vector<double> w(n, out.highest);
    check_lapack(LAPACKE_zstein(LAPACK_COL_MAJOR, n, d.data(), e.data(), 1, w.data(), block.data(), split.data(),
                                reinterpret_cast<lapack_complex_double*>(z.data()), n, &fail),
                 "zstein");
    check_lapack(LAPACKE_zunmtr(LAPACK_COL_MAJOR, 'L', 'L', 'N', n, 1, ap, n, tau.data(),
                                reinterpret_cast<lapack_complex_double*>(z.data()), n),
                 "zunmtr");
    out.top = z.conjugate();
    return out;
}

double lowest_eigenvalue(const Matrix& m) { return extreme_eigen(m, false).lowest; }

Vector dominant_eigenvector(const Matrix& m) { return extreme_eigen(m, true).top; }

/// max(0, kPositivityFloor - lambda_min). A Cholesky factorization of
/// m - floor*1 settles the common positive case without an eigensolve.
double positivity_shift(const Matrix& m) {
    Matrix probe = m;
    probe.diagonal().array() -= kPositivityFloor;
    if (Eigen::LLT<Matrix>(probe).info() == Eigen::Success) return 0.0;
    return std::max(0.0, kPositivityFloor - lowest_eigenvalue(m));
}

}  // namespace

PositiveShift ensure_positive(const MultipartiteOperator& op) {
    const double shift = positivity_shift(op.matrix());
    if (shift == 0.0) return {op, 0.0};
    Matrix m = op.matrix();
    m.diagonal().array() += shift;
    return {MultipartiteOperator(std::move(m), op.dims()), shift};
}

PowerIterationResult power_iteration(const OperatorView& op, const Vector& start, const SpiConfig& cfg) {
    if (op.dims().parties() != 1) throw StructuralError("power_iteration: operator must be single-party");
    if (start.size() != op.dims().total()) throw StructuralError("power_iteration: start has wrong length");
    const double n0 = start.norm();
    if (n0 == 0.0) throw StructuralError("power_iteration: zero start vector");

    PowerIterationResult r;
    Vector z = start / n0;
    for (int it = 0;; ++it) {
        Vector y = op.apply(z);
        const double rq = z.dot(y).real();
        r.eigenvalue = rq;
        r.iterations = it;
        if ((y - rq * z).norm() < cfg.pi_epsilon) {
            r.converged = true;
            break;
        }
        if (it >= cfg.pi_max_iters) break;
        z = y / y.norm();
    }
    r.eigenvector = std::move(z);
    return r;
}

PowerIterationResult power_iteration(const MultipartiteOperator& op, const Vector& start, const SpiConfig& cfg) {
    return power_iteration(OperatorView::of(op), start, cfg);
}

namespace {

Vector flat(const ProductState& s) { return flatten(s).entries; }

double residual_from_chi(const Vector& chi, const ProductState& state) {
    double worst = 0.0;
    for (std::size_t j = 0; j < state.parties(); ++j)
        worst = std::max(worst, contract_except(chi, state, j).cwiseAbs().maxCoeff());
    return worst;
}

void check_sandwich([[maybe_unused]] const OperatorView& op, [[maybe_unused]] const ProductState& old_state,
                    [[maybe_unused]] const Vector& psi, [[maybe_unused]] const ProductState& new_state) {
#ifndef NDEBUG
    const Vector old_flat = flat(old_state);
    const Vector new_flat = flat(new_state);
    const double g_old = old_flat.dot(psi).real();
    const double cross = std::abs(new_flat.dot(psi));
    const double g_new = new_flat.dot(op.apply(new_flat)).real();
    const double slack = 1e-10 * std::max(1.0, g_new);
    if (!(g_old <= cross + slack && cross <= g_new + slack))
        throw std::logic_error("spi_cycle: monotony sandwich violated");
#endif
}

// Inner solves never aim below this; deeper levels would otherwise compound
// the tolerance past what double precision can reach.
constexpr double kInnerToleranceFloor = 1e-13;
// Inner tolerance relative to the outer residual in spi_solve.
constexpr double kInnerToleranceRatio = 0.1;

/// One cycle with the forward-step problem solved to `inner_epsilon` (for the
/// unit-norm Psi).
ProductState cycle_from_psi(const OperatorView& op, const ProductState& current, const Vector& psi,
                            const SpiConfig& cfg, double inner_epsilon) {
    const auto& dims = op.dims();
    const double psi_norm = psi.norm();
    if (!(psi_norm > 0.0)) throw DegenerateProjection("spi_cycle: L|a> vanished");
    if (dims.parties() == 1) {
        ProductState next({psi / psi_norm}, dims);
        return next.canonical_phase();
    }

    // forward step: tr_N |Psi><Psi| for unit |Psi>, kept in factored form
    const Eigen::Index last = dims[dims.parties() - 1];
    const Eigen::Index rest = dims.total() / last;
    Matrix factor = Eigen::Map<const Matrix>(psi.data(), rest, last) / psi_norm;
    const OperatorView reduced = OperatorView::low_rank(std::move(factor), dims.drop_last(), cfg.inner_shift);
    // The inner problem is built from the unit vector Psi/|Psi|; its error
    // reaches the outer residual multiplied by |Psi|.
    SpiConfig inner_cfg = cfg;
    inner_cfg.epsilon = inner_epsilon / std::max(1.0, psi_norm);
    inner_cfg.pi_epsilon = inner_cfg.epsilon;
    const SpiResult inner = spi_solve(reduced, current.prefix(), inner_cfg);

    // backward step
    const Vector w = project_out_component(ComplexVector(psi, dims), inner.state);
    const double w_norm = w.norm();
    if (!(w_norm > 1e-14 * psi_norm)) throw DegenerateProjection("spi_cycle: backward projection vanished");
    ProductState next = inner.state.extended(w / w_norm).canonical_phase();
    check_sandwich(op, current, psi, next);
    return next;
}

SpiResult solve_single_party(const OperatorView& op, const ProductState& start, const SpiConfig& cfg) {
    SpiResult r;
    Vector z = start.factor(0);
    for (int it = 0;; ++it) {
        Vector y = op.apply(z);
        const double rq = z.dot(y).real();
        r.g_trace.push_back(rq);
        r.g = rq;
        r.cycles = it;
        const Vector chi = y - rq * z;
        if (chi.norm() < cfg.pi_epsilon) {
            r.converged = true;
            r.residual = chi.cwiseAbs().maxCoeff();
            break;
        }
        if (it >= cfg.pi_max_iters) {
            r.residual = chi.cwiseAbs().maxCoeff();
            break;
        }
        z = y / y.norm();
    }
    r.state = ProductState({z}, op.dims()).canonical_phase();
    return r;
}

}  // namespace

ProductState spi_cycle(const OperatorView& op, const ProductState& current, const SpiConfig& cfg) {
    if (!(op.dims() == current.dims())) throw StructuralError("spi_cycle: dims mismatch");
    return cycle_from_psi(op, current, op.apply(flat(current)), cfg, std::min(cfg.epsilon, cfg.pi_epsilon));
}

ProductState spi_cycle(const MultipartiteOperator& op, const ProductState& current, const SpiConfig& cfg) {
    return spi_cycle(OperatorView::of(op), current, cfg);
}

double n_orthogonality_residual(const OperatorView& op, const ProductState& state, double g) {
    if (!(op.dims() == state.dims())) throw StructuralError("n_orthogonality_residual: dims mismatch");
    const Vector a = flat(state);
    return residual_from_chi(op.apply(a) - g * a, state);
}

double n_orthogonality_residual(const MultipartiteOperator& op, const ProductState& state, double g) {
    return n_orthogonality_residual(OperatorView::of(op), state, g);
}

double first_form_residual(const MultipartiteOperator& op, const ProductState& state, double g) {
    double worst = 0.0;
    for (std::size_t j = 0; j < state.parties(); ++j) {
        const Matrix reduced = reduced_operator(op, state, j);
        const Vector r = reduced * state.factor(j) - g * state.factor(j);
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
}

SpiResult spi_solve(const OperatorView& op, const ProductState& start, const SpiConfig& cfg) {
    if (!(op.dims() == start.dims())) throw StructuralError("spi_solve: dims mismatch");
    if (op.dims().parties() == 1) return solve_single_party(op, start, cfg);

    const std::uint64_t basis_count = operator_basis_count(op.dims());
    SpiResult r;
    ProductState state = start;
    for (;;) {
        const Vector a = flat(state);
        const Vector psi = op.apply(a);
        const double g = a.dot(psi).real();
        r.g_trace.push_back(g);
        r.g = g;
        r.residual = residual_from_chi(psi - g * a, state);
        if (r.residual < cfg.epsilon) {
            r.converged = true;
            break;
        }
        if (r.cycles >= cfg.max_cycles) break;
        try {
            // loose while far from the fixed point, tighter as the residual drops
            const double inner_eps = std::max(kInnerToleranceFloor, kInnerToleranceRatio * r.residual);
            state = cycle_from_psi(op, state, psi, cfg, inner_eps);
        } catch (const DegenerateProjection&) {
            // restart from the next operator-basis state
            state = operator_basis_state(op.dims(), static_cast<std::uint64_t>(r.degenerate_restarts) % basis_count);
            ++r.degenerate_restarts;
            r.g_trace.clear();
        }
        ++r.cycles;
    }
    r.state = std::move(state);
    return r;
}

SpiResult spi_solve(const MultipartiteOperator& op, const ProductState& start, const SpiConfig& cfg) {
    return spi_solve(OperatorView::of(op), start, cfg);
}

std::uint64_t operator_basis_count(const SubsystemDims& dims) {
    std::uint64_t n = 1;
    for (int d : dims.values()) n *= static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(d);
    return n;
}

namespace {

Vector single_party_basis_state(int d, std::uint64_t k) {
    Vector v = Vector::Zero(d);
    if (k < static_cast<std::uint64_t>(d)) {
        v[static_cast<Eigen::Index>(k)] = 1.0;
        return v;
    }
    k -= d;
    const std::uint64_t pairs = static_cast<std::uint64_t>(d) * (d - 1) / 2;
    const bool imaginary = k >= pairs;
    if (imaginary) k -= pairs;
    int first = 0;
    int second = 1;
    for (std::uint64_t i = 0; i < k; ++i) {
        if (++second == d) {
            ++first;
            second = first + 1;
        }
    }
    const double s = 1.0 / std::sqrt(2.0);
    v[first] = s;
    v[second] = imaginary ? Complex(0.0, s) : Complex(s, 0.0);
    return v;
}

}  // namespace

ProductState operator_basis_state(const SubsystemDims& dims, std::uint64_t index) {
    if (index >= operator_basis_count(dims)) throw StructuralError("operator_basis_state: index out of range");
    std::vector<Vector> factors(dims.parties());
    for (std::size_t j = dims.parties(); j-- > 0;) {
        const std::uint64_t dd = static_cast<std::uint64_t>(dims[j]) * dims[j];
        factors[j] = single_party_basis_state(dims[j], index % dd);
        index /= dd;
    }
    return ProductState(std::move(factors), dims);
}

ProductState random_product_state(const SubsystemDims& dims, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vector> factors;
    for (int d : dims.values()) {
        Vector f(d);
        for (int k = 0; k < d; ++k) {
            const double re = rng.normal();
            const double im = rng.normal();
            f[k] = Complex(re, im);
        }
        factors.push_back(std::move(f));
    }
    return ProductState::normalized(std::move(factors), dims);
}

namespace {

constexpr std::uint64_t kMaxMaterializedStarts = 1u << 22;

ProductState eigenvector_projection_start(const Vector& dominant, const SubsystemDims& dims, const SpiConfig& cfg) {
    Matrix factor = dominant;
    // |v><v| + delta: positive definite with the projector's product argmax
    const OperatorView projector = OperatorView::low_rank(std::move(factor), dims, kPositivityFloor);
    return spi_solve(projector, random_product_state(dims, cfg.seed), cfg).state;
}

}  // namespace

std::vector<ProductState> starting_vectors(const MultipartiteOperator& op, StartStrategy strategy,
                                           const SpiConfig& cfg) {
    switch (strategy) {
        case StartStrategy::OperatorBasis: {
            const std::uint64_t n = operator_basis_count(op.dims());
            if (n > kMaxMaterializedStarts) throw DomainError("starting_vectors: operator basis too large");
            std::vector<ProductState> out;
            out.reserve(n);
            for (std::uint64_t i = 0; i < n; ++i) out.push_back(operator_basis_state(op.dims(), i));
            return out;
        }
        case StartStrategy::EigenvectorProjection:
            return {eigenvector_projection_start(dominant_eigenvector(op.matrix()), op.dims(), cfg)};
        case StartStrategy::Explicit:
            for (const auto& s : cfg.explicit_starts)
                if (!(s.dims() == op.dims())) throw StructuralError("starting_vectors: explicit start has wrong dims");
            return cfg.explicit_starts;
    }
    return {};
}

WitnessBound max_separability_eigenvalue(const MultipartiteOperator& op, const SpiConfig& cfg) {
    cfg.validate();
    const auto& dims = op.dims();

    // eigenvector projection needs a decomposition anyway; it also gives the shift
    const bool projection = cfg.start_strategy == StartStrategy::EigenvectorProjection;
    const ExtremeEigen spectrum = projection ? extreme_eigen(op.matrix(), true) : ExtremeEigen{};
    const double shift = projection ? std::max(0.0, kPositivityFloor - spectrum.lowest) : positivity_shift(op.matrix());
    const OperatorView view = OperatorView::dense(op.matrix(), dims, shift);

    std::vector<ProductState> starts;
    std::uint64_t count = 0;
    switch (cfg.start_strategy) {
        case StartStrategy::OperatorBasis: count = operator_basis_count(dims); break;
        case StartStrategy::EigenvectorProjection:
            starts.push_back(eigenvector_projection_start(spectrum.top, dims, cfg));
            count = 1;
            break;
        case StartStrategy::Explicit:
            starts = starting_vectors(op, StartStrategy::Explicit, cfg);
            count = starts.size();
            break;
    }
    auto start_at = [&](std::uint64_t i) {
        return starts.empty() ? operator_basis_state(dims, i) : starts[static_cast<std::size_t>(i)];
    };

    std::vector<std::optional<SpiResult>> results(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (std::uint64_t i = next++; i < count; i = next++) {
            try {
                SpiResult r = spi_solve(view, start_at(i), cfg);
                r.start_index = static_cast<std::size_t>(i);
                r.g -= shift;
                for (double& g : r.g_trace) g -= shift;
                results[i] = std::move(r);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int nthreads = static_cast<int>(std::min<std::uint64_t>(cfg.threads, count));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    WitnessBound bound;
    bound.shift = shift;
    bound.per_start.reserve(count);
    const SpiResult* best = nullptr;
    const SpiResult* best_any = nullptr;
    for (auto& r : results) bound.per_start.push_back(std::move(*r));
    for (const auto& r : bound.per_start) {
        if (best_any == nullptr || r.g > best_any->g) best_any = &r;
        if (r.converged && (best == nullptr || r.g > best->g)) best = &r;
    }
    if (best == nullptr) throw NoConvergenceError("max_separability_eigenvalue: no starting vector converged", *best_any);
    bound.g_max = best->g;
    bound.argmax = best->state;
    return bound;
}

}  // namespace sepiter
