#pragma once

// Separability power iteration (SPI).
//
// One SPI cycle maps a product state |a> to the product state with maximal
// overlap with |Psi> = L|a>. That argmax is found recursively: the
// (N-1)-party problem for tr_N |Psi><Psi| is solved first (forward step),
// then the last factor is read off as <a_1,...,a_{N-1},.|Psi> (backward
// step). For N = 1 a cycle is a single power-iteration step.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sepiter/tensor_core.hpp"

namespace sepiter {

/// Smallest eigenvalue enforced by ensure_positive.
inline constexpr double kPositivityFloor = 1e-6;

enum class StartStrategy { OperatorBasis, EigenvectorProjection, Explicit };

const char* to_string(StartStrategy s);
StartStrategy parse_start_strategy(std::string_view text);

struct SpiConfig {
    double epsilon = 1e-8;        ///< N-orthogonality residual threshold
    int max_cycles = 10000;       ///< per recursion level
    double pi_epsilon = 1e-10;    ///< power-iteration residual threshold
    int pi_max_iters = 100000;
    StartStrategy start_strategy = StartStrategy::OperatorBasis;
    std::vector<ProductState> explicit_starts;
    std::uint64_t seed = 0;
    /// Identity multiple added to the normalized forward-step operator.
    double inner_shift = 1e-2;
    /// Worker threads for multi-start solves; results do not depend on it.
    int threads = 1;

    /// Throws DomainError on non-positive thresholds or budgets.
    void validate() const;
};

struct SpiResult {
    double g = 0.0;
    ProductState state;
    double residual = 0.0;
    int cycles = 0;
    /// g before the first cycle, then after every cycle.
    std::vector<double> g_trace;
    std::size_t start_index = 0;
    bool converged = false;
    int degenerate_restarts = 0;
};

struct WitnessBound {
    double g_max = 0.0;
    ProductState argmax;
    std::vector<SpiResult> per_start;
    /// Identity shift applied by ensure_positive; already subtracted from all g.
    double shift = 0.0;
};

struct PositiveShift {
    MultipartiteOperator op;
    double shift = 0.0;
};

struct PowerIterationResult {
    double eigenvalue = 0.0;
    Vector eigenvector;
    int iterations = 0;
    bool converged = false;
};

/// Raised by spi_cycle when the backward projection vanishes.
class DegenerateProjection : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// No starting vector reached the residual threshold.
class NoConvergenceError : public std::runtime_error {
  public:
    NoConvergenceError(const std::string& what, SpiResult best)
        : std::runtime_error(what), best_(std::make_shared<SpiResult>(std::move(best))) {}
    [[nodiscard]] const SpiResult& best() const { return *best_; }

  private:
    std::shared_ptr<SpiResult> best_;
};

/// Positive operator as seen by the solver: either a dense matrix plus a
/// multiple of the identity, or F F^dagger + c 1 with a tall factor F.
/// The dense form does not own its matrix.
class OperatorView {
  public:
    static OperatorView dense(const Matrix& matrix, SubsystemDims dims, double shift = 0.0);
    static OperatorView low_rank(Matrix factor, SubsystemDims dims, double shift);
    static OperatorView of(const MultipartiteOperator& op) { return dense(op.matrix(), op.dims()); }

    [[nodiscard]] Vector apply(const Vector& v) const;
    [[nodiscard]] const SubsystemDims& dims() const { return dims_; }

  private:
    OperatorView(const Matrix* dense, Matrix factor, SubsystemDims dims, double shift);

    const Matrix* dense_ = nullptr;
    Matrix factor_;
    SubsystemDims dims_;
    double shift_ = 0.0;
};

PositiveShift ensure_positive(const MultipartiteOperator& op);

/// z <- L z / |L z| until |L z - <z|L|z> z| < pi_epsilon or pi_max_iters.
PowerIterationResult power_iteration(const MultipartiteOperator& op, const Vector& start, const SpiConfig& cfg);
PowerIterationResult power_iteration(const OperatorView& op, const Vector& start, const SpiConfig& cfg);

ProductState spi_cycle(const MultipartiteOperator& op, const ProductState& current, const SpiConfig& cfg);
ProductState spi_cycle(const OperatorView& op, const ProductState& current, const SpiConfig& cfg);

/// max_j max_x |<a_1..x..a_N|(L - g)|a>| over computational basis states x.
double n_orthogonality_residual(const MultipartiteOperator& op, const ProductState& state, double g);
double n_orthogonality_residual(const OperatorView& op, const ProductState& state, double g);

/// max_j of the max-norm of (L_j - g) a_j with L_j the reduced operator.
double first_form_residual(const MultipartiteOperator& op, const ProductState& state, double g);

SpiResult spi_solve(const MultipartiteOperator& op, const ProductState& start, const SpiConfig& cfg);
SpiResult spi_solve(const OperatorView& op, const ProductState& start, const SpiConfig& cfg);

/// Number of product states in the operator-basis start set, prod_j d_j^2.
std::uint64_t operator_basis_count(const SubsystemDims& dims);

/// index-th operator-basis product state in lexicographic order, subsystem 1
/// slowest. Per subsystem: |k>, then (|k>+|l>)/sqrt2, then (|k>+i|l>)/sqrt2
/// for k < l.
ProductState operator_basis_state(const SubsystemDims& dims, std::uint64_t index);

/// Product state with i.i.d. complex Gaussian factors, normalized.
ProductState random_product_state(const SubsystemDims& dims, std::uint64_t seed);

std::vector<ProductState> starting_vectors(const MultipartiteOperator& op, StartStrategy strategy,
                                           const SpiConfig& cfg);

/// Multi-start maximization of <a|L|a> over product states for any
/// Hermitian L. Throws NoConvergenceError if no start converged.
WitnessBound max_separability_eigenvalue(const MultipartiteOperator& op, const SpiConfig& cfg);

}  // namespace sepiter
