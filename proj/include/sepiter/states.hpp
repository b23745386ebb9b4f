#pragma once

#include <cstdint>

#include "sepiter/tensor_core.hpp"

namespace sepiter {

/// Hermitian, unit-trace, positive-semidefinite operator.
class DensityOperator {
  public:
    /// Throws StructuralError unless Hermitian within 1e-12, trace 1 within
    /// 1e-10 and minimum eigenvalue >= -1e-10.
    DensityOperator(Matrix matrix, SubsystemDims dims);

    [[nodiscard]] const Matrix& matrix() const { return matrix_; }
    [[nodiscard]] const SubsystemDims& dims() const { return dims_; }
    [[nodiscard]] MultipartiteOperator as_operator() const { return MultipartiteOperator(matrix_, dims_); }

  private:
    Matrix matrix_;
    SubsystemDims dims_;
};

/// tr(L rho) for matching dims.
double trace_product(const Matrix& a, const Matrix& b);

enum class Pauli { Id, X, Y, Z };

/// Standard Pauli matrices, sigma_y = [[0,-i],[i,0]].
Matrix pauli(Pauli kind);
Matrix kron_power(const Matrix& m, int n);

/// 2*1 - V on d x d with V the swap of the two factors.
MultipartiteOperator swap_operator(int d);
/// The bare swap V.
Matrix swap_matrix(int d);

/// (2|Psi><Psi| + alpha sigma_+ + (5 - alpha) sigma_-) / 7 on 3 x 3;
/// alpha in [0, 5], DomainError otherwise.
DensityOperator horodecki_state(double alpha);

/// (1 + sigma_x^{⊗4} + sigma_y^{⊗4} + sigma_z^{⊗4}) / 16
DensityOperator smolin_state();

struct RandomOperatorSpec {
    SubsystemDims dims;
    std::uint64_t seed = 0;
};

/// (1 + M M^dagger) / tr(1 + M M^dagger) for a given M.
MultipartiteOperator normalized_gram_operator(const Matrix& m, const SubsystemDims& dims);

/// Gaussian M: real then imaginary part of each entry in row-major order,
/// drawn from Rng (version 1) seeded with spec.seed.
MultipartiteOperator random_operator(const RandomOperatorSpec& spec);

}  // namespace sepiter
