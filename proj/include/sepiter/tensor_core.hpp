#pragma once

// Dense multipartite linear algebra on H_1 ⊗ ... ⊗ H_N.
//
// Index convention: subsystem 1 is the slowest-varying index of a flattened
// vector (big-endian), i.e. the basis state |k_1,...,k_N> sits at
//   k_1*(d_2*...*d_N) + k_2*(d_3*...*d_N) + ... + k_N.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sepiter {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kNormTol = 1e-12;

/// Shape mismatch, out-of-range index or otherwise malformed structure.
class StructuralError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Value outside the mathematical domain of an operation (e.g. alpha > 5).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

class SubsystemDims {
  public:
    SubsystemDims() = default;
    explicit SubsystemDims(std::vector<int> dims);

    [[nodiscard]] std::size_t parties() const { return dims_.size(); }
    [[nodiscard]] int operator[](std::size_t j) const { return dims_[j]; }
    [[nodiscard]] Eigen::Index total() const { return total_; }
    [[nodiscard]] std::span<const int> values() const { return dims_; }

    /// Product of the dimensions after subsystem j (the stride of slot j).
    [[nodiscard]] Eigen::Index stride(std::size_t j) const;

    /// Dims of subsystems 1..N-1.
    [[nodiscard]] SubsystemDims drop_last() const;

    [[nodiscard]] std::string to_string() const;

    bool operator==(const SubsystemDims& other) const { return dims_ == other.dims_; }

  private:
    std::vector<int> dims_;
    Eigen::Index total_ = 0;
};

struct ComplexVector {
    ComplexVector(Vector entries, SubsystemDims dims);

    Vector entries;
    SubsystemDims dims;
};

/// Product state |a_1,...,a_N> held as its N unit-norm factors.
class ProductState {
  public:
    /// Empty state with no factors; placeholder only.
    ProductState() = default;

    /// Throws StructuralError unless every factor matches its dimension and has
    /// unit norm within kNormTol.
    ProductState(std::vector<Vector> factors, SubsystemDims dims);

    /// Normalizes each factor first; throws on a zero factor.
    static ProductState normalized(std::vector<Vector> factors, SubsystemDims dims);

    /// |e_{k_1}> ⊗ ... ⊗ |e_{k_N}>
    static ProductState basis(const SubsystemDims& dims, std::span<const int> indices);

    [[nodiscard]] const SubsystemDims& dims() const { return dims_; }
    [[nodiscard]] std::size_t parties() const { return factors_.size(); }
    [[nodiscard]] const Vector& factor(std::size_t j) const { return factors_[j]; }
    [[nodiscard]] const std::vector<Vector>& factors() const { return factors_; }

    /// First N-1 factors.
    [[nodiscard]] ProductState prefix() const;

    /// Appends one factor for a new last subsystem.
    [[nodiscard]] ProductState extended(const Vector& last) const;

    /// Copy with every factor rotated so that its largest-magnitude entry is
    /// real and positive (first such index on near-ties).
    [[nodiscard]] ProductState canonical_phase() const;

  private:
    std::vector<Vector> factors_;
    SubsystemDims dims_;
};

class MultipartiteOperator {
  public:
    /// Rejects non-square, mis-sized or non-Hermitian (> kHermitianTol) input.
    MultipartiteOperator(Matrix matrix, SubsystemDims dims);

    static MultipartiteOperator identity(const SubsystemDims& dims);

    [[nodiscard]] const Matrix& matrix() const { return matrix_; }
    [[nodiscard]] const SubsystemDims& dims() const { return dims_; }

  private:
    Matrix matrix_;
    SubsystemDims dims_;
};

/// max |M - M^dagger|
double hermiticity_defect(const Matrix& m);

/// Kronecker product of the factors in subsystem order.
ComplexVector flatten(const ProductState& state);
Vector kron(const Vector& a, const Vector& b);
Matrix kron(const Matrix& a, const Matrix& b);

ComplexVector apply(const MultipartiteOperator& op, const ComplexVector& v);

/// <a|L|a>; throws StructuralError if the imaginary part of the quadratic
/// form exceeds 1e-10.
double expectation(const MultipartiteOperator& op, const ProductState& state);

/// tr_N |psi><psi| from the rank-1 structure: reshape psi into a
/// (D/d_N) x d_N matrix A and return A A^dagger.
MultipartiteOperator partial_trace_last(const ComplexVector& psi);

/// w[k] = <a_1,...,a_{N-1},k|psi>. The prefix holds N-1 factors.
Vector project_out_component(const ComplexVector& psi, const ProductState& prefix);

/// M[x,y] = <a_1..x..a_N| L |a_1..y..a_N> with x, y in slot j (0-based).
Matrix reduced_operator(const MultipartiteOperator& op, const ProductState& state, std::size_t j);

/// Contracts every slot except j of psi with the corresponding factor of
/// state: out[x] = <a_1..x..a_N|psi>.
Vector contract_except(const Vector& psi, const ProductState& state, std::size_t j);

/// Reorders tensor slots: new slot i holds old slot order[i].
Vector permute_subsystems(const Vector& v, const SubsystemDims& dims, std::span<const int> order);
Matrix permute_subsystems(const Matrix& m, const SubsystemDims& dims, std::span<const int> order);

/// Dimensions after reordering by `order`.
SubsystemDims permuted_dims(const SubsystemDims& dims, std::span<const int> order);

}  // namespace sepiter
