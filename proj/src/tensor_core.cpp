#include "sepiter/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sepiter {

SubsystemDims::SubsystemDims(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw StructuralError("SubsystemDims: need at least one subsystem");
    total_ = 1;
    for (int d : dims_) {
        if (d < 1) throw StructuralError("SubsystemDims: dimension must be >= 1, got " + std::to_string(d));
        total_ *= d;
    }
}

Eigen::Index SubsystemDims::stride(std::size_t j) const {
    Eigen::Index s = 1;
    for (std::size_t i = j + 1; i < dims_.size(); ++i) s *= dims_[i];
    return s;
}

SubsystemDims SubsystemDims::drop_last() const {
    if (dims_.size() < 2) throw StructuralError("SubsystemDims: cannot drop the only subsystem");
    return SubsystemDims(std::vector<int>(dims_.begin(), dims_.end() - 1));
}

std::string SubsystemDims::to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < dims_.size(); ++i) os << (i ? "," : "") << dims_[i];
    os << ']';
    return os.str();
}

ComplexVector::ComplexVector(Vector e, SubsystemDims d) : entries(std::move(e)), dims(std::move(d)) {
    if (entries.size() != dims.total())
        throw StructuralError("ComplexVector: length " + std::to_string(entries.size()) +
                              " does not match dims " + dims.to_string());
}

ProductState::ProductState(std::vector<Vector> factors, SubsystemDims dims)
    : factors_(std::move(factors)), dims_(std::move(dims)) {
    if (factors_.size() != dims_.parties())
        throw StructuralError("ProductState: " + std::to_string(factors_.size()) + " factors for dims " +
                              dims_.to_string());
    for (std::size_t j = 0; j < factors_.size(); ++j) {
        if (factors_[j].size() != dims_[j])
            throw StructuralError("ProductState: factor " + std::to_string(j + 1) + " has wrong length");
        if (std::abs(factors_[j].norm() - 1.0) > kNormTol)
            throw StructuralError("ProductState: factor " + std::to_string(j + 1) + " is not normalized");
    }
}

ProductState ProductState::normalized(std::vector<Vector> factors, SubsystemDims dims) {
    for (auto& f : factors) {
        const double n = f.norm();
        if (n == 0.0) throw StructuralError("ProductState: zero factor cannot be normalized");
        f /= n;
    }
    return ProductState(std::move(factors), std::move(dims));
}

ProductState ProductState::basis(const SubsystemDims& dims, std::span<const int> indices) {
    if (indices.size() != dims.parties()) throw StructuralError("ProductState::basis: index count mismatch");
    std::vector<Vector> factors;
    factors.reserve(indices.size());
    for (std::size_t j = 0; j < indices.size(); ++j) {
        if (indices[j] < 0 || indices[j] >= dims[j]) throw StructuralError("ProductState::basis: index out of range");
        Vector e = Vector::Zero(dims[j]);
        e[indices[j]] = 1.0;
        factors.push_back(std::move(e));
    }
    return ProductState(std::move(factors), dims);
}

ProductState ProductState::prefix() const {
    return ProductState(std::vector<Vector>(factors_.begin(), factors_.end() - 1), dims_.drop_last());
}

ProductState ProductState::extended(const Vector& last) const {
    std::vector<int> d(dims_.values().begin(), dims_.values().end());
    d.push_back(static_cast<int>(last.size()));
    auto f = factors_;
    f.push_back(last);
    return ProductState(std::move(f), SubsystemDims(std::move(d)));
}

ProductState ProductState::canonical_phase() const {
    auto out = factors_;
    for (auto& f : out) {
        const double biggest = f.cwiseAbs().maxCoeff();
        Eigen::Index pick = 0;
        while (std::abs(f[pick]) < biggest * (1.0 - 1e-12)) ++pick;
        const Complex phase = f[pick] / std::abs(f[pick]);
        f *= std::conj(phase);
        f[pick] = std::abs(f[pick]);
    }
    return ProductState(std::move(out), dims_);
}

double hermiticity_defect(const Matrix& m) {
    if (m.rows() != m.cols()) return INFINITY;
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

MultipartiteOperator::MultipartiteOperator(Matrix matrix, SubsystemDims dims)
    : matrix_(std::move(matrix)), dims_(std::move(dims)) {
    if (matrix_.rows() != dims_.total() || matrix_.cols() != dims_.total())
        throw StructuralError("MultipartiteOperator: matrix is " + std::to_string(matrix_.rows()) + "x" +
                              std::to_string(matrix_.cols()) + ", dims " + dims_.to_string() + " need " +
                              std::to_string(dims_.total()));
    const double defect = hermiticity_defect(matrix_);
    if (!(defect <= kHermitianTol)) {
        std::ostringstream os;
        os << "MultipartiteOperator: matrix is not Hermitian (max deviation " << defect << ")";
        throw StructuralError(os.str());
    }
}

MultipartiteOperator MultipartiteOperator::identity(const SubsystemDims& dims) {
    return MultipartiteOperator(Matrix::Identity(dims.total(), dims.total()), dims);
}

Vector kron(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
    return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexVector flatten(const ProductState& state) {
    Vector v = state.factor(0);
    for (std::size_t j = 1; j < state.parties(); ++j) v = kron(v, state.factor(j));
    return ComplexVector(std::move(v), state.dims());
}

ComplexVector apply(const MultipartiteOperator& op, const ComplexVector& v) {
    if (!(op.dims() == v.dims))
        throw StructuralError("apply: operator dims " + op.dims().to_string() + " vs vector dims " +
                              v.dims.to_string());
    return ComplexVector(op.matrix() * v.entries, v.dims);
}

double expectation(const MultipartiteOperator& op, const ProductState& state) {
    if (!(op.dims() == state.dims()))
        throw StructuralError("expectation: operator dims " + op.dims().to_string() + " vs state dims " +
                              state.dims().to_string());
    const Vector v = flatten(state).entries;
    const Complex q = v.dot(op.matrix() * v);
    if (std::abs(q.imag()) > 1e-10) throw StructuralError("expectation: quadratic form is not real");
    return q.real();
}

MultipartiteOperator partial_trace_last(const ComplexVector& psi) {
    if (psi.dims.parties() < 2) throw StructuralError("partial_trace_last: need at least two subsystems");
    const Eigen::Index last = psi.dims[psi.dims.parties() - 1];
    const Eigen::Index rest = psi.dims.total() / last;
    Eigen::Map<const Matrix> a(psi.entries.data(), rest, last);
    Matrix out = a * a.adjoint();
    // exact Hermiticity; the product is Hermitian up to rounding only
    for (Eigen::Index i = 0; i < rest; ++i) {
        out(i, i) = out(i, i).real();
        for (Eigen::Index k = i + 1; k < rest; ++k) out(k, i) = std::conj(out(i, k));
    }
    return MultipartiteOperator(std::move(out), psi.dims.drop_last());
}

Vector contract_except(const Vector& psi, const ProductState& state, std::size_t j) {
    const auto& dims = state.dims();
    if (psi.size() != dims.total()) throw StructuralError("contract_except: vector length mismatch");
    if (j >= dims.parties()) throw StructuralError("contract_except: subsystem index out of range");
    Vector left = Vector::Ones(1);
    for (std::size_t i = 0; i < j; ++i) left = kron(left, state.factor(i));
    Vector right = Vector::Ones(1);
    for (std::size_t i = j + 1; i < dims.parties(); ++i) right = kron(right, state.factor(i));

    const Eigen::Index dj = dims[j];
    const Eigen::Index nr = right.size();
    Vector out = Vector::Zero(dj);
    for (Eigen::Index l = 0; l < left.size(); ++l) {
        const Complex wl = std::conj(left[l]);
        for (Eigen::Index x = 0; x < dj; ++x) {
            const auto block = psi.segment((l * dj + x) * nr, nr);
            out[x] += wl * right.dot(block);
        }
    }
    return out;
}

Vector project_out_component(const ComplexVector& psi, const ProductState& prefix) {
    const auto& dims = psi.dims;
    if (dims.parties() < 2 || prefix.parties() != dims.parties() - 1 || !(prefix.dims() == dims.drop_last()))
        throw StructuralError("project_out_component: prefix does not match subsystems 1..N-1");
    const Eigen::Index last = dims[dims.parties() - 1];
    const Vector left = flatten(prefix).entries;
    Eigen::Map<const Matrix> a(psi.entries.data(), left.size(), last);
    return (left.adjoint() * a).transpose();
}

Matrix reduced_operator(const MultipartiteOperator& op, const ProductState& state, std::size_t j) {
    if (!(op.dims() == state.dims())) throw StructuralError("reduced_operator: dims mismatch");
    if (j >= state.parties()) throw StructuralError("reduced_operator: subsystem index out of range");
    const int dj = state.dims()[j];
    Matrix out(dj, dj);
    auto factors = state.factors();
    for (int y = 0; y < dj; ++y) {
        factors[j] = Vector::Unit(dj, y);
        Vector v = factors[0];
        for (std::size_t i = 1; i < factors.size(); ++i) v = kron(v, factors[i]);
        out.col(y) = contract_except(op.matrix() * v, state, j);
    }
    return out;
}

namespace {

std::vector<Eigen::Index> permutation_map(const SubsystemDims& dims, std::span<const int> order) {
    const std::size_t n = dims.parties();
    if (order.size() != n) throw StructuralError("permute_subsystems: order has wrong length");
    std::vector<int> seen(n, 0);
    for (int o : order) {
        if (o < 0 || static_cast<std::size_t>(o) >= n || seen[o]++)
            throw StructuralError("permute_subsystems: order is not a permutation");
    }
    const SubsystemDims out_dims = permuted_dims(dims, order);
    std::vector<Eigen::Index> new_stride(n);
    for (std::size_t i = 0; i < n; ++i) new_stride[i] = out_dims.stride(i);
    // old slot order[i] becomes new slot i
    std::vector<Eigen::Index> stride_of_old(n);
    for (std::size_t i = 0; i < n; ++i) stride_of_old[order[i]] = new_stride[i];

    std::vector<Eigen::Index> map(dims.total());
    std::vector<int> digits(n, 0);
    for (Eigen::Index idx = 0; idx < dims.total(); ++idx) {
        Eigen::Index target = 0;
        for (std::size_t s = 0; s < n; ++s) target += digits[s] * stride_of_old[s];
        map[idx] = target;
        for (std::size_t s = n; s-- > 0;) {
            if (++digits[s] < dims[s]) break;
            digits[s] = 0;
        }
    }
    return map;
}

}  // namespace

SubsystemDims permuted_dims(const SubsystemDims& dims, std::span<const int> order) {
    std::vector<int> d;
    d.reserve(order.size());
    for (int o : order) {
        if (o < 0 || static_cast<std::size_t>(o) >= dims.parties())
            throw StructuralError("permuted_dims: slot index out of range");
        d.push_back(dims[o]);
    }
    return SubsystemDims(std::move(d));
}

Vector permute_subsystems(const Vector& v, const SubsystemDims& dims, std::span<const int> order) {
    if (v.size() != dims.total()) throw StructuralError("permute_subsystems: vector length mismatch");
    const auto map = permutation_map(dims, order);
    Vector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out[map[i]] = v[i];
    return out;
}

Matrix permute_subsystems(const Matrix& m, const SubsystemDims& dims, std::span<const int> order) {
    if (m.rows() != dims.total() || m.cols() != dims.total())
        throw StructuralError("permute_subsystems: matrix size mismatch");
    const auto map = permutation_map(dims, order);
    Matrix out(m.rows(), m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out(map[r], map[c]) = m(r, c);
    return out;
}

}  // namespace sepiter
