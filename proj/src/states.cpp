#include "sepiter/states.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "sepiter/random.hpp"

namespace sepiter {

DensityOperator::DensityOperator(Matrix matrix, SubsystemDims dims)
    : matrix_(std::move(matrix)), dims_(std::move(dims)) {
    if (matrix_.rows() != dims_.total() || matrix_.cols() != dims_.total())
        throw StructuralError("DensityOperator: matrix does not match dims " + dims_.to_string());
    if (!(hermiticity_defect(matrix_) <= kHermitianTol)) throw StructuralError("DensityOperator: not Hermitian");
    const double tr = matrix_.trace().real();
    if (std::abs(tr - 1.0) > 1e-10) {
        std::ostringstream os;
        os << "DensityOperator: trace is " << tr;
        throw StructuralError(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()[0] < -1e-10) throw StructuralError("DensityOperator: not positive semidefinite");
}

double trace_product(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.cols() || a.cols() != b.rows()) throw StructuralError("trace_product: size mismatch");
    // tr(AB) = sum_ij A_ij B_ji
    return (a.array() * b.transpose().array()).sum().real();
}

Matrix pauli(Pauli kind) {
    Matrix m(2, 2);
    const Complex i(0.0, 1.0);
    switch (kind) {
        case Pauli::Id: m << 1, 0, 0, 1; break;
        case Pauli::X: m << 0, 1, 1, 0; break;
        case Pauli::Y: m << 0, -i, i, 0; break;
        case Pauli::Z: m << 1, 0, 0, -1; break;
    }
    return m;
}

Matrix kron_power(const Matrix& m, int n) {
    if (n < 1) throw DomainError("kron_power: n must be >= 1");
    Matrix out = m;
    for (int k = 1; k < n; ++k) out = kron(out, m);
    return out;
}

Matrix swap_matrix(int d) {
    if (d < 2) throw DomainError("swap_operator: d must be >= 2");
    Matrix v = Matrix::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) v(j * d + i, i * d + j) = 1.0;
    return v;
}

MultipartiteOperator swap_operator(int d) {
    Matrix l = 2.0 * Matrix::Identity(d * d, d * d) - swap_matrix(d);
    return MultipartiteOperator(std::move(l), SubsystemDims({d, d}));
}

DensityOperator horodecki_state(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 5.0)) throw DomainError("horodecki_state: alpha must lie in [0, 5]");
    auto idx = [](int a, int b) { return 3 * a + b; };
    Matrix rho = Matrix::Zero(9, 9);
    // 2|Psi><Psi| with |Psi> = (|00>+|11>+|22>)/sqrt3
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) rho(idx(a, a), idx(b, b)) += 2.0 / 3.0;
    for (int k = 0; k < 3; ++k) {
        rho(idx(k, (k + 1) % 3), idx(k, (k + 1) % 3)) += alpha / 3.0;          // sigma_+
        rho(idx((k + 1) % 3, k), idx((k + 1) % 3, k)) += (5.0 - alpha) / 3.0;  // sigma_-
    }
    rho /= 7.0;
    return DensityOperator(std::move(rho), SubsystemDims({3, 3}));
}

DensityOperator smolin_state() {
    Matrix s = Matrix::Identity(16, 16);
    s += kron_power(pauli(Pauli::X), 4);
    s += kron_power(pauli(Pauli::Y), 4);
    s += kron_power(pauli(Pauli::Z), 4);
    s /= 16.0;
    return DensityOperator(std::move(s), SubsystemDims({2, 2, 2, 2}));
}

MultipartiteOperator normalized_gram_operator(const Matrix& m, const SubsystemDims& dims) {
    const Eigen::Index n = dims.total();
    if (m.rows() != n || m.cols() != n) throw StructuralError("normalized_gram_operator: size mismatch");
    Matrix l = m * m.adjoint();
    l.diagonal().array() += 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        l(i, i) = l(i, i).real();
        for (Eigen::Index k = i + 1; k < n; ++k) l(k, i) = std::conj(l(i, k));
    }
    l /= l.trace().real();
    return MultipartiteOperator(std::move(l), dims);
}

MultipartiteOperator random_operator(const RandomOperatorSpec& spec) {
    Rng rng(spec.seed);
    const Eigen::Index n = spec.dims.total();
    Matrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
            const double re = rng.normal();
            const double im = rng.normal();
            m(r, c) = Complex(re, im);
        }
    return normalized_gram_operator(m, spec.dims);
}

}  // namespace sepiter
