// operators.hpp — Dense complex operator algebra: basis operators, dyadics,
// density matrices, expectation values, and the shared pair-index flattening.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace otoc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Flattening convention shared by every module: the index pair (i, j),
// with rho_ij = <i|rho|j> and the dyadic |j><i| attached to slot (i, j),
// maps to the flat index i*N + j.
inline Index pair_index(Index i, Index j, Index n) { return i * n + j; }

// vec/unvec in the row-major pair convention: vec(rho)[i*N + j] = rho(i, j)
inline Vector vec_pairs(const Matrix& m) {
    const Index n = m.rows();
    Vector v(n * n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) v(pair_index(i, j, n)) = m(i, j);
    return v;
}

inline Matrix unvec_pairs(const Vector& v, Index n) {
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) = v(pair_index(i, j, n));
    return m;
}

// |ket><bra| in an n-dimensional space
inline Matrix dyad(Index ket, Index bra, Index n) {
    Matrix m = Matrix::Zero(n, n);
    m(ket, bra) = 1.0;
    return m;
}

// Fixed two-level basis order (|g>, |e>): sigma_- = |g><e|
inline Matrix sigma_minus() { return dyad(0, 1, 2); }
inline Matrix sigma_plus() { return dyad(1, 0, 2); }

inline Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline Matrix sigma_y() {
    Matrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

inline Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline bool all_finite(const Matrix& m) {
    return m.allFinite();
}

inline bool is_hermitian(const Matrix& m, double tol = 1e-12) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

inline void check_operator(const Matrix& m, const std::string& what) {
    if (m.rows() != m.cols() || m.rows() < 2)
        throw std::invalid_argument(what + ": operator must be square with dim >= 2");
    if (!all_finite(m)) throw std::invalid_argument(what + ": operator has non-finite entries");
}

// Trace-one Hermitian positive matrix in the rho_ij = <i|rho|j> convention.
struct DensityMatrix {
    Matrix mat;

    explicit DensityMatrix(Matrix m) : mat(std::move(m)) {
        check_operator(mat, "DensityMatrix");
        if (std::abs(mat.trace() - Complex(1.0, 0.0)) > 1e-10)
            throw std::invalid_argument("DensityMatrix: trace must be 1 within 1e-10");
        if (!is_hermitian(mat, 1e-10))
            throw std::invalid_argument("DensityMatrix: matrix must be Hermitian within 1e-10");
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (mat + mat.adjoint()));
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw std::invalid_argument("DensityMatrix: eigenvalues must be >= -1e-10");
    }

    Index dim() const { return mat.rows(); }
};

// <A> = sum_ij rho_ij A_ji = Tr(rho A)
inline Complex expectation(const DensityMatrix& rho, const Matrix& op) {
    if (op.rows() != rho.dim() || op.cols() != rho.dim())
        throw std::invalid_argument("expectation: dimension mismatch");
    return (rho.mat * op).trace();
}

}  // namespace otoc
