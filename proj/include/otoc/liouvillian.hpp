// liouvillian.hpp — Lindblad generator assembly in the flattened pair basis
// and steady-state extraction via the numerical null space.

#pragma once

#include <unsupported/Eigen/KroneckerProduct>

#include <stdexcept>
#include <string>
#include <vector>

#include "otoc/operators.hpp"

namespace otoc {

struct LindbladChannel {
    double rate = 0.0;  // 1/time
    Matrix jump;
};

// N^2 x N^2 matrix M with d rho_ij / dt = sum_{i'j'} M[(ij),(i'j')] rho_{i'j'}.
struct Liouvillian {
    Index dim = 0;  // N
    Matrix mat;     // N^2 x N^2
};

// M = -i(H (x) 1 - 1 (x) H^T)
//     + sum_c rate [ c (x) conj(c) - 1/2 (c'c (x) 1 + 1 (x) (c'c)^T) ]
// acting on the row-major vec of rho; the anticommutator form preserves trace.
inline Liouvillian build_liouvillian(const Matrix& hamiltonian,
                                     const std::vector<LindbladChannel>& channels) {
    check_operator(hamiltonian, "build_liouvillian");
    if (!is_hermitian(hamiltonian))
        throw std::invalid_argument("build_liouvillian: Hamiltonian must be Hermitian");
    const Index n = hamiltonian.rows();
    const Matrix id = Matrix::Identity(n, n);
    const Complex im(0.0, 1.0);

    Matrix m = -im * (Eigen::kroneckerProduct(hamiltonian, id).eval() -
                      Eigen::kroneckerProduct(id, hamiltonian.transpose()).eval());
    for (const auto& ch : channels) {
        if (!(ch.rate >= 0.0) || !std::isfinite(ch.rate))
            throw std::invalid_argument("build_liouvillian: channel rate must be finite and >= 0");
        if (ch.jump.rows() != n || ch.jump.cols() != n)
            throw std::invalid_argument("build_liouvillian: jump operator dimension mismatch");
        if (!all_finite(ch.jump))
            throw std::invalid_argument("build_liouvillian: jump operator has non-finite entries");
        const Matrix cdc = ch.jump.adjoint() * ch.jump;
        m += ch.rate * (Eigen::kroneckerProduct(ch.jump, ch.jump.conjugate()).eval() -
                        0.5 * Eigen::kroneckerProduct(cdc, id).eval() -
                        0.5 * Eigen::kroneckerProduct(id, cdc.transpose()).eval());
    }
    return Liouvillian{n, std::move(m)};
}

// max over columns of |sum_i M[(ii), col]|; zero for any trace-preserving generator
inline double trace_column_defect(const Liouvillian& liou) {
    const Index n = liou.dim;
    double worst = 0.0;
    for (Index col = 0; col < n * n; ++col) {
        Complex s = 0.0;
        for (Index i = 0; i < n; ++i) s += liou.mat(pair_index(i, i, n), col);
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

// Trace-1 null vector of M. Singular values below 1e-10 * sigma_max count as
// zero; anything but a one-dimensional null space is an error.
inline DensityMatrix steady_state(const Liouvillian& liou) {
    const Index n = liou.dim;
    Eigen::JacobiSVD<Matrix> svd(liou.mat, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int null_dim = 0;
    if (sv(0) == 0.0) {
        null_dim = static_cast<int>(sv.size());
    } else {
        const double cutoff = 1e-10 * sv(0);
        for (Index k = 0; k < sv.size(); ++k)
            if (sv(k) < cutoff) ++null_dim;
    }
    if (null_dim != 1)
        throw std::runtime_error("steady_state: null space dimension is " +
                                 std::to_string(null_dim) + ", expected 1");
    Matrix rho = unvec_pairs(svd.matrixV().col(n * n - 1), n);
    rho /= rho.trace();
    DensityMatrix ss{std::move(rho)};
    const double residual = (liou.mat * vec_pairs(ss.mat)).norm();
    if (residual >= 1e-10)
        throw std::runtime_error("steady_state: residual " + std::to_string(residual) +
                                 " exceeds 1e-10");
    return ss;
}

}  // namespace otoc
