// propagator.hpp — Exact exponential propagation of constant generators.
// Spectral factorization when the generator is cleanly diagonalizable,
// scaling-and-squaring otherwise.

#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include <stdexcept>

#include "otoc/liouvillian.hpp"
#include "otoc/operators.hpp"

namespace otoc {

class Propagator {
public:
    explicit Propagator(Matrix generator) : gen_(std::move(generator)) {
        if (gen_.rows() != gen_.cols())
            throw std::invalid_argument("Propagator: generator must be square");
        if (!all_finite(gen_)) throw std::invalid_argument("Propagator: non-finite generator");
        Eigen::ComplexEigenSolver<Matrix> es(gen_);
        if (es.info() == Eigen::Success) {
            Eigen::FullPivLU<Matrix> lu(es.eigenvectors());
            if (lu.isInvertible()) {
                eigs_ = es.eigenvalues();
                basis_ = es.eigenvectors();
                basis_inv_ = lu.inverse();
                const Matrix recon = basis_ * eigs_.asDiagonal() * basis_inv_;
                const double scale = 1.0 + gen_.cwiseAbs().maxCoeff();
                spectral_ = (recon - gen_).cwiseAbs().maxCoeff() <= 1e-12 * scale;
            }
        }
    }

    Index size() const { return gen_.rows(); }
    bool spectral() const { return spectral_; }

    // exp(G t) x
    Vector apply(const Vector& x, double t) const {
        if (!(t >= 0.0) || !std::isfinite(t))
            throw std::invalid_argument("Propagator::apply: time must be finite and >= 0");
        if (x.size() != gen_.rows())
            throw std::invalid_argument("Propagator::apply: size mismatch");
        if (t == 0.0) return x;
        if (spectral_) {
            Vector y = basis_inv_ * x;
            for (Index k = 0; k < y.size(); ++k) y(k) *= std::exp(eigs_(k) * t);
            return basis_ * y;
        }
        return matrix(t) * x;
    }

    // exp(G t) as a dense matrix
    Matrix matrix(double t) const {
        if (spectral_) {
            Vector e(eigs_.size());
            for (Index k = 0; k < e.size(); ++k) e(k) = std::exp(eigs_(k) * t);
            return basis_ * e.asDiagonal() * basis_inv_;
        }
        return Matrix(gen_ * t).exp();
    }

private:
    Matrix gen_;
    bool spectral_ = false;
    Vector eigs_;
    Matrix basis_, basis_inv_;
};

// exp(M dt) applied to a flattened tensor over the Liouvillian's pair space
inline Vector evolve(const Liouvillian& liou, const Vector& x, double dt) {
    if (!(dt >= 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("evolve: dt must be finite and >= 0");
    if (!x.allFinite()) throw std::invalid_argument("evolve: non-finite input");
    return Propagator(liou.mat).apply(x, dt);
}

inline DensityMatrix evolve(const Liouvillian& liou, const DensityMatrix& rho, double dt) {
    return DensityMatrix(unvec_pairs(evolve(liou, vec_pairs(rho.mat), dt), liou.dim));
}

}  // namespace otoc
