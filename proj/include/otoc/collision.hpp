// collision.hpp — Collision-model unitary dilation of the emitter + bath.
// Ground truth for multi-time correlations with no regression-theorem
// assumptions: a stream of fresh qubit ancillas (purified pairs for a thermal
// bath) collides with the system, and Heisenberg operators are evaluated by
// forward/backward state-vector passes.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "otoc/emitter.hpp"
#include "otoc/liouvillian.hpp"
#include "otoc/operators.hpp"

namespace otoc {

struct CollisionConfig {
    double dt = 0.02;   // collision step, units 1/gamma
    int n_steps = 1;    // number of ancillas; covers times up to n_steps*dt
    bool thermal = false;  // purified thermal ancillas (required when nbar > 0)

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt))
            throw std::invalid_argument("CollisionConfig: dt must be finite and > 0");
        if (n_steps < 1) throw std::invalid_argument("CollisionConfig: n_steps must be >= 1");
        const int limit = thermal ? 10 : 20;
        if (n_steps > limit)
            throw std::invalid_argument("CollisionConfig: n_steps exceeds the qubit budget");
    }

    int qubits() const { return 1 + (thermal ? 2 * n_steps : n_steps); }
};

// U = exp(-i dt [H_S (x) 1 + g (sigma+ (x) beta- + sigma- (x) beta+)]) on
// system (x) ancilla, with g = sqrt(gamma(2 nbar + 1)/dt) chosen so the
// induced per-step rates reproduce gamma(nbar+1) down and gamma nbar up to
// first order in dt.
inline Matrix collision_unitary(const EmitterParams& p, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("collision_unitary: dt must be finite and > 0");
    const double g = std::sqrt(p.gamma * (2.0 * p.nbar + 1.0) / dt);
    const Matrix id = Matrix::Identity(2, 2);
    Matrix k = Eigen::kroneckerProduct(hamiltonian(p), id).eval();
    k += g * (Eigen::kroneckerProduct(sigma_plus(), sigma_minus()).eval() +
              Eigen::kroneckerProduct(sigma_minus(), sigma_plus()).eval());
    Eigen::SelfAdjointEigenSolver<Matrix> es(k);
    Vector phases(4);
    for (Index i = 0; i < 4; ++i)
        phases(i) = std::exp(Complex(0.0, -dt * es.eigenvalues()(i)));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

namespace detail {

// State vector over `nq` qubits; amplitude index bit q holds qubit q.
struct QubitState {
    int nq = 0;
    Vector amps;

    void apply_1q(const Matrix& op, int q) {
        const Index mask = Index(1) << q;
        for (Index i = 0; i < amps.size(); ++i) {
            if (i & mask) continue;
            const Complex a0 = amps(i), a1 = amps(i | mask);
            amps(i) = op(0, 0) * a0 + op(0, 1) * a1;
            amps(i | mask) = op(1, 0) * a0 + op(1, 1) * a1;
        }
    }

    // op4 on the ordered pair (qa, qb), basis index = 2*bit(qa) + bit(qb)
    void apply_2q(const Matrix& op4, int qa, int qb) {
        const Index ma = Index(1) << qa;
        const Index mb = Index(1) << qb;
        for (Index i = 0; i < amps.size(); ++i) {
            if ((i & ma) || (i & mb)) continue;
            const Index at[4] = {i, i | mb, i | ma, i | ma | mb};
            const Complex a[4] = {amps(at[0]), amps(at[1]), amps(at[2]), amps(at[3])};
            for (int r = 0; r < 4; ++r)
                amps(at[r]) = op4(r, 0) * a[0] + op4(r, 1) * a[1] + op4(r, 2) * a[2] +
                              op4(r, 3) * a[3];
        }
    }

    double norm() const { return amps.norm(); }
};

}  // namespace detail

// <psi| O_1(t_1) ... O_K(t_K) |psi> on the dilated space, with the system
// prepared in the master-equation steady state (by linearity, one run per
// steady-state eigenvector) and fresh ancillas. O(t) = W'(t) (O (x) 1) W(t)
// where W(t) is the ordered product of collision unitaries up to t.
inline Complex oracle_correlation(const EventSchedule& schedule, const EmitterParams& p,
                                  const CollisionConfig& cfg) {
    cfg.validate();
    if (p.nbar > 0.0 && !cfg.thermal)
        throw std::invalid_argument("oracle_correlation: nbar > 0 requires thermal ancillas");
    if (schedule.empty()) throw std::invalid_argument("oracle_correlation: empty schedule");

    std::vector<int> steps;
    steps.reserve(schedule.size());
    for (const auto& ev : schedule) {
        const double m = ev.time / cfg.dt;
        const int mi = static_cast<int>(std::lround(m));
        if (std::abs(m - mi) > 1e-9)
            throw std::invalid_argument("oracle_correlation: event time not on the dt grid");
        if (mi < 0 || mi > cfg.n_steps)
            throw std::invalid_argument("oracle_correlation: event time outside the covered window");
        steps.push_back(mi);
    }

    const Matrix u = collision_unitary(p, cfg.dt);
    const Matrix u_dag = u.adjoint();
    const double p_exc = p.nbar > 0.0 ? p.nbar / (2.0 * p.nbar + 1.0) : 0.0;

    const DensityMatrix ss = steady_state(emitter_liouvillian(p));
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (ss.mat + ss.mat.adjoint()));

    const int nq = cfg.qubits();
    const Index dim = Index(1) << nq;
    auto mode_qubit = [&](int n) { return 1 + (cfg.thermal ? 2 * n : n); };

    auto heisenberg_apply = [&](detail::QubitState& st, const Matrix& op, int m) {
        for (int n = 0; n < m; ++n) st.apply_2q(u, 0, mode_qubit(n));
        st.apply_1q(op, 0);
        for (int n = m - 1; n >= 0; --n) st.apply_2q(u_dag, 0, mode_qubit(n));
    };

    Complex total = 0.0;
    for (Index k = 0; k < 2; ++k) {
        const double w = es.eigenvalues()(k);
        if (w < 1e-14) continue;
        detail::QubitState psi;
        psi.nq = nq;
        psi.amps = Vector::Zero(dim);
        for (Index idx = 0; idx < dim; ++idx) {
            Complex amp = es.eigenvectors()((idx >> 0) & 1, k);
            if (amp == Complex(0.0, 0.0)) continue;
            bool dead = false;
            for (int n = 0; n < cfg.n_steps && !dead; ++n) {
                if (cfg.thermal) {
                    const int mb = static_cast<int>((idx >> (1 + 2 * n)) & 1);
                    const int pb = static_cast<int>((idx >> (2 + 2 * n)) & 1);
                    if (mb != pb)
                        dead = true;
                    else
                        amp *= mb ? std::sqrt(p_exc) : std::sqrt(1.0 - p_exc);
                } else if ((idx >> (1 + n)) & 1) {
                    dead = true;
                }
            }
            if (!dead) psi.amps(idx) = amp;
        }
        detail::QubitState phi = psi;
        for (std::size_t e = schedule.size(); e-- > 0;)
            heisenberg_apply(phi, schedule[e].op, steps[e]);
        total += w * psi.amps.dot(phi.amps);
    }
    return total;
}

}  // namespace otoc
