// emitter.hpp — Driven, thermally pumped two-level emitter: Hamiltonian,
// Lindblad channels, and the input-field noise decomposition.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "otoc/liouvillian.hpp"
#include "otoc/multitime.hpp"
#include "otoc/operators.hpp"

namespace otoc {

// All rates in units of gamma; gamma sets the time unit.
struct EmitterParams {
    double omega = 0.0;  // Rabi frequency
    double delta = 0.0;  // laser detuning
    double gamma = 1.0;  // spontaneous decay rate
    double nbar = 0.0;   // mean thermal photon number

    void validate() const {
        if (!(gamma > 0.0) || !std::isfinite(gamma))
            throw std::invalid_argument("EmitterParams: gamma must be finite and > 0");
        if (!(nbar >= 0.0) || !std::isfinite(nbar))
            throw std::invalid_argument("EmitterParams: nbar must be finite and >= 0");
        if (!std::isfinite(omega) || !std::isfinite(delta))
            throw std::invalid_argument("EmitterParams: omega and delta must be finite");
    }
};

// H = -delta sigma+ sigma- + (omega/2)(sigma+ + sigma-) in the (|g>, |e>) basis
inline Matrix hamiltonian(const EmitterParams& p) {
    p.validate();
    Matrix h(2, 2);
    h << 0.0, p.omega / 2.0, p.omega / 2.0, -p.delta;
    return h;
}

// decay at gamma(nbar+1), incoherent pumping at gamma nbar (omitted when nbar = 0)
inline std::vector<LindbladChannel> lindblad_channels(const EmitterParams& p) {
    p.validate();
    std::vector<LindbladChannel> channels;
    channels.push_back({p.gamma * (p.nbar + 1.0), sigma_minus()});
    if (p.nbar > 0.0) channels.push_back({p.gamma * p.nbar, sigma_plus()});
    return channels;
}

inline Liouvillian emitter_liouvillian(const EmitterParams& p) {
    return build_liouvillian(hamiltonian(p), lindblad_channels(p));
}

// Noise operators of the dyadic Heisenberg equations,
//   F_ij = -[|j><i|, sigma+] a_in + [|j><i|, sigma-] a_in^dag,
// with <a_in a_in^dag> = gamma(nbar+1) delta and <a_in^dag a_in> = gamma nbar delta.
inline NoiseModel noise_model(const EmitterParams& p) {
    p.validate();
    NoiseModel model;
    model.dim = 2;
    NoiseModel::Term in{"a_in", {}};
    NoiseModel::Term in_dag{"a_in_dag", {}};
    in.table.resize(4);
    in_dag.table.resize(4);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) {
            const Matrix dy = dyad(j, i, 2);  // |j><i|
            in.table[static_cast<std::size_t>(pair_index(i, j, 2))] = -commutator(dy, sigma_plus());
            in_dag.table[static_cast<std::size_t>(pair_index(i, j, 2))] = commutator(dy, sigma_minus());
        }
    model.terms.push_back(std::move(in));
    model.terms.push_back(std::move(in_dag));
    model.bath_corr[{"a_in", "a_in_dag"}] = p.gamma * (p.nbar + 1.0);
    model.bath_corr[{"a_in_dag", "a_in"}] = p.gamma * p.nbar;
    model.bath_corr[{"a_in", "a_in"}] = 0.0;
    model.bath_corr[{"a_in_dag", "a_in_dag"}] = 0.0;
    return model;
}

}  // namespace otoc
