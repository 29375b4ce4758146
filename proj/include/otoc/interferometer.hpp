// interferometer.hpp — Beamsplitter input-output algebra with a delay line.
// Detector fields are two-component superpositions of the emitter field at
// times t and t-T; the detector G2 expands into 16 emitter correlation terms
// whose time tuples may be out of time order, evaluated at the steady state
// by the multi-time engine.

#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "otoc/emitter.hpp"
#include "otoc/multitime.hpp"
#include "otoc/operators.hpp"

namespace otoc {

struct InterferometerParams {
    double t1 = 1.0 / std::sqrt(2.0);
    double r1 = 1.0 / std::sqrt(2.0);
    double t2 = 1.0 / std::sqrt(2.0);
    double r2 = 1.0 / std::sqrt(2.0);
    double delay = 0.0;  // T, units 1/gamma

    void validate() const {
        for (double c : {t1, r1, t2, r2})
            if (!(c >= 0.0 && c <= 1.0))
                throw std::invalid_argument("InterferometerParams: coefficients must lie in [0,1]");
        if (std::abs(t1 * t1 + r1 * r1 - 1.0) > 1e-12 || std::abs(t2 * t2 + r2 * r2 - 1.0) > 1e-12)
            throw std::invalid_argument("InterferometerParams: t^2 + r^2 must equal 1 within 1e-12");
        if (!(delay >= 0.0) || !std::isfinite(delay))
            throw std::invalid_argument("InterferometerParams: delay must be finite and >= 0");
    }
};

enum class Detector { A, B };

enum class Ordering { NormalOrdered, OutOfTimeOrdered };

// a_1 components of the detector field: (coefficient, delay). The vacuum port
// a_2 never contributes to normal-ordered detector moments and is dropped.
inline std::array<std::pair<double, double>, 2> detector_expansion(Detector det,
                                                                   const InterferometerParams& p) {
    p.validate();
    if (det == Detector::A)
        return {{{p.t1 * p.t2, 0.0}, {p.r1 * p.r2, p.delay}}};
    return {{{-p.t1 * p.r2, 0.0}, {p.r1 * p.t2, p.delay}}};
}

// One constituent of the detector G2: signed coefficient and the four times
// assigned bracket-left-to-right to (sigma+, sigma+, sigma-, sigma-).
struct G2Term {
    double coeff = 0.0;
    std::array<double, 4> times{};
    Ordering ordering = Ordering::OutOfTimeOrdered;
};

// Glauber detection pairing: the term is normal-ordered when it reads
// <sigma+(s) sigma+(s') sigma-(s') sigma-(s)> with s' >= s, i.e. outer times
// equal, inner times equal, inner pair no earlier than the outer pair. Of the
// 16 detector terms exactly the three path-diagonal ones (short/short,
// long/short, long/long) satisfy this at every tau, T > 0.
inline Ordering classify_times(const std::array<double, 4>& times) {
    const bool outer = std::abs(times[0] - times[3]) <= kTimeTol;
    const bool inner = std::abs(times[1] - times[2]) <= kTimeTol;
    const bool ordered = times[1] >= times[0] - kTimeTol;
    return (outer && inner && ordered) ? Ordering::NormalOrdered : Ordering::OutOfTimeOrdered;
}

inline Ordering classify_term(const G2Term& term) { return classify_times(term.times); }

// Expansion of <a_d'(t) a_d'(t+tau) a_d(t+tau) a_d(t)> over the two a_1
// components of each operator, with t = 0. The emitter mapping
// a_1 -> sqrt(gamma) sigma- contributes gamma^2 once per term at evaluation.
inline std::vector<G2Term> g2_terms(Detector det, const InterferometerParams& p, double tau) {
    if (!(tau >= 0.0)) throw std::invalid_argument("g2_terms: tau must be >= 0");
    const auto comp = detector_expansion(det, p);
    std::vector<G2Term> terms;
    terms.reserve(16);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) {
                    G2Term term;
                    term.coeff = comp[a].first * comp[b].first * comp[c].first * comp[d].first;
                    term.times = {-comp[a].second, tau - comp[b].second, tau - comp[c].second,
                                  -comp[d].second};
                    term.ordering = classify_times(term.times);
                    terms.push_back(term);
                }
    return terms;
}

struct G2Result {
    double tau = 0.0;
    double T = 0.0;
    double raw = 0.0;          // units gamma^2
    double raw_no_noise = 0.0;
    double normalized = 0.0;   // raw / (detector steady flux)^2
    double max_imag = 0.0;     // largest imaginary residue seen before realization
};

namespace detail {

// Shared per-parameter-set state for G2 evaluations.
struct G2Engine {
    EmitterParams emitter;
    Liouvillian liou;
    NoiseModel model;
    DensityMatrix steady;
    PropagatorCache cache;

    explicit G2Engine(const EmitterParams& ep)
        : emitter(ep),
          liou(emitter_liouvillian(ep)),
          model(noise_model(ep)),
          steady(steady_state(liou)),
          cache(liou, model) {}

    // <a_d' a_d> at the steady state, including the two-time interference term
    double flux(Detector det, const InterferometerParams& p) {
        const auto comp = detector_expansion(det, p);
        const double pe = std::real(expectation(steady, sigma_plus() * sigma_minus()));
        const Complex cross =
            two_time(liou, sigma_plus(), sigma_minus(), steady, {p.delay}).front();
        const double c0 = comp[0].first, c1 = comp[1].first;
        return emitter.gamma *
               ((c0 * c0 + c1 * c1) * pe + 2.0 * c0 * c1 * std::real(cross));
    }

    Complex term_value(const G2Term& term, bool include_noise) {
        const double t0 = *std::min_element(term.times.begin(), term.times.end());
        EventSchedule schedule;
        schedule.push_back({sigma_plus(), term.times[0] - t0});
        schedule.push_back({sigma_plus(), term.times[1] - t0});
        schedule.push_back({sigma_minus(), term.times[2] - t0});
        schedule.push_back({sigma_minus(), term.times[3] - t0});
        return correlation(schedule, liou, model, steady, include_noise, &cache);
    }

    G2Result evaluate(Detector det, const InterferometerParams& p, double tau,
                      bool include_noise, double flux_sq) {
        const auto terms = g2_terms(det, p, tau);
        Complex sum_raw = 0.0, sum_off = 0.0;
        for (const auto& term : terms) {
            if (term.coeff == 0.0) continue;
            sum_raw += term.coeff * term_value(term, include_noise);
            sum_off += term.coeff * term_value(term, false);
        }
        const double g2sq = emitter.gamma * emitter.gamma;
        sum_raw *= g2sq;
        sum_off *= g2sq;
        const double imag = std::max(std::abs(sum_raw.imag()), std::abs(sum_off.imag()));
        if (imag > 1e-8)
            throw std::runtime_error("g2: imaginary residue " + std::to_string(imag) +
                                     " exceeds 1e-8");
        G2Result res;
        res.tau = tau;
        res.T = p.delay;
        res.raw = sum_raw.real();
        res.raw_no_noise = sum_off.real();
        res.normalized = res.raw / flux_sq;
        res.max_imag = imag;
        return res;
    }
};

}  // namespace detail

// Detector G2 at detection separation tau, evaluated at the steady state.
// `include_noise` selects the noise treatment of the raw value; the
// raw_no_noise field always carries the noise-free variant.
inline G2Result g2(Detector det, const EmitterParams& emitter, const InterferometerParams& p,
                   double tau, bool include_noise = true) {
    if (!(tau >= 0.0)) throw std::invalid_argument("g2: tau must be >= 0");
    p.validate();
    detail::G2Engine engine(emitter);
    const double f = engine.flux(det, p);
    return engine.evaluate(det, p, tau, include_noise, f * f);
}

// Dense (T, tau) sweep; rows ordered T-major then tau. Grid points are
// independent and may be evaluated by several threads; output order is fixed.
inline std::vector<G2Result> g2_scan(Detector det, const EmitterParams& emitter,
                                     InterferometerParams p, const std::vector<double>& tau_grid,
                                     const std::vector<double>& T_grid, bool include_noise = true,
                                     int threads = 1) {
    for (const auto& grid : {tau_grid, T_grid}) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (!(grid[k] >= 0.0)) throw std::invalid_argument("g2_scan: grids must be >= 0");
            if (k > 0 && grid[k] < grid[k - 1])
                throw std::invalid_argument("g2_scan: grids must be ascending");
        }
    }
    detail::G2Engine engine(emitter);
    engine.cache.prepare(1, false);
    engine.cache.prepare(2, include_noise);
    engine.cache.prepare(2, false);

    std::vector<G2Result> out(tau_grid.size() * T_grid.size());
    std::vector<double> flux_sq(T_grid.size());
    for (std::size_t it = 0; it < T_grid.size(); ++it) {
        p.delay = T_grid[it];
        const double f = engine.flux(det, p);
        flux_sq[it] = f * f;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= out.size()) return;
            const std::size_t it = idx / tau_grid.size();
            const std::size_t itau = idx % tau_grid.size();
            InterferometerParams local = p;
            local.delay = T_grid[it];
            out[idx] = engine.evaluate(det, local, tau_grid[itau], include_noise, flux_sq[it]);
        }
    };
    const int nthreads = std::max(1, threads);
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

// G2_A - G2_B at identical emitter and interferometer parameters.
inline double g2_difference(const EmitterParams& emitter, const InterferometerParams& p,
                            double tau, bool include_noise = true) {
    if (!(tau >= 0.0)) throw std::invalid_argument("g2_difference: tau must be >= 0");
    p.validate();
    detail::G2Engine engine(emitter);
    const double fa = engine.flux(Detector::A, p);
    const double fb = engine.flux(Detector::B, p);
    const G2Result a = engine.evaluate(Detector::A, p, tau, include_noise, fa * fa);
    const G2Result b = engine.evaluate(Detector::B, p, tau, include_noise, fb * fb);
    return a.raw - b.raw;
}

}  // namespace otoc
