#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "otoc/emitter.hpp"
#include "otoc/interferometer.hpp"
#include "otoc/operators.hpp"
#include "otoc/propagator.hpp"

using namespace otoc;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

InterferometerParams balanced(double T) {
    return {kInvSqrt2, kInvSqrt2, kInvSqrt2, kInvSqrt2, T};
}

// classic intensity correlation <sigma+(0) sigma+(tau) sigma-(tau) sigma-(0)>
// through the one-slot sandwich, independent of the multi-slot engine
double classic_g2_raw(const EmitterParams& p, double tau) {
    const Liouvillian liou = emitter_liouvillian(p);
    const DensityMatrix ss = steady_state(liou);
    const Vector x = evolve(liou, vec_pairs(Matrix(sigma_minus() * ss.mat * sigma_plus())), tau);
    return std::real((unvec_pairs(x, 2) * sigma_plus() * sigma_minus()).trace());
}

}  // namespace

TEST_CASE("detector expansions over the two paths") {
    const auto a = detector_expansion(Detector::A, balanced(1.0));
    REQUIRE(a[0].first == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(a[0].second == 0.0);
    REQUIRE(a[1].first == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(a[1].second == 1.0);

    const auto b = detector_expansion(Detector::B, balanced(1.0));
    REQUIRE(b[0].first == Catch::Approx(-0.5).margin(1e-12));
    REQUIRE(b[1].first == Catch::Approx(0.5).margin(1e-12));

    // T = 0 collapses detector A onto a single effective coefficient
    const auto a0 = detector_expansion(Detector::A, {0.8, 0.6, 0.6, 0.8, 0.0});
    REQUIRE(a0[0].second == a0[1].second);
    REQUIRE(a0[0].first + a0[1].first == Catch::Approx(0.8 * 0.6 + 0.6 * 0.8).margin(1e-12));

    InterferometerParams bad{0.9, 0.9, kInvSqrt2, kInvSqrt2, 1.0};
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("sixteen expansion terms with the documented time tuples") {
    const double tau = 1.7, T = 0.6;
    const auto terms = g2_terms(Detector::A, balanced(T), tau);
    REQUIRE(terms.size() == 16);

    // the (t1 t2 r1 r2)^2 interference term carries times (t, t+tau-T, t+tau, t-T)
    bool found = false;
    for (const auto& term : terms) {
        const std::array<double, 4> want{0.0, tau - T, tau, -T};
        bool match = true;
        for (int i = 0; i < 4; ++i)
            if (std::abs(term.times[static_cast<std::size_t>(i)] - want[static_cast<std::size_t>(i)]) > 1e-12)
                match = false;
        if (match) {
            found = true;
            REQUIRE(term.coeff == Catch::Approx(std::pow(0.5, 4)).margin(1e-12));
        }
    }
    REQUIRE(found);

    for (const auto& term : g2_terms(Detector::A, balanced(0.0), tau)) {
        REQUIRE(term.times[0] == 0.0);
        REQUIRE(term.times[1] == tau);
        REQUIRE(term.times[2] == tau);
        REQUIRE(term.times[3] == 0.0);
        REQUIRE(classify_term(term) == Ordering::NormalOrdered);
    }

    REQUIRE_THROWS_AS(g2_terms(Detector::A, balanced(1.0), -0.5), std::invalid_argument);
}

TEST_CASE("ordering classification") {
    // tau = T/2 breaks the detection pairing on the left flank
    REQUIRE(classify_times({0.0, -0.5, 0.5, -1.0}) == Ordering::OutOfTimeOrdered);
    // the paired tuples stay normal-ordered
    REQUIRE(classify_times({0.0, 1.0, 1.0, 0.0}) == Ordering::NormalOrdered);
    REQUIRE(classify_times({-1.0, 2.0, 2.0, -1.0}) == Ordering::NormalOrdered);
    // mismatched pairing is out of time order even with ascending-to-peak times
    REQUIRE(classify_times({0.0, 1.0, 2.0, -1.0}) == Ordering::OutOfTimeOrdered);
    // inner pair earlier than outer pair
    REQUIRE(classify_times({0.0, -0.6, -0.6, 0.0}) == Ordering::OutOfTimeOrdered);
}

TEST_CASE("exactly three terms stay normal-ordered over the grid") {
    std::array<bool, 16> always{};
    always.fill(true);
    for (double T : {0.4, 1.1, 1.9})
        for (double tau : {0.3, 0.7, 1.3, 2.1, 3.4}) {
            if (std::abs(tau - T) < 1e-9) continue;
            const auto terms = g2_terms(Detector::A, balanced(T), tau);
            for (std::size_t i = 0; i < 16; ++i)
                if (terms[i].ordering != Ordering::NormalOrdered) always[i] = false;
        }
    int count = 0;
    for (bool b : always) count += b;
    REQUIRE(count == 3);
    // the path-diagonal terms: (short,short|short,short), (long,short|short,long),
    // (long,long|long,long) in the (a,b,c,d) delay-flag enumeration
    REQUIRE(always[0]);
    REQUIRE(always[9]);
    REQUIRE(always[15]);
}

TEST_CASE("zero delay reduces to the rescaled intensity correlation") {
    const EmitterParams p{2.0, 0.0, 1.0, 0.0};
    const InterferometerParams iface{0.8, 0.6, 0.6, 0.8, 0.0};
    const double scale = std::pow(0.8 * 0.6 + 0.6 * 0.8, 4);

    const G2Result at_zero = g2(Detector::A, p, iface, 0.0);
    REQUIRE(std::abs(at_zero.raw) < 1e-10);

    for (double tau : {0.4, 1.2, 2.5}) {
        const G2Result res = g2(Detector::A, p, iface, tau);
        REQUIRE(res.raw == Catch::Approx(scale * classic_g2_raw(p, tau)).margin(1e-12));
        REQUIRE(res.raw_no_noise == Catch::Approx(res.raw).margin(1e-12));
    }
}

TEST_CASE("nonzero delay lifts the coincidence suppression") {
    const EmitterParams p{2.0, 0.0, 1.0, 0.0};
    const G2Result res = g2(Detector::A, p, balanced(1.0), 0.0);
    REQUIRE(res.raw > 1e-3);
    REQUIRE(res.max_imag < 1e-10);
}

TEST_CASE("cusp at tau equal to the delay for the pumped emitter") {
    const EmitterParams p{0.0, 0.0, 1.0, 1.0};
    const InterferometerParams iface = balanced(1.0);
    const double h = 1e-3;
    auto raw = [&](double tau) { return g2(Detector::A, p, iface, tau).raw; };
    const double left = (raw(1.0) - raw(1.0 - h)) / h;
    const double right = (raw(1.0 + h) - raw(1.0)) / h;
    REQUIRE(std::abs(right - left) > 0.01);

    // continuous across the cusp even though the slope jumps
    const double eps = 1e-8;
    REQUIRE(std::abs(raw(1.0 + eps) - raw(1.0 - eps)) < 1e-8);
}

TEST_CASE("delay to zero limit is continuous") {
    const EmitterParams p{2.0, 0.0, 1.0, 0.0};
    for (double tau : {0.5, 1.5}) {
        const double at_eps = g2(Detector::A, p, balanced(1e-3), tau).raw;
        const double at_zero = g2(Detector::A, p, balanced(0.0), tau).raw;
        REQUIRE(std::abs(at_eps - at_zero) / std::abs(at_zero) < 1e-3);
    }
}

TEST_CASE("scan ordering, zero-delay column, and amplitude trend") {
    const EmitterParams p{2.0, 0.0, 1.0, 0.0};
    std::vector<double> taus;
    for (int i = 0; i <= 16; ++i) taus.push_back(0.25 * i);
    const std::vector<double> delays{0.0, 1.0, 2.0, 4.0};
    const auto rows = g2_scan(Detector::A, p, balanced(0.0), taus, delays, true, 2);
    REQUIRE(rows.size() == taus.size() * delays.size());

    // T-major ordering
    for (std::size_t i = 0; i < rows.size(); ++i) {
        REQUIRE(rows[i].T == delays[i / taus.size()]);
        REQUIRE(rows[i].tau == taus[i % taus.size()]);
    }

    // T = 0 column equals the classic curve times the balanced coefficient sum
    for (std::size_t i = 0; i < taus.size(); ++i)
        REQUIRE(rows[i].raw == Catch::Approx(classic_g2_raw(p, taus[i])).margin(1e-10));

    auto peak = [&](std::size_t block) {
        double best = 0.0;
        for (std::size_t i = 0; i < taus.size(); ++i)
            best = std::max(best, rows[block * taus.size() + i].raw);
        return best;
    };
    REQUIRE(peak(1) > peak(2));
    REQUIRE(peak(2) > peak(3));
}

TEST_CASE("noise difference lives strictly below the diagonal") {
    const EmitterParams p{0.0, 0.0, 1.0, 1.0};
    std::vector<double> taus{0.2, 0.6, 1.0, 1.4, 2.2};
    std::vector<double> delays{0.4, 1.2};
    const auto rows = g2_scan(Detector::A, p, balanced(0.0), taus, delays, true, 1);
    double above = 0.0, below = 0.0;
    for (const auto& r : rows) {
        const double diff = std::abs(r.raw - r.raw_no_noise);
        if (r.tau > r.T + 1e-9) above = std::max(above, diff);
        if (r.tau < r.T - 1e-9) below = std::max(below, diff);
    }
    REQUIRE(above < 1e-10);
    REQUIRE(below > 1e-6);
}

TEST_CASE("detector difference isolates out-of-time-ordered terms") {
    const double tau = 0.4, T = 1.0;
    const auto terms_a = g2_terms(Detector::A, balanced(T), tau);
    const auto terms_b = g2_terms(Detector::B, balanced(T), tau);
    for (std::size_t i = 0; i < 16; ++i) {
        const double coeff = terms_a[i].coeff - terms_b[i].coeff;
        if (std::abs(coeff) > 1e-15)
            REQUIRE(terms_a[i].ordering == Ordering::OutOfTimeOrdered);
    }

    const EmitterParams p{0.0, 0.0, 1.0, 1.0};
    const double diff = g2_difference(p, balanced(T), tau);
    REQUIRE(std::isfinite(diff));
}

TEST_CASE("detector difference at zero delay is a rescaling of the same curve") {
    const EmitterParams p{2.0, 0.0, 1.0, 0.0};
    const InterferometerParams iface{0.8, 0.6, 0.6, 0.8, 0.0};
    const double ca = 0.8 * 0.6 + 0.6 * 0.8;          // detector A coefficient sum
    const double cb = -0.8 * 0.8 + 0.6 * 0.6;         // detector B coefficient sum
    const double scale = std::pow(ca, 4) - std::pow(cb, 4);
    for (double tau : {0.6, 1.8}) {
        const double diff = g2_difference(p, iface, tau);
        REQUIRE(diff == Catch::Approx(scale * classic_g2_raw(p, tau)).margin(1e-10));
    }
}

TEST_CASE("normalized correlation approaches one at large separation") {
    const EmitterParams p{2.0, 0.0, 1.0, 0.0};
    const G2Result res = g2(Detector::A, p, balanced(0.7), 25.0);
    REQUIRE(res.normalized == Catch::Approx(1.0).margin(1e-4));
}
