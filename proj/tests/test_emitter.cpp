#include <catch2/catch_amalgamated.hpp>

#include "otoc/emitter.hpp"
#include "otoc/liouvillian.hpp"
#include "otoc/operators.hpp"

using namespace otoc;

namespace {

double bloch_rho_ee(double omega, double delta, double gamma, double nbar) {
    const double g2 = gamma * (2.0 * nbar + 1.0) / 2.0;
    const double sat = omega * omega * g2 / (2.0 * (delta * delta + g2 * g2));
    return (sat + gamma * nbar) / (2.0 * sat + gamma * (2.0 * nbar + 1.0));
}

}  // namespace

TEST_CASE("emitter hamiltonian matrix elements") {
    REQUIRE(hamiltonian({0.0, 0.0, 1.0, 0.0}).cwiseAbs().maxCoeff() == 0.0);

    const Matrix h = hamiltonian({2.0, 0.0, 1.0, 0.0});
    REQUIRE(h(1, 1) == Complex(0.0, 0.0));
    REQUIRE(h(0, 0) == Complex(0.0, 0.0));
    REQUIRE(h(1, 0) == Complex(1.0, 0.0));

    const Matrix hd = hamiltonian({1.4, 0.7, 1.0, 0.2});
    REQUIRE(hd(1, 1) == Complex(-0.7, 0.0));
    REQUIRE(is_hermitian(hd));
}

TEST_CASE("lindblad channels switch on with thermal occupation") {
    const auto vacuum = lindblad_channels({1.0, 0.0, 1.0, 0.0});
    REQUIRE(vacuum.size() == 1);
    REQUIRE(vacuum[0].rate == 1.0);
    REQUIRE((vacuum[0].jump - sigma_minus()).norm() == 0.0);

    const auto thermal = lindblad_channels({0.0, 0.0, 1.0, 1.0});
    REQUIRE(thermal.size() == 2);
    REQUIRE(thermal[0].rate == 2.0);
    REQUIRE(thermal[1].rate == 1.0);
    REQUIRE((thermal[1].jump - sigma_plus()).norm() == 0.0);

    // undriven vacuum emitter relaxes to the ground state
    const DensityMatrix ss = steady_state(emitter_liouvillian({0.0, 0.0, 1.0, 0.0}));
    REQUIRE(std::abs(ss.mat(0, 0) - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("emitter parameter validation") {
    REQUIRE_THROWS_AS(hamiltonian({1.0, 0.0, 0.0, 0.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(hamiltonian({1.0, 0.0, 1.0, -0.5}), std::invalid_argument);
}

TEST_CASE("noise model tables and bath correlations") {
    const NoiseModel model = noise_model({1.0, 0.0, 1.0, 0.5});
    REQUIRE(model.terms.size() == 2);
    REQUIRE(model.terms[0].bath == "a_in");
    REQUIRE(model.terms[1].bath == "a_in_dag");
    REQUIRE(model.bath_corr.at({"a_in", "a_in_dag"}) == 1.5);
    REQUIRE(model.bath_corr.at({"a_in_dag", "a_in"}) == 0.5);
    REQUIRE(model.bath_corr.at({"a_in", "a_in"}) == 0.0);
    REQUIRE(model.bath_corr.at({"a_in_dag", "a_in_dag"}) == 0.0);

    // 2x2 commutator algebra: -[|g><g|, sigma+] = sigma+, -[|e><e|, sigma+] = -sigma+
    const auto& in_table = model.terms[0].table;
    REQUIRE((in_table[static_cast<std::size_t>(pair_index(0, 0, 2))] - sigma_plus()).norm() <
            1e-15);
    REQUIRE((in_table[static_cast<std::size_t>(pair_index(1, 1, 2))] + sigma_plus()).norm() <
            1e-15);
    // [|g><g|, sigma-] = sigma-
    const auto& dag_table = model.terms[1].table;
    REQUIRE((dag_table[static_cast<std::size_t>(pair_index(0, 0, 2))] - sigma_minus()).norm() <
            1e-15);
}

TEST_CASE("optical Bloch equations are reproduced componentwise") {
    const EmitterParams p{1.6, -0.8, 1.0, 0.4};
    const Liouvillian liou = emitter_liouvillian(p);
    Matrix r(2, 2);
    r << 0.55, Complex(0.12, -0.2), Complex(0.12, 0.2), 0.45;
    const Vector deriv = liou.mat * vec_pairs(r);

    const Complex rho_ge = r(0, 1);
    const double rho_ee = r(1, 1).real();
    const double rho_gg = r(0, 0).real();
    const double gamma_t = p.gamma * (2.0 * p.nbar + 1.0);

    const double d_ee = p.omega * rho_ge.imag() - p.gamma * (p.nbar + 1.0) * rho_ee +
                        p.gamma * p.nbar * rho_gg;
    const Complex d_ge = Complex(0.0, -0.5 * p.omega) * (rho_ee - rho_gg) -
                         Complex(gamma_t / 2.0, p.delta) * rho_ge;

    REQUIRE(std::abs(deriv(pair_index(1, 1, 2)) - Complex(d_ee, 0.0)) < 1e-12);
    REQUIRE(std::abs(deriv(pair_index(0, 1, 2)) - d_ge) < 1e-12);
}

TEST_CASE("steady state matches the Bloch formula across the parameter grid") {
    double worst = 0.0;
    for (double omega : {0.0, 0.5, 1.0, 2.0, 4.0})
        for (double delta : {-2.0, -0.5, 0.0, 1.0, 3.0})
            for (double nbar : {0.0, 0.5, 1.0}) {
                const DensityMatrix ss =
                    steady_state(emitter_liouvillian({omega, delta, 1.0, nbar}));
                worst = std::max(worst,
                                 std::abs(ss.mat(1, 1).real() -
                                          bloch_rho_ee(omega, delta, 1.0, nbar)));
            }
    REQUIRE(worst < 1e-9);
}
