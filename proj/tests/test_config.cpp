#include <catch2/catch_amalgamated.hpp>

#include "otoc/config.hpp"

using namespace otoc;

TEST_CASE("basic key parsing with comments") {
    const RunConfig cfg = parse_config(
        "# comment line\n"
        "omega = 2.0\n"
        "delta = 0.25  # trailing comment\n"
        "nbar = 1\n"
        "\n"
        "T = 1.5\n");
    REQUIRE(cfg.emitter.omega == 2.0);
    REQUIRE(cfg.emitter.delta == 0.25);
    REQUIRE(cfg.emitter.nbar == 1.0);
    REQUIRE(cfg.delay == 1.5);
    REQUIRE(cfg.precision == 12);
}

TEST_CASE("beamsplitter partner coefficients derive from unitarity") {
    const RunConfig cfg = parse_config("t1 = 0.8\n");
    REQUIRE(cfg.t1 == 0.8);
    REQUIRE(cfg.r1 == Catch::Approx(0.6).margin(1e-15));
    REQUIRE(cfg.t2 == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-15));

    const RunConfig cfg2 = parse_config("r2 = 0.6\n");
    REQUIRE(cfg2.t2 == Catch::Approx(0.8).margin(1e-15));

    REQUIRE_THROWS_MATCHES(parse_config("t1 = 0.8\nr1 = 0.7\n"), ConfigError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("must equal 1")));
}

TEST_CASE("errors carry line numbers and name the violated invariant") {
    REQUIRE_THROWS_MATCHES(
        parse_config("omega = 1\nmystery = 2\n"), ConfigError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("line 2") &&
                                        Catch::Matchers::ContainsSubstring("mystery")));
    REQUIRE_THROWS_MATCHES(
        parse_config("omega = abc\n"), ConfigError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("malformed")));
    REQUIRE_THROWS_MATCHES(
        parse_config("nbar = -1\n"), ConfigError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("nbar") &&
                                        Catch::Matchers::ContainsSubstring(">= 0")));
    REQUIRE_THROWS_MATCHES(
        parse_config("precision = 3\n"), ConfigError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("precision")));
    REQUIRE_THROWS_MATCHES(
        parse_config("tau_step = -0.1\n"), ConfigError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("tau_step")));
}

TEST_CASE("detector, noise, schedule and oracle keys") {
    const RunConfig cfg = parse_config(
        "detector = A-minus-B\n"
        "noise = off\n"
        "schedule = sp@1.0, sp@0.0, sm@1.0, sm@0.0\n"
        "oracle_dt = 0.08, 0.04, 0.02\n");
    REQUIRE(cfg.detector == DetectorMode::AMinusB);
    REQUIRE(cfg.noise == NoiseMode::Off);
    REQUIRE(cfg.schedule.size() == 4);
    REQUIRE(cfg.schedule[0].time == 1.0);
    REQUIRE((cfg.schedule[0].op - sigma_plus()).norm() == 0.0);
    REQUIRE(cfg.oracle_dts == std::vector<double>{0.08, 0.04, 0.02});

    REQUIRE_THROWS_AS(parse_config("detector = C\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_config("schedule = sp\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_config("schedule = qq@1.0\n"), ConfigError);
}

TEST_CASE("presets parse and carry the figure parameter sets") {
    for (const auto& [name, text] : presets()) REQUIRE_NOTHROW(parse_config(text));

    const RunConfig fig4 = parse_config(presets().at("fig4"));
    REQUIRE(fig4.emitter.omega == 2.0);
    REQUIRE(fig4.emitter.nbar == 0.0);
    REQUIRE(fig4.tau_grid.points() == 41);
    REQUIRE(fig4.T_grid.points() == 41);

    const RunConfig fig5 = parse_config(presets().at("fig5"));
    REQUIRE(fig5.emitter.nbar == 1.0);
    REQUIRE(fig5.emitter.omega == 0.0);
    REQUIRE(fig5.delay == 1.0);

    const RunConfig caption = parse_config(presets().at("fig3-caption"));
    REQUIRE(caption.emitter.omega == 3.0);
}

TEST_CASE("csv emission is deterministic with the pinned schema") {
    RunConfig cfg = parse_config("omega = 2.0\n");
    std::vector<G2Result> rows(2);
    rows[0] = {0.0, 1.0, 0.011026, 0.011020, 0.5, 1e-14};
    rows[1] = {0.1, 1.0, 0.012345678901234, 0.0123, 0.55, 1e-14};
    const std::string a = g2_csv(cfg, rows);
    const std::string b = g2_csv(cfg, rows);
    REQUIRE(a == b);
    REQUIRE(a.find("tau,T,g2_raw,g2_no_noise,g2_normalized\n") != std::string::npos);
    REQUIRE(a.find("# omega = 2\n") != std::string::npos);
    REQUIRE(a.find("\r") == std::string::npos);

    const std::string diff = noise_diff_csv(cfg, rows);
    REQUIRE(diff.find("tau,T,noise_diff\n") != std::string::npos);
}

TEST_CASE("overlay parsing keeps per-file line numbers") {
    const RunConfig base = parse_config(presets().at("fig4"));
    const RunConfig cfg = parse_config("omega = 1.5\ntau_max = 2.0\n", base);
    REQUIRE(cfg.emitter.omega == 1.5);
    REQUIRE(cfg.emitter.nbar == 0.0);       // inherited from the preset
    REQUIRE(cfg.tau_grid.max == 2.0);
    REQUIRE(cfg.T_grid.points() == 41);     // inherited

    REQUIRE_THROWS_MATCHES(
        parse_config("nbar = -1\n", base), ConfigError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("line 1")));
}

TEST_CASE("grid expansion endpoints") {
    const RunConfig cfg = parse_config("tau_min = 0\ntau_max = 4\ntau_step = 0.1\n");
    const auto values = cfg.tau_grid.values();
    REQUIRE(values.size() == 41);
    REQUIRE(values.front() == 0.0);
    REQUIRE(values.back() == Catch::Approx(4.0).margin(1e-12));
}
