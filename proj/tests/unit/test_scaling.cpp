#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "rcm/rng.hpp"
#include "rcm/scaling.hpp"

using namespace rcm::scaling;

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using rcm::Philox;
    CHECK(Philox::with_key(0, 0)({0, 0, 0, 0}) == Philox::Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox::with_key(0xffffffff, 0xffffffff)({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}) ==
          Philox::Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox::with_key(0xa4093822, 0x299f31d0)({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}) ==
          Philox::Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("predicted exponents match tabulated columns") {
    auto e1 = predicted(1.0);
    CHECK(e1.kappa == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(e1.beta == doctest::Approx(5.0 / 36).epsilon(1e-13));
    CHECK(e1.nu == doctest::Approx(4.0 / 3).epsilon(1e-13));
    CHECK(e1.xi1 == doctest::Approx(5.0 / 48).epsilon(1e-13));
    CHECK(e1.gamma == doctest::Approx(43.0 / 18).epsilon(1e-13));
    CHECK(e1.delta == doctest::Approx(91.0 / 5).epsilon(1e-13));
    CHECK(e1.zeta == doctest::Approx(5.0 / 91).epsilon(1e-13));
    CHECK(e1.alpha == doctest::Approx(-2.0 / 3).epsilon(1e-13));
    CHECK(e1.xi4 == doctest::Approx(5.0 / 4).epsilon(1e-13));
    CHECK(!e1.iota);
    CHECK(!e1.get("iota"));

    auto e2 = predicted(2.0);
    CHECK(e2.kappa == doctest::Approx(16.0 / 3).epsilon(1e-14));
    CHECK(e2.beta == doctest::Approx(1.0 / 8).epsilon(1e-13));
    CHECK(e2.nu == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(*e2.iota == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(e2.xi1 == doctest::Approx(1.0 / 8).epsilon(1e-13));
    CHECK(e2.gamma == doctest::Approx(7.0 / 4).epsilon(1e-13));
    CHECK(e2.delta == doctest::Approx(15.0).epsilon(1e-13));
    CHECK(e2.eta == doctest::Approx(1.0 / 4).epsilon(1e-13));
    CHECK(std::abs(e2.alpha) < 1e-13);
    CHECK(e2.xi4 == doctest::Approx(35.0 / 24).epsilon(1e-13));

    auto e3 = predicted(3.0);
    CHECK(e3.kappa == doctest::Approx(24.0 / 5).epsilon(1e-13));
    CHECK(e3.nu == doctest::Approx(5.0 / 6).epsilon(1e-13));
    CHECK(*e3.iota == doctest::Approx(4.0 / 5).epsilon(1e-13));
    CHECK(e3.xi1 == doctest::Approx(2.0 / 15).epsilon(1e-13));
    CHECK(e3.xi4 == doctest::Approx(33.0 / 20).epsilon(1e-13));
    CHECK(e3.beta == doctest::Approx(1.0 / 9).epsilon(1e-13));

    auto e4 = predicted(4.0);
    CHECK(e4.kappa == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(*e4.iota == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(e4.nu == doctest::Approx(2.0 / 3).epsilon(1e-13));
    CHECK(e4.xi4 == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(e4.gamma == doctest::Approx(7.0 / 6).epsilon(1e-13));
    CHECK(e4.alpha == doctest::Approx(2.0 / 3).epsilon(1e-13));

    CHECK_THROWS_AS(predicted(0.0), std::invalid_argument);
    CHECK_THROWS_AS(predicted(4.5), std::invalid_argument);
    CHECK(predicted(0.5).kappa > 6.0);
}

TEST_CASE("scaling relations on the q grid") {
    double prev_kappa = 1e9;
    for (int i = 0; i <= 6; ++i) {
        const double q = 1.0 + 0.5 * i;
        auto e = predicted(q);
        auto rel = check_relations(e);
        CHECK(rel.size() == (q > 1.0 ? 7u : 6u));
        for (const auto& r : rel) CHECK_MESSAGE(std::abs(r.residual) < 1e-10, r.id << " at q=" << q);
        CHECK(e.kappa < prev_kappa);
        prev_kappa = e.kappa;
        if (q > 1.0) {
            CHECK(e.xi4 > *e.iota);
            CHECK(e.kappa >= 4.0);
            CHECK(e.kappa < 6.0);
        }
    }
    auto perturbed = predicted(2.0);
    perturbed.xi1 += 0.1;
    CHECK(check_relations(perturbed)[0].residual == doctest::Approx(-0.2));
    CHECK(check_relations(predicted(4.0)).back().id == "R7");
}

TEST_CASE("log-log exponent fits") {
    std::vector<ScalePoint> exact;
    for (double R : {4.0, 8.0, 16.0, 32.0, 64.0}) exact.push_back({R, std::pow(R, -0.125), 0.0});
    auto f = fit_exponent(exact);
    CHECK(f.n_points == 4);  // R = 4 is cut
    CHECK(f.slope == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(f.slope_std_error < 1e-12);
    CHECK(!f.weighted);

    std::vector<ScalePoint> flat{{8, 0.3, 0.01}, {16, 0.3, 0.01}, {32, 0.3, 0.01}};
    CHECK(std::abs(fit_exponent(flat).slope) < 1e-12);
    CHECK(fit_exponent(flat).weighted);

    CHECK_THROWS_AS(fit_exponent({{8, 0.3, 0.0}, {16, 0.0, 0.0}, {32, 0.1, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(fit_exponent({{4, 0.3, 0.0}, {8, 0.2, 0.0}, {16, 0.1, 0.0}}), std::invalid_argument);
    CHECK(fit_exponent({{4, 0.3, 0.0}, {8, 0.2, 0.0}, {16, 0.1, 0.0}}, {0.0}).n_points == 3);

    // Coverage of the 2-sigma interval on synthetic power laws with known relative noise.
    std::mt19937_64 gen(2024);
    const double truth = 5.0 / 48;
    int covered = 0;
    const int reps = 2000;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<ScalePoint> pts;
        for (double R : {8.0, 16.0, 32.0, 64.0}) {
            const double rel = 0.02 * std::sqrt(R / 8.0);
            std::normal_distribution<double> noise(0.0, rel);
            const double y = 0.9 * std::pow(R, -truth) * std::exp(noise(gen));
            pts.push_back({R, y, rel * y});
        }
        auto fit = fit_exponent(pts);
        covered += std::abs(fit.slope - truth) <= 2.0 * fit.slope_std_error;
    }
    const double rate = static_cast<double>(covered) / reps;
    CHECK(rate > 0.94);
    CHECK(rate < 0.97);
}

TEST_CASE("comparison rows") {
    CHECK(exponent_of_observable("pi1") == "xi1");
    CHECK(exponent_of_observable("delta") == "iota");
    CHECK(!exponent_of_observable("theta"));
    FitResult fit;
    fit.slope = 0.12;
    fit.slope_std_error = 0.01;
    fit.n_points = 4;
    auto row = compare("xi1", 2.0, fit);
    CHECK(row.predicted == doctest::Approx(0.125));
    CHECK(row.n_scales == 4);
    CHECK_THROWS_AS(compare("iota", 1.0, fit), std::invalid_argument);
}
