#include <cmath>

#include "doctest.h"
#include "rcm/exact.hpp"

using namespace rcm;
using namespace rcm::exact;

namespace {

DomainPtr single_edge() { return share(Domain({{0, 0}, {1, 0}}, {{{0, 0}, {1, 0}}})); }

}  // namespace

TEST_CASE("single edge partition function") {
    auto d = single_edge();
    ModelParams mp{0.5, 2.0, 0.0};
    CHECK(partition_function(mp, d, BoundaryCondition::free(*d)) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(event_probability(mp, d, BoundaryCondition::free(*d), events::edge_open(0)) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(partition_function(mp, d, BoundaryCondition::wired(*d)) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(event_probability(mp, d, BoundaryCondition::wired(*d), events::edge_open(0)) ==
          doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("four-cycle marginal against a hand count") {
    // Weights q^k with p = 1/2: Z = 16 + 32 + 24 + 8 + 2 = 82, open-edge mass 8 + 12 + 6 + 2 = 28.
    auto d = share(build_rectangle(0, 0, 1, 1));
    ExactMeasure m(d, BoundaryCondition::free(*d), {0.5, 2.0, 0.0});
    CHECK(m.partition_function() == doctest::Approx(82.0).epsilon(1e-13));
    for (double x : m.edge_marginals()) CHECK(x == doctest::Approx(28.0 / 82.0).epsilon(1e-13));
}

TEST_CASE("Bernoulli case") {
    auto d = share(build_box(1));
    for (double p : {0.2, 0.5, 0.9}) {
        ModelParams mp{p, 1.0, 0.0};
        CHECK(partition_function(mp, d, BoundaryCondition::free(*d)) ==
              doctest::Approx(std::pow(1.0 - p, -12)).epsilon(1e-12));
        ExactMeasure w(d, BoundaryCondition::wired(*d), mp);
        for (double x : w.edge_marginals()) CHECK(std::abs(x - p) < 1e-13);
        CHECK(std::abs(w.covariance(events::edge_open(0), events::edge_open(5))) < 1e-14);
    }
}

TEST_CASE("events, additivity and covariance sign") {
    auto d = share(build_box(1));
    ExactMeasure m(d, BoundaryCondition::free(*d), {ModelParams::critical_p(2.0), 2.0, 0.0});
    CHECK(m.probability(events::always()) == doctest::Approx(1.0).epsilon(1e-14));
    auto a = events::connected(0, 8);
    double pa = m.probability(a);
    double pc = m.probability([&](const EdgeConfig& c) { return !a(c); });
    CHECK(std::abs(pa + pc - 1.0) < 1e-14);
    CHECK(m.covariance(a, a) >= 0.0);
    CHECK(m.covariance(a, events::edge_open(3)) > 0.0);
}

TEST_CASE("conditional edge probability") {
    CHECK(conditional_edge_probability({0.3, 4.0, 0.0}, true) == 0.3);
    CHECK(conditional_edge_probability({0.3, 1.0, 0.0}, false) == doctest::Approx(0.3));
    CHECK(conditional_edge_probability({0.5, 2.0, 0.0}, false) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("enumeration cap") {
    auto d = share(build_box(2));
    CHECK_THROWS_AS(ExactMeasure(d, BoundaryCondition::free(*d), {0.5, 2.0, 0.0}), CapExceeded);
    auto b = share(build_box(1));
    CHECK_THROWS_AS(ExactMeasure(b, BoundaryCondition::free(*b), {0.5, 2.0, 0.2}, {20}), CapExceeded);
    CHECK_NOTHROW(ExactMeasure(b, BoundaryCondition::free(*b), {0.5, 2.0, 0.2}, {21}));
}

TEST_CASE("ghost field") {
    auto d = single_edge();
    // Two vertices, one edge, two ghost edges; brute force by hand for q = 2.
    ModelParams mp{0.5, 2.0, 0.5};
    double g = std::expm1(0.5);
    double z = 0.0;
    for (int o = 0; o < 2; ++o)
        for (int g0 = 0; g0 < 2; ++g0)
            for (int g1 = 0; g1 < 2; ++g1) {
                // vertices {0,1,ghost}
                int k = 3 - o - g0 - g1;
                if (o && g0 && g1) k = 1;
                z += std::pow(g, g0 + g1) * std::pow(2.0, k);
            }
    CHECK(partition_function(mp, d, BoundaryCondition::free(*d)) == doctest::Approx(z).epsilon(1e-13));
}

TEST_CASE("boost formula") {
    Quad q = make_rectangle_quad(0, 0, 2, 1);
    auto [lhs, rhs] = boost_formula_check({ModelParams::critical_p(2.0), 2.0, 0.0}, q);
    CHECK(std::abs(lhs - rhs) < 1e-12);
    auto [l1, r1] = boost_formula_check({0.4, 1.0, 0.0}, q);
    CHECK(std::abs(l1 - r1) < 1e-14);
    double base = 0.5, qq = 2.0;
    CHECK(qq * base / (1 + (qq - 1) * base) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("crossing duality") {
    for (auto rect : {std::array<int, 4>{0, 0, 1, 1}, {0, 0, 2, 1}, {0, 0, 1, 2}, {-1, -1, 1, 1}}) {
        Quad q = make_rectangle_quad(rect[0], rect[1], rect[2], rect[3]);
        for (double qq : {1.0, 2.0, 4.0})
            for (double p : {0.3, ModelParams::critical_p(qq), 0.7}) {
                auto [a, b] = crossing_duality_check({p, qq, 0.0}, q);
                CHECK(std::abs(a - b) < 1e-12);
            }
    }
}

TEST_CASE("spatial Markov property") {
    auto d = share(build_box(1));
    for (double h : {0.0, 0.2}) {
        ExactMeasure free(d, BoundaryCondition::free(*d), {0.4, 2.0, h});
        ExactMeasure wired(d, BoundaryCondition::wired(*d), {0.6, 1.5, h});
        std::vector<int> inner{0, 1, 2, 3, 4, 5};
        CHECK(spatial_markov_deviation(free, inner) < 1e-12);
        CHECK(spatial_markov_deviation(wired, inner) < 1e-12);
    }
}
