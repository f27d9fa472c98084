#include <set>
#include <stdexcept>

#include "doctest.h"
#include "rcm/domain_io.hpp"
#include "rcm/lattice.hpp"
#include "rcm/model.hpp"

using namespace rcm;

TEST_CASE("box sizes") {
    for (int n : {0, 1, 2, 5}) {
        Domain d = build_box(n);
        CHECK(d.num_vertices() == (2 * n + 1) * (2 * n + 1));
        CHECK(d.num_edges() == 2 * (2 * n + 1) * 2 * n);
    }
    CHECK(build_box(1).boundary().size() == 8);
    CHECK_THROWS_AS(build_box(-1), std::invalid_argument);
}

TEST_CASE("edge order is row-major by lower-left endpoint, horizontal first") {
    Domain d = build_box(1);
    const auto& e0 = d.edge(0);
    CHECK(d.vertex(e0.u) == Vertex{-1, -1});
    CHECK(e0.orientation == Orientation::Horizontal);
    const auto& e1 = d.edge(1);
    CHECK(d.vertex(e1.u) == Vertex{-1, -1});
    CHECK(e1.orientation == Orientation::Vertical);
    for (int e = 1; e < d.num_edges(); ++e) {
        auto a = d.vertex(d.edge(e - 1).u), b = d.vertex(d.edge(e).u);
        CHECK((a < b || (a == b && d.edge(e - 1).orientation == Orientation::Horizontal)));
    }
}

TEST_CASE("annulus") {
    Domain a = build_annulus(1, 2);
    Domain b = build_box(2);
    CHECK(a.num_vertices() == b.num_vertices() - 1);
    CHECK(a.num_edges() == b.num_edges() - 4);
    CHECK(a.find_vertex({0, 0}) < 0);
    for (const auto& e : a.edges())
        CHECK(b.find_edge(a.vertex(e.u), a.vertex(e.v)) >= 0);
    CHECK(build_annulus(1, 3).num_vertices() == 48);
    CHECK_THROWS_AS(build_annulus(2, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_annulus(3, 2), std::invalid_argument);
}

TEST_CASE("domain validation") {
    CHECK_THROWS_AS(Domain({{0, 0}, {2, 0}}, {{{0, 0}, {2, 0}}}), std::invalid_argument);
    CHECK_THROWS_AS(Domain({{0, 0}, {1, 0}, {3, 0}}, {{{0, 0}, {1, 0}}}), std::invalid_argument);
    CHECK_THROWS_AS(Domain({{0, 0}}, {{{0, 0}, {1, 0}}}), std::invalid_argument);
    Domain single({{0, 0}, {1, 0}}, {{{1, 0}, {0, 0}}});
    CHECK(single.num_edges() == 1);
    CHECK(single.boundary().size() == 2);
}

TEST_CASE("serialization round trip is bit exact") {
    for (const Domain& d : {build_box(2), build_annulus(1, 3), build_rectangle(0, 0, 3, 1)}) {
        std::string text = domain_to_string(d);
        Domain back = domain_from_string(text);
        CHECK(back == d);
        CHECK(domain_to_string(back) == text);
    }
    CHECK_THROWS(domain_from_string("V 2 E 1\n0 0\n5 5\n0 1\n"));
    CHECK_THROWS(domain_from_string("X 1"));
    CHECK(parse_domain_spec("box:1") == build_box(1));
    CHECK(parse_domain_spec("rect:0:0:2:1") == build_rectangle(0, 0, 2, 1));
    CHECK_THROWS_AS(parse_domain_spec("box:x"), std::invalid_argument);
}

TEST_CASE("boundary conditions and their order") {
    Domain d = build_box(1);
    auto f = BoundaryCondition::free(d);
    auto w = BoundaryCondition::wired(d);
    CHECK(f.is_free());
    CHECK(!w.is_free());
    CHECK(leq(f, w));
    CHECK(!leq(w, f));
    CHECK(leq(w, w));
    auto partial = BoundaryCondition::from_partition(d, {{{-1, -1}, {1, -1}}});
    CHECK(leq(f, partial));
    CHECK(leq(partial, w));
    CHECK(!leq(w, partial));
    auto other = BoundaryCondition::from_partition(d, {{{-1, 1}, {1, 1}}});
    CHECK(!leq(partial, other));
    CHECK_THROWS_AS(BoundaryCondition::from_partition(d, {{{0, 0}}}), std::invalid_argument);
}

TEST_CASE("cluster count") {
    auto d = share(build_box(1));
    EdgeConfig empty(d);
    CHECK(cluster_count(empty, BoundaryCondition::free(*d)) == 9);
    CHECK(cluster_count(empty, BoundaryCondition::wired(*d)) == 2);
    auto full = EdgeConfig::all_open(d);
    CHECK(cluster_count(full, BoundaryCondition::free(*d)) == 1);
    CHECK(cluster_count(full, BoundaryCondition::wired(*d)) == 1);
    EdgeConfig ghosted(d, true);
    CHECK(cluster_count(ghosted, BoundaryCondition::free(*d)) == 10);
    CHECK(cluster_count(ghosted, BoundaryCondition::wired(*d, true)) == 2);
    CHECK(cluster_count(ghosted, BoundaryCondition::wired(*d, false)) == 3);
}

TEST_CASE("quads") {
    Quad q = make_rectangle_quad(0, 0, 2, 1);
    CHECK(q.cycle.size() == 6);
    auto ab = q.arc_vertices(0);
    REQUIRE(ab.size() == 2);
    CHECK(q.domain->vertex(ab[0]) == Vertex{2, 0});
    CHECK(q.domain->vertex(ab[1]) == Vertex{2, 1});
    auto sq = share(build_box(1));
    CHECK_THROWS_AS(make_quad(sq, {1, -1}, {1, -1}, {-1, 1}, {-1, -1}), std::invalid_argument);
    CHECK_THROWS_AS(make_quad(sq, {-1, 1}, {1, 1}, {1, -1}, {-1, -1}), std::invalid_argument);
    CHECK_THROWS_AS(make_quad(sq, {0, 0}, {1, 1}, {-1, 1}, {-1, -1}), std::invalid_argument);
    CHECK_THROWS_AS(boundary_cycle(build_rectangle(0, 0, 3, 0)), std::invalid_argument);
}

TEST_CASE("eta-regular quads") {
    const int R = 4;
    Quad box = make_rectangle_quad(-R, -R, R, R);
    CHECK(is_eta_regular(box, 1.0, R));
    Quad off = make_quad(box.domain, {R, -R}, {R, 1}, {-R, R}, {-R, -R});
    CHECK(!is_eta_regular(off, 1.0, R));
    const int n = 3;
    Quad rect = make_rectangle_quad(0, 0, 2 * n, n);
    CHECK(is_eta_regular(rect, 0.5, 2 * n));
    CHECK(!is_eta_regular(rect, 1.0 / 3.0, 2 * n));
    Quad outside = make_rectangle_quad(0, 0, 8, 4);
    CHECK(!is_eta_regular(outside, 0.5, 4));
}

TEST_CASE("dual domain") {
    CHECK(dual_p(ModelParams::critical_p(1), 1) == doctest::Approx(ModelParams::critical_p(1)).epsilon(1e-14));
    for (double q : {1.0, 2.0, 4.0})
        CHECK(std::abs(dual_p(ModelParams::critical_p(q), q) - ModelParams::critical_p(q)) < 1e-14);
    CHECK(dual_p(0.0, 2.0) == 1.0);
    CHECK(dual_p(0.5, 1.0) == 0.5);
    for (double q = 1.0; q <= 4.0; q += 0.25)
        for (double p = 0.01; p < 1.0; p += 0.07) CHECK(std::abs(dual_p(dual_p(p, q), q) - p) < 1e-12);

    Domain d = build_box(1);
    auto dual = dual_of(d);
    CHECK(dual.domain->num_edges() == d.num_edges());
    CHECK(dual.domain->num_vertices() == 4 + 8);
    for (int e = 0; e < d.num_edges(); ++e) CHECK(dual.dual_to_primal[dual.primal_to_dual[e]] == e);
    CHECK(dual.bc.num_classes() == 1);
    CHECK(dual.bc.classes()[0].size() == 8);
    CHECK_THROWS_AS(dual_of(build_annulus(1, 2)), std::invalid_argument);

    // Second dual: edges between interior vertices come back, shifted by (-1,-1).
    Domain big = build_box(2);
    auto d1 = dual_of(big);
    auto d2 = dual_of(*d1.domain);
    for (int e = 0; e < big.num_edges(); ++e) {
        int e2 = d2.primal_to_dual[d1.primal_to_dual[e]];
        const auto& pe = big.edge(e);
        if (big.degree(pe.u) < 4 || big.degree(pe.v) < 4) continue;
        const auto& de = d2.domain->edge(e2);
        Vertex a = d2.domain->vertex(de.u), b = d2.domain->vertex(de.v);
        CHECK(Vertex{a.x + 1, a.y + 1} == big.vertex(pe.u));
        CHECK(Vertex{b.x + 1, b.y + 1} == big.vertex(pe.v));
    }
}

TEST_CASE("medial graph") {
    auto single = share(Domain({{0, 0}, {1, 0}}, {{{0, 0}, {1, 0}}}));
    auto m1 = medial_of(single);
    int deg4 = 0, deg2 = 0;
    for (const auto& v : m1.vertices) (v.degree == 4 ? deg4 : deg2)++;
    CHECK(deg4 == 1);
    CHECK(deg2 == 6);
    CHECK(m1.num_edges() == 8);
    CHECK(m1.contour.size() == 4);

    auto box = share(build_box(1));
    auto m = medial_of(box);
    deg4 = deg2 = 0;
    for (const auto& v : m.vertices) (v.degree == 4 ? deg4 : deg2)++;
    CHECK(deg4 == 12);
    CHECK(deg2 == 12);
    CHECK(m.num_edges() == 36);
    CHECK(m.contour.size() == 16);
    CHECK(m.contour.size() % 2 == 0);
    for (int e : m.contour) {
        Vertex o = m.outward(e);
        CHECK(std::abs(o.x) == 1);
        CHECK(std::abs(o.y) == 1);
    }
    // Counterclockwise around every primal vertex: left turns only.
    for (int e = 0; e < m.num_edges(); ++e) {
        Vertex a = m.direction(e), b = m.direction((e & ~3) | ((e + 1) & 3));
        CHECK(a.x * b.y - a.y * b.x > 0);
    }
}
