#include <cmath>
#include <random>

#include "doctest.h"
#include "rcm/flower.hpp"

using namespace rcm;
using namespace rcm::coupling;

namespace {

int ring(Vertex v) { return std::max(std::abs(v.x), std::abs(v.y)); }

void open_path(EdgeConfig& c, const std::vector<Vertex>& path) {
    const Domain& d = c.domain();
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const int e = d.find_edge(path[i], path[i + 1]);
        REQUIRE(e >= 0);
        c.set(e, true);
    }
}

std::vector<Vertex> ray(Vertex from, Vertex step, int n) {
    std::vector<Vertex> out;
    for (int i = 0; i <= n; ++i) out.push_back({from.x + i * step.x, from.y + i * step.y});
    return out;
}

void check_structure(const FlowerDomain& f) {
    REQUIRE(f.num_petals() % 2 == 0);
    REQUIRE(f.num_petals() == static_cast<int>(f.endpoints.size()));
    CHECK(f.petals.front().primal);
    for (int j = 0; j < f.num_petals(); ++j) {
        CHECK(f.petals[j].primal != f.petals[(j + 1) % f.num_petals()].primal);
        CHECK(ring(f.endpoints[j]) == f.scale);
        CHECK(f.petals[j].vertices.front() == f.endpoints[j]);
        CHECK(f.petals[j].vertices.back() == f.endpoints[(j + 1) % f.num_petals()]);
    }
}

}  // namespace

TEST_CASE("annulus radii") {
    CHECK(annulus_radii(build_annulus(2, 5)) == std::pair<int, int>{2, 5});
    CHECK_THROWS(annulus_radii(build_box(2)));
}

TEST_CASE("extreme configurations have no flower") {
    auto a = share(build_annulus(1, 3));
    CHECK(!explore_inner_flower(EdgeConfig::all_open(a)));
    CHECK(!explore_inner_flower(EdgeConfig::all_closed(a)));
    CHECK(!explore_outer_flower(EdgeConfig::all_open(a)));
    CHECK(!explore_outer_flower(EdgeConfig::all_closed(a)));
}

TEST_CASE("one primal and one dual crossing give two petals") {
    auto a = share(build_annulus(1, 4));
    EdgeConfig c(a);
    open_path(c, ray({1, 0}, {1, 0}, 3));
    for (auto f : {explore_inner_flower(c), explore_outer_flower(c)}) {
        REQUIRE(f);
        check_structure(*f);
        CHECK(f->num_petals() == 2);
        CHECK(f->petals[0].primal);
        CHECK(!f->petals[1].primal);
    }
    auto in = explore_inner_flower(c);
    CHECK(in->kind == FlowerKind::Inner);
    CHECK(in->scale == 1);
    CHECK(in->region->find_vertex({0, 0}) >= 0);
    auto out = explore_outer_flower(c);
    CHECK(out->scale == 4);
    CHECK(out->region->find_vertex({0, 0}) < 0);
}

TEST_CASE("two primal arms give a four-petal flower and a boosting pair") {
    auto a = share(build_annulus(1, 6));
    EdgeConfig c(a);
    open_path(c, ray({1, 0}, {1, 0}, 5));
    open_path(c, ray({-1, 0}, {-1, 0}, 5));
    auto f = explore_inner_flower(c);
    REQUIRE(f);
    check_structure(*f);
    REQUIRE(f->num_petals() == 4);
    CHECK(well_separated(*f, 0.0));
    const Domain& F = *f->region;
    auto build = [&](bool join) {
        std::vector<int> labels(F.num_vertices(), -1);
        for (int j : {0, 2})
            for (const auto& v : f->petals[j].vertices) labels[F.find_vertex(v)] = join ? 0 : j;
        return BoundaryCondition(F.num_vertices(), labels, std::nullopt);
    };
    auto separate = build(false), joined = build(true);
    CHECK(coherent(*f, separate));
    CHECK(coherent(*f, joined));
    CHECK(is_boosting_pair(*f, separate, joined));
    CHECK(!is_boosting_pair(*f, separate, separate));
    CHECK(!is_boosting_pair(*f, joined, separate));
    // Free lower boundary condition sits below a coherent one: boosting in the extended sense.
    CHECK(is_boosting_pair(*f, BoundaryCondition::free(F), joined));
    // Wiring a dual petal's interior is incoherent and rules out boosting.
    std::vector<int> bad(F.num_vertices(), -1);
    const auto& dual = f->petals[1].vertices;
    REQUIRE(dual.size() >= 4);
    bad[F.find_vertex(dual[1])] = bad[F.find_vertex(dual[2])] = 7;
    CHECK(!coherent(*f, BoundaryCondition(F.num_vertices(), bad, std::nullopt)));
    CHECK(!is_boosting_pair(*f, BoundaryCondition(F.num_vertices(), bad, std::nullopt), joined));
}

TEST_CASE("two-petal flowers are never boosting") {
    auto a = share(build_annulus(1, 4));
    EdgeConfig c(a);
    open_path(c, ray({1, 0}, {1, 0}, 3));
    auto f = explore_inner_flower(c);
    REQUIRE(f);
    const Domain& F = *f->region;
    CHECK(!is_boosting_pair(*f, BoundaryCondition::free(F), BoundaryCondition::wired(F)));
}

TEST_CASE("well-separation") {
    FlowerDomain f;
    f.scale = 8;
    f.endpoints = {{8, 0}, {-8, 0}};
    CHECK(well_separated(f, 0.5));
    f.endpoints = {{8, 0}, {8, 2}};  // distance eta R / 2 at eta = 1/2
    CHECK(!well_separated(f, 0.5));
    CHECK(well_separated(f, 0.0));
}

TEST_CASE("random annulus configurations give well-formed flowers") {
    std::mt19937_64 gen(11);
    int found_inner = 0, found_outer = 0;
    for (auto [r, R] : {std::pair{1, 4}, std::pair{2, 6}, std::pair{3, 9}}) {
        auto a = share(build_annulus(r, R));
        for (double p : {0.35, 0.5, 0.65}) {
            std::bernoulli_distribution coin(p);
            for (int trial = 0; trial < 150; ++trial) {
                EdgeConfig c(a);
                for (int e = 0; e < a->num_edges(); ++e) c.set(e, coin(gen));
                if (auto f = explore_inner_flower(c)) {
                    ++found_inner;
                    check_structure(*f);
                    CHECK(f->region->find_vertex({0, 0}) >= 0);
                }
                if (auto f = explore_outer_flower(c)) {
                    ++found_outer;
                    check_structure(*f);
                }
                std::vector<char> all(a->num_edges(), 1);
                CHECK((inner_flower_status(c, all) == FlowerStatus::Found) == explore_inner_flower(c).has_value());
            }
        }
    }
    CHECK(found_inner > 100);
    CHECK(found_outer > 100);
}

TEST_CASE("flower status from partial information") {
    auto a = share(build_annulus(1, 4));
    EdgeConfig c(a);
    open_path(c, ray({1, 0}, {1, 0}, 3));
    std::vector<char> revealed(a->num_edges(), 0);
    CHECK(inner_flower_status(c, revealed) == FlowerStatus::Undetermined);
    // Reveal edges from the outside in; the status settles once the interfaces are known and
    // never changes afterwards.
    std::vector<int> order(a->num_edges());
    for (int i = 0; i < a->num_edges(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        auto rx = ring(a->vertex(a->edge(x).u)) + ring(a->vertex(a->edge(x).v));
        auto ry = ring(a->vertex(a->edge(y).u)) + ring(a->vertex(a->edge(y).v));
        return rx != ry ? rx > ry : x < y;
    });
    int settled = -1;
    for (int i = 0; i < static_cast<int>(order.size()); ++i) {
        revealed[order[i]] = 1;
        auto s = inner_flower_status(c, revealed);
        if (s != FlowerStatus::Undetermined && settled < 0) settled = i;
        if (settled >= 0) CHECK(s == FlowerStatus::Found);
    }
    CHECK(settled >= 0);
    CHECK(settled < a->num_edges() - 1);

    // As a stopping rule inside a coupling state.
    CouplingState st(a, BoundaryCondition::free(*a), BoundaryCondition::free(*a));
    auto stop = stop_when_flower_found(FlowerKind::Inner, false);
    int fired = -1;
    for (int i = 0; i < static_cast<int>(order.size()) && fired < 0; ++i) {
        const bool v = c.open(order[i]);
        st.record({order[i], v, v, 0.0});
        if (stop(st)) fired = i;
    }
    CHECK(fired == settled);
}

TEST_CASE("double four-petal flower on a hand-built configuration") {
    // East and west wedges open, north and south closed: both flowers have four wide petals.
    auto a = share(build_annulus(2, 18));
    EdgeConfig c(a);
    auto wedge = [](Vertex v) { return std::abs(v.y) <= std::abs(v.x); };
    for (int e = 0; e < a->num_edges(); ++e)
        c.set(e, wedge(a->vertex(a->edge(e).u)) && wedge(a->vertex(a->edge(e).v)));
    auto df = double_four_petal(c);
    REQUIRE(df);
    CHECK(df->inner.num_petals() == 4);
    CHECK(df->outer.num_petals() == 4);
    CHECK(well_separated(df->inner, 0.5));
    CHECK(well_separated(df->outer, 0.5));
    CHECK(!double_four_petal(EdgeConfig::all_closed(a)));

    // Single-edge arms touch the inner ring at one vertex, so the primal petals are degenerate.
    EdgeConfig thin(a);
    open_path(thin, ray({2, 0}, {1, 0}, 16));
    open_path(thin, ray({-2, 0}, {-1, 0}, 16));
    CHECK(!double_four_petal(thin));
}
