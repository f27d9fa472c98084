#include <cmath>
#include <random>

#include "doctest.h"
#include "rcm/exact.hpp"
#include "rcm/flower.hpp"
#include "rcm/observables.hpp"

using namespace rcm;
using namespace rcm::observables;

namespace {

int ring(Vertex v) { return std::max(std::abs(v.x), std::abs(v.y)); }

EdgeConfig random_config(DomainPtr d, std::mt19937_64& gen, double p) {
    std::bernoulli_distribution coin(p);
    EdgeConfig c(d);
    for (int e = 0; e < d->num_edges(); ++e) c.set(e, coin(gen));
    return c;
}

void open_segment(EdgeConfig& c, Vertex a, Vertex b) {
    const Domain& d = c.domain();
    const Vertex step{(b.x > a.x) - (b.x < a.x), (b.y > a.y) - (b.y < a.y)};
    for (Vertex v = a; v != b; v = {v.x + step.x, v.y + step.y}) c.set(d.find_edge(v, {v.x + step.x, v.y + step.y}), true);
}

// Reference: BFS from the origin over open edges.
int reach(const EdgeConfig& c) {
    const Domain& d = c.domain();
    std::vector<char> seen(d.num_vertices(), 0);
    std::vector<int> stack{d.find_vertex({0, 0})};
    seen[stack.front()] = 1;
    int best = 0;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        best = std::max(best, ring(d.vertex(v)));
        for (int k = 0; k < 4; ++k) {
            const int e = d.incident_edge(v, static_cast<Direction>(k));
            if (e < 0 || !c.open(e)) continue;
            const int w = d.other_endpoint(e, v);
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    return best;
}

sampler::RunOptions run(std::int64_t budget, std::uint64_t seed, sampler::Algorithm algo) {
    sampler::RunOptions o;
    o.budget = budget;
    o.burn_in = 200;
    o.seed = seed;
    o.algo = algo;
    return o;
}

}  // namespace

TEST_CASE("box crossing") {
    auto d = share(build_box(1));
    CHECK(box_crossing_occurs(EdgeConfig::all_open(d), 1));
    CHECK(!box_crossing_occurs(EdgeConfig::all_closed(d), 1));
    EdgeConfig top(d);
    open_segment(top, {-1, 1}, {1, 1});
    CHECK(top.num_open() == 2);
    CHECK(box_crossing_occurs(top, 1));
}

TEST_CASE("circuits") {
    auto d = share(build_box(4));
    CHECK(circuit_occurs(EdgeConfig::all_open(d), 2));
    CHECK(!circuit_occurs(EdgeConfig::all_closed(d), 2));
    EdgeConfig c(d);
    open_segment(c, {-3, -3}, {3, -3});
    open_segment(c, {3, -3}, {3, 3});
    open_segment(c, {3, 3}, {-3, 3});
    open_segment(c, {-3, 3}, {-3, 0});
    CHECK(!circuit_occurs(c, 2));
    open_segment(c, {-3, 0}, {-3, -3});
    CHECK(circuit_occurs(c, 2));
    CHECK(!circuit_occurs(c, 1));  // radius 3 lies outside Ann(1, 2)
    CHECK(!arm_occurs(c, {{0}, 2, 4}));
    // A circuit on the inner ring itself still blocks dual arms.
    EdgeConfig inner(d);
    open_segment(inner, {-2, -2}, {2, -2});
    open_segment(inner, {2, -2}, {2, 2});
    open_segment(inner, {2, 2}, {-2, 2});
    open_segment(inner, {-2, 2}, {-2, -2});
    CHECK(circuit_occurs(inner, 2));
    CHECK(!arm_occurs(inner, {{0}, 2, 4}));
    CHECK(arm_occurs(inner, {{0}, 3, 4}));
}

TEST_CASE("arm events on hand-built configurations") {
    auto d = share(build_box(6));
    CHECK(arm_occurs(EdgeConfig::all_open(d), {{1}, 1, 6}));
    CHECK(!arm_occurs(EdgeConfig::all_open(d), {{1, 0, 1, 0}, 1, 6}));
    CHECK(arm_occurs(EdgeConfig::all_closed(d), {{0, 0, 0}, 1, 6}));
    CHECK_THROWS_AS(arm_occurs(EdgeConfig::all_open(d), {{}, 1, 6}), std::invalid_argument);
    CHECK_THROWS_AS(arm_occurs(EdgeConfig::all_open(d), {{1}, 6, 6}), std::invalid_argument);

    // Open left and right half-rows; the closed upper and lower halves carry the dual arms.
    EdgeConfig four(d);
    open_segment(four, {1, 0}, {6, 0});
    open_segment(four, {-1, 0}, {-6, 0});
    CHECK(arm_occurs(four, {{1, 0, 1, 0}, 1, 6}));
    CHECK(arm_occurs(four, {{0, 1, 0, 1}, 1, 6}));
    CHECK(arm_occurs(four, {{1, 1}, 1, 6}));
    CHECK(!arm_occurs(four, {{1, 1, 1}, 1, 6}));
    CHECK(!arm_occurs(four, {{1, 0, 1, 0, 1, 0}, 1, 6}));
    CHECK(arm_occurs(four, {{1, 0, 1}, 1, 6, true}));
    CHECK(!arm_occurs(four, {{1, 0, 1, 0}, 1, 6, true}));

    // A ladder: one cluster holding two disjoint crossings, which needs the flow capacity.
    EdgeConfig ladder(d);
    open_segment(ladder, {1, 0}, {6, 0});
    open_segment(ladder, {1, 1}, {6, 1});
    for (int x = 1; x <= 6; ++x) ladder.set(d->find_edge({x, 0}, {x, 1}), true);
    CHECK(arm_occurs(ladder, {{1, 1}, 1, 6}));
    CHECK(arm_occurs(ladder, {{1, 1, 0}, 1, 6}));
    CHECK(!arm_occurs(ladder, {{1, 1, 1}, 1, 6}));
    CHECK(arm_occurs(ladder, {{1, 0, 1}, 1, 6}));  // cyclically the same as 1, 1, 0
    CHECK(!arm_occurs(ladder, {{1, 0, 1, 0}, 1, 6}));
    EdgeConfig single(d);
    open_segment(single, {1, 0}, {6, 0});
    CHECK(!arm_occurs(single, {{1, 1}, 1, 6}));
}

TEST_CASE("arm events agree with independent references on random configurations") {
    std::mt19937_64 gen(5);
    auto box = share(build_box(5));
    auto ann = share(build_annulus(1, 5));
    int one_arm = 0, four_arm = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const double p = 0.35 + 0.3 * (trial % 7) / 6.0;
        auto c = random_config(box, gen, p);
        // One arm from the origin versus a plain BFS.
        for (int R = 1; R <= 5; ++R) CHECK(arm_occurs(c, {{1}, 0, R}) == (reach(c) >= R));
        one_arm += reach(c) >= 5;
        // Dual arm across Ann(n, 2n) versus the open circuit.
        CHECK(arm_occurs(c, {{0}, 2, 4}) != circuit_occurs(c, 2));

        // Alternating arms versus the number of crossing interfaces seen by the flower exploration.
        // Flower interfaces end at the stubs of the inner ring, which its corners lack; skip
        // configurations where a corner could carry an arm on its own.
        auto a = random_config(ann, gen, p);
        bool lone_corner = false;
        for (int sx : {-1, 1})
            for (int sy : {-1, 1})
                lone_corner = lone_corner || (!a.open(ann->find_edge({sx, sy}, {0, sy})) &&
                                              !a.open(ann->find_edge({sx, sy}, {sx, 0})));
        if (lone_corner) continue;
        auto f = coupling::explore_inner_flower(a);
        const int petals = f ? f->num_petals() : 0;
        for (int k = 1; k <= 3; ++k) {
            std::vector<int> sigma;
            for (int j = 0; j < k; ++j) sigma.insert(sigma.end(), {1, 0});
            CHECK(arm_occurs(a, {sigma, 1, 5}) == (petals >= 2 * k));
        }
        four_arm += petals >= 4;
    }
    CHECK(one_arm > 50);
    CHECK(four_arm > 50);
}

TEST_CASE("mixing rate estimators") {
    using sampler::Algorithm;
    // Independent edges: common random numbers make both chains identical.
    auto z = delta_hat(ModelParams{0.5, 1.0, 0.0}, 2, 5, run(2000, 3, Algorithm::ChayesMachta));
    CHECK(z.delta_R.mean == 0.0);
    CHECK(z.delta_rR.mean == 0.0);
    CHECK(z.delta_rR.std_error == 0.0);
    CHECK_THROWS_AS(delta_hat(ModelParams{0.5, 2.0, 0.0}, 3, 3, run(2000, 3, Algorithm::ChayesMachta)),
                    std::invalid_argument);

    const ModelParams mp{ModelParams::critical_p(2.0), 2.0, 0.0};
    auto d = share(build_box(1));
    const int e0 = d->find_edge({0, 0}, {1, 0});
    const double exact_delta = exact::event_probability(mp, d, BoundaryCondition::wired(*d), events::edge_open(e0)) -
                               exact::event_probability(mp, d, BoundaryCondition::free(*d), events::edge_open(e0));
    auto est = delta_edge(mp, 1, run(200000, 9, Algorithm::ChayesMachta));
    CHECK(std::abs(est.mean - exact_delta) < 4 * est.std_error + 1e-12);

    auto crn = delta_hat(mp, 1, 3, run(20000, 4, Algorithm::ChayesMachta));
    CHECK(crn.delta_rR.mean > -3 * crn.delta_rR.std_error);
    CHECK(crn.delta_rR.mean < 1.0);
    CHECK(crn.wired_crossing.mean >= crn.free_crossing.mean - 3 * crn.delta_rR.std_error);
}

TEST_CASE("characteristic length") {
    auto o = run(4000, 2, sampler::Algorithm::ChayesMachta);
    CHECK_THROWS_AS(characteristic_length(1.0, 0.4, 0.5, 16, o), std::invalid_argument);
    auto far = characteristic_length(1.0, 0.35, 0.05, 64, o);
    auto near = characteristic_length(1.0, 0.40, 0.05, 64, o);
    REQUIRE(far.L_hat);
    REQUIRE(near.L_hat);
    CHECK(*near.L_hat >= *far.L_hat);
    CHECK(!far.proxy);
    for (const auto& [R, e] : near.curve) {
        CHECK(e.mean >= 0.0);
        CHECK(e.mean <= 1.0);
    }
    auto supercritical = characteristic_length(1.0, 0.65, 0.05, 64, o);
    REQUIRE(supercritical.L_hat);
    CHECK(supercritical.curve.back().second.mean > 0.9);
}

TEST_CASE("cluster statistics against a direct Bernoulli simulation") {
    auto d = share(build_box(3));
    const double p = 0.5;
    auto stats = cluster_stats(ModelParams{p, 1.0, 0.0}, d, BoundaryCondition::free(*d),
                               run(40000, 21, sampler::Algorithm::ChayesMachta));
    // Reference: independent bond percolation with a separate generator.
    std::mt19937_64 gen(77);
    const int n = 40000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        auto c = random_config(d, gen, p);
        std::vector<char> seen(d->num_vertices(), 0);
        std::vector<int> stack{d->find_vertex({0, 0})};
        seen[stack.front()] = 1;
        int size = 0;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            ++size;
            for (int k = 0; k < 4; ++k) {
                const int e = d->incident_edge(v, static_cast<Direction>(k));
                if (e < 0 || !c.open(e)) continue;
                const int w = d->other_endpoint(e, v);
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
        sum += size;
        sum2 += static_cast<double>(size) * size;
    }
    const double ref = sum / n, ref_se = std::sqrt((sum2 / n - ref * ref) / n);
    CHECK(std::abs(stats.mean_size.mean - ref) <
          4 * std::hypot(stats.mean_size.std_error, ref_se));
    REQUIRE(stats.pi1.size() == 3);
    CHECK(stats.radius_distribution.size() == 4);
    double total = 0.0;
    for (double x : stats.radius_distribution) total += x;
    CHECK(total == doctest::Approx(1.0));

    auto sparse = cluster_stats(ModelParams{1e-9, 1.0, 0.0}, d, BoundaryCondition::free(*d),
                                run(2000, 1, sampler::Algorithm::ChayesMachta));
    CHECK(sparse.theta_proxy.mean == 0.0);
    CHECK(sparse.mean_size.mean == doctest::Approx(1.0));
    auto dense = cluster_stats(ModelParams{1 - 1e-9, 1.0, 0.0}, d, BoundaryCondition::free(*d),
                               run(2000, 1, sampler::Algorithm::ChayesMachta));
    CHECK(dense.pi1.front().mean == 1.0);
    CHECK(dense.phi(1.0) == 1);
}

TEST_CASE("ghost magnetization") {
    auto d = share(build_box(1));
    auto o = run(100000, 6, sampler::Algorithm::HeatBath);
    auto zero = ghost_magnetization(ModelParams{0.5, 2.0, 0.0}, d, BoundaryCondition::free(*d), o);
    CHECK(zero.mean == 0.0);
    CHECK(zero.std_error == 0.0);
    auto strong = ghost_magnetization(ModelParams{0.5, 2.0, 30.0}, d, BoundaryCondition::free(*d), run(2000, 6, sampler::Algorithm::HeatBath));
    CHECK(strong.mean == doctest::Approx(1.0));

    const ModelParams mp{ModelParams::critical_p(2.0), 2.0, 0.3};
    const int origin = d->find_vertex({0, 0});
    const double exact_m =
        exact::event_probability(mp, d, BoundaryCondition::free(*d), events::connected_to_ghost(origin));
    auto est = ghost_magnetization(mp, d, BoundaryCondition::free(*d), o);
    CHECK(std::abs(est.mean - exact_m) < 4 * est.std_error);
}

TEST_CASE("covariance sums") {
    const double p = 0.3;
    auto o = run(100000, 8, sampler::Algorithm::ChayesMachta);
    auto indep = covariance_sum_f2(ModelParams{p, 1.0, 0.0}, 2, o);
    CHECK(std::abs(indep.total.mean - p * (1 - p)) < 4 * indep.total.std_error);
    CHECK(!indep.note.empty());

    // Lambda_1 at q = 2 against exact covariances.
    const ModelParams mp{ModelParams::critical_p(2.0), 2.0, 0.0};
    auto d = share(build_box(1));
    const int e0 = d->find_edge({0, 0}, {1, 0});
    double exact_sum = 0.0;
    for (int f = 0; f < d->num_edges(); ++f)
        exact_sum += exact::covariance(mp, d, BoundaryCondition::free(*d), events::edge_open(e0), events::edge_open(f));
    auto est = covariance_sum(mp, d, BoundaryCondition::free(*d), e0, 2, o);
    CHECK(std::abs(est.total.mean - exact_sum) < 4 * est.total.std_error);
    for (std::size_t k = 1; k < est.shells.size(); ++k) CHECK(est.shells[k].mean > -3 * est.shells[k].std_error);
}
