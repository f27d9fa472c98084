#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "rcm/coupling.hpp"
#include "rcm/statistics.hpp"

using namespace rcm;
using namespace rcm::coupling;

namespace {

Domain four_cycle() { return build_rectangle(0, 0, 1, 1); }

std::uint64_t mask_of(const EdgeConfig& c) {
    std::uint64_t m = 0;
    for (int e = 0; e < c.num_edges(); ++e)
        if (c.open(e)) m |= std::uint64_t{1} << e;
    return m;
}

}  // namespace

TEST_CASE("conditional table on the four-cycle") {
    auto d = share(four_cycle());
    exact::ExactMeasure m(d, BoundaryCondition::free(*d), {0.5, 2.0, 0.0});
    ConditionalTable t(m);
    REQUIRE(t.tabulated());
    // Nothing revealed: the plain marginal, not the heat-bath formula.
    CHECK(1.0 - t.closed_probability(t.root(), 0) == doctest::Approx(28.0 / 82.0).epsilon(1e-14));
    // With three edges open the fourth cannot change the cluster count: it is open with probability p.
    auto idx = t.root();
    for (int e : {0, 1, 2}) idx = ConditionalTable::reveal(idx, e, true, t.powers());
    CHECK(1.0 - t.closed_probability(idx, 3) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS(t.closed_probability(idx, 0));
}

TEST_CASE("memoised scans agree with the table") {
    auto d = share(build_rectangle(0, 0, 2, 1));  // 7 edges
    exact::ExactMeasure m(d, BoundaryCondition::wired(*d), {0.4, 3.0, 0.0});
    ConditionalTable table(m), scan(m, 0);
    CHECK(table.tabulated());
    CHECK(!scan.tabulated());
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> order(d->num_edges());
        for (int i = 0; i < d->num_edges(); ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), gen);
        auto idx = table.root();
        for (int e : order) {
            CHECK(table.closed_probability(idx, e) == doctest::Approx(scan.closed_probability(idx, e)).epsilon(1e-12));
            idx = ConditionalTable::reveal(idx, e, gen() & 1, table.powers());
        }
    }
}

TEST_CASE("deterministic trees") {
    auto d = share(build_box(1));
    ExactCoupler c(d, BoundaryCondition::free(*d), BoundaryCondition::wired(*d), 0.5, 0.5, 2.0);
    auto id = deterministic_tree(*d);
    auto r = c.run(*id, 1);
    for (int i = 0; i < d->num_edges(); ++i) CHECK(r.order[i] == i);
    std::vector<int> rev(d->num_edges());
    for (int i = 0; i < d->num_edges(); ++i) rev[i] = d->num_edges() - 1 - i;
    auto back = deterministic_tree(*d, rev);
    CHECK(c.run(*back, 1).order == rev);
    CHECK_THROWS_AS(deterministic_tree(*d, {0, 1, 1}), std::invalid_argument);
    std::vector<int> dup = rev;
    dup[0] = dup[1];
    CHECK_THROWS_AS(deterministic_tree(*d, dup), std::invalid_argument);
}

TEST_CASE("coupling preconditions") {
    auto d = share(build_box(1));
    auto fr = BoundaryCondition::free(*d), wi = BoundaryCondition::wired(*d);
    CHECK_THROWS_AS(ExactCoupler(d, wi, fr, 0.5, 0.5, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(ExactCoupler(d, fr, wi, 0.6, 0.5, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(ExactCoupler(d, fr, wi, 0.5, 0.6, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(dynamics_coupling(d, wi, fr, 0.5, 0.5, 2.0, 1, 10), std::invalid_argument);
}

TEST_CASE("identical measures give identical configurations") {
    auto d = share(build_box(1));
    auto wi = BoundaryCondition::wired(*d);
    ExactCoupler c(d, wi, wi, 0.55, 0.55, 2.5);
    for (auto* make : {&boundary_cluster_tree, &dual_cluster_tree}) {
        auto tree = make(*d);
        for (std::uint64_t s = 0; s < 500; ++s) {
            auto r = c.run(*tree, s);
            REQUIRE(r.omega == r.omega_prime);
        }
    }
}

TEST_CASE("q = 1 couplings ignore the boundary condition") {
    auto d = share(build_box(1));
    ExactCoupler c(d, BoundaryCondition::free(*d), BoundaryCondition::wired(*d), 0.3, 0.3, 1.0);
    auto tree = deterministic_tree(*d);
    for (std::uint64_t s = 0; s < 500; ++s) {
        auto r = c.run(*tree, s);
        REQUIRE(r.omega == r.omega_prime);
    }
    // Distinct p: the standard monotone Bernoulli coupling.
    ExactCoupler c2(d, BoundaryCondition::free(*d), BoundaryCondition::free(*d), 0.3, 0.6, 1.0);
    for (std::uint64_t s = 0; s < 200; ++s) {
        auto r = c2.run(*tree, s);
        for (const auto& step : r.at_stop->history()) {
            CHECK(step.low == (step.uniform >= 0.7));
            CHECK(step.high == (step.uniform >= 0.4));
        }
    }
}

TEST_CASE("monotone coupling with exact marginals on the 3x3 box") {
    auto d = share(build_box(1));
    const double pc = ModelParams::critical_p(2.0);
    ExactCoupler c(d, BoundaryCondition::free(*d), BoundaryCondition::wired(*d), pc, pc, 2.0);
    const auto lo_truth = c.low_measure().primal_distribution();
    const auto hi_truth = c.high_measure().primal_distribution();
    auto tree = deterministic_tree(*d);
    const int runs = 100000;
    std::vector<std::int64_t> lo(lo_truth.size(), 0), hi(hi_truth.size(), 0);
    int violations = 0, unordered = 0;
    for (int s = 0; s < runs; ++s) {
        auto r = c.run(*tree, static_cast<std::uint64_t>(s));
        violations += r.monotonicity_violations;
        unordered += !leq(r.omega, r.omega_prime);
        ++lo[mask_of(r.omega)];
        ++hi[mask_of(r.omega_prime)];
    }
    CHECK(violations == 0);
    CHECK(unordered == 0);
    CHECK(chi_square_test(lo, lo_truth).p_value > 1e-3);
    CHECK(chi_square_test(hi, hi_truth).p_value > 1e-3);
}

TEST_CASE("boundary-cluster exploration with a closed upper configuration") {
    auto d = share(build_box(1));
    auto fr = BoundaryCondition::free(*d);
    ExactCoupler c(d, fr, fr, 1e-12, 1e-12, 2.0);
    auto tree = boundary_cluster_tree(*d);
    auto r = c.run(*tree, 5, stop_when_boundary_cluster_explored());
    REQUIRE(r.omega_prime.num_open() == 0);
    std::vector<int> touching;
    for (int e = 0; e < d->num_edges(); ++e)
        if (d->is_boundary(d->edge(e).u) || d->is_boundary(d->edge(e).v)) touching.push_back(e);
    // Every edge of the 3x3 box touches the boundary.
    CHECK(r.stop_time == static_cast<int>(touching.size()));
    for (std::size_t i = 0; i < touching.size(); ++i) CHECK(r.order[i] == touching[i]);

    auto big = share(build_box(2));
    auto fb = BoundaryCondition::free(*big);
    // Larger box: the stall happens once the boundary-incident edges are probed.
    CouplingState st(big, fb, fb);
    auto t2 = boundary_cluster_tree(*big);
    t2->reset();
    int probes = 0;
    auto stall = stop_when_boundary_cluster_explored();
    while (!stall(st)) {
        const int e = t2->next_edge(st);
        st.record({e, false, false, 0.0});
        ++probes;
    }
    int incident = 0;
    for (int e = 0; e < big->num_edges(); ++e)
        incident += big->is_boundary(big->edge(e).u) || big->is_boundary(big->edge(e).v);
    CHECK(probes == incident);
}

TEST_CASE("boundary-cluster coupling agrees off the explored cluster") {
    auto d = share(build_box(1));
    for (double q : {1.5, 2.0, 4.0}) {
        const double pc = ModelParams::critical_p(q);
        ExactCoupler c(d, BoundaryCondition::free(*d), BoundaryCondition::wired(*d), pc, pc, q);
        auto tree = boundary_cluster_tree(*d);
        auto stop = stop_when_boundary_cluster_explored();
        int disagreements = 0, violations = 0;
        // Centre-incident edges: disagreement frequency vs connection to the boundary in omega'.
        const int centre = d->find_vertex({0, 0});
        std::int64_t differ = 0, connected = 0;
        const int runs = 20000;
        for (int s = 0; s < runs; ++s) {
            auto r = c.run(*tree, static_cast<std::uint64_t>(s), stop);
            violations += r.monotonicity_violations;
            const auto& at = *r.at_stop;
            for (int e = 0; e < d->num_edges(); ++e)
                if (!at.revealed(e) && r.omega.open(e) != r.omega_prime.open(e)) ++disagreements;
            bool any_differ = false;
            for (int k = 0; k < 4; ++k) {
                const int e = d->incident_edge(centre, static_cast<Direction>(k));
                any_differ |= r.omega.open(e) != r.omega_prime.open(e);
            }
            differ += any_differ;
            bool joined = false;
            for (int b : d->boundary()) joined |= rcm::connected(r.omega_prime, centre, b);
            connected += joined;
        }
        CHECK(disagreements == 0);
        CHECK(violations == 0);
        const double pd = static_cast<double>(differ) / runs, pcn = static_cast<double>(connected) / runs;
        const double se = std::sqrt(pcn * (1 - pcn) / runs);
        CHECK(pd <= pcn + 3 * se);
    }
}

TEST_CASE("dual-cluster coupling agrees off the explored dual cluster") {
    auto d = share(build_box(1));
    const double pc = ModelParams::critical_p(2.0);
    ExactCoupler c(d, BoundaryCondition::free(*d), BoundaryCondition::wired(*d), pc, pc, 2.0);
    auto tree = dual_cluster_tree(*d);
    auto stop = stop_when_dual_cluster_explored();
    int disagreements = 0;
    for (int s = 0; s < 20000; ++s) {
        auto r = c.run(*tree, static_cast<std::uint64_t>(s), stop);
        for (int e = 0; e < d->num_edges(); ++e)
            if (!r.at_stop->revealed(e) && r.omega.open(e) != r.omega_prime.open(e)) ++disagreements;
    }
    CHECK(disagreements == 0);
}

TEST_CASE("induced boundary conditions stay ordered and the coincidence time is a stopping time") {
    auto d = share(build_box(1));
    const double pc = ModelParams::critical_p(2.0);
    ExactCoupler c(d, BoundaryCondition::free(*d), BoundaryCondition::wired(*d), pc, pc, 2.0);
    auto tree = boundary_cluster_tree(*d);
    int unordered = 0;
    StopRule watch = [&](const CouplingState& st) {
        unordered += !leq(st.xi(), st.xi_prime());
        return false;
    };
    for (int s = 0; s < 2000; ++s) c.run(*tree, static_cast<std::uint64_t>(s), watch);
    CHECK(unordered == 0);
    int stopped = 0, after_disagree = 0;
    for (int s = 0; s < 2000; ++s) {
        auto r = c.run(*tree, static_cast<std::uint64_t>(s), stop_when_coincide());
        REQUIRE(r.at_stop);
        if (r.stop_time < 0) continue;
        ++stopped;
        CHECK(r.at_stop->xi() == r.at_stop->xi_prime());
        for (int e = 0; e < d->num_edges(); ++e)
            after_disagree += !r.at_stop->revealed(e) && r.omega.open(e) != r.omega_prime.open(e);
    }
    CHECK(stopped > 0);
    CHECK(after_disagree == 0);
}

TEST_CASE("heat-bath grand coupling stays ordered") {
    auto d = share(build_box(3));
    const double pc = ModelParams::critical_p(2.0);
    auto r = dynamics_coupling(d, BoundaryCondition::free(*d), BoundaryCondition::wired(*d), pc, pc, 2.0, 9, 300);
    CHECK(r.monotonicity_violations == 0);
    CHECK(leq(r.omega, r.omega_prime));
    auto same = dynamics_coupling(d, BoundaryCondition::free(*d), BoundaryCondition::free(*d), 0.5, 0.5, 2.0, 9, 300);
    CHECK(same.coalescence > 0);
    CHECK(same.differing_edges == 0);
}
