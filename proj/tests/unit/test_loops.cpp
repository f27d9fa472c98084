#include <random>

#include "doctest.h"
#include "rcm/loops.hpp"

using namespace rcm;

namespace {

EdgeConfig random_config(DomainPtr d, std::mt19937_64& gen, double p) {
    std::bernoulli_distribution coin(p);
    EdgeConfig c(d);
    for (int e = 0; e < d->num_edges(); ++e) c.set(e, coin(gen));
    return c;
}

}  // namespace

TEST_CASE("loop counts at the two extreme configurations") {
    auto d = share(build_box(1));
    auto g = medial_of(d);
    // Open: one loop per bounded face plus the outer one. Closed: one loop per vertex.
    CHECK(trace_loops(g, EdgeConfig::all_open(d)).num_loops() == 5);
    CHECK(trace_loops(g, EdgeConfig::all_closed(d)).num_loops() == 9);
    auto ann = share(build_annulus(1, 2));
    CHECK(trace_loops(EdgeConfig::all_closed(ann)).num_loops() == ann->num_vertices());
}

TEST_CASE("every medial edge lies on exactly one loop and loops turn by a full circle") {
    std::mt19937_64 gen(7);
    for (auto d : {share(build_box(1)), share(build_box(2)), share(build_annulus(1, 3)),
                   share(Domain::induced({{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {0, 2}, {1, 2}}))}) {
        auto g = medial_of(d);
        int bad_cover = 0, bad_turns = 0;
        for (int trial = 0; trial < 10000; ++trial) {
            auto c = random_config(d, gen, 0.5);
            auto lc = trace_loops(g, c);
            std::vector<int> seen(g.num_edges(), 0);
            for (const auto& p : lc.paths) {
                for (int m : p.edges) ++seen[m];
                const int total = quarter_turns(p, 0, static_cast<int>(p.edges.size()) - 1) + p.turns.back();
                bad_turns += (total != 4 && total != -4);
            }
            for (int m = 0; m < g.num_edges(); ++m) bad_cover += seen[m] != 1;
        }
        CHECK(bad_cover == 0);
        CHECK(bad_turns == 0);
    }
}

TEST_CASE("loop successors follow the turning rule") {
    auto d = share(build_rectangle(0, 0, 1, 0));  // a single horizontal edge
    auto g = medial_of(d);
    EdgeConfig open = EdgeConfig::all_open(d);
    // Medial edge 3 of the left vertex runs from its south corner to the shared midpoint.
    CHECK(next_medial_edge(g, open, 4 * 0 + 3) == 4 * 1 + 2);
    CHECK(turn_after(g, open, 3) == -1);
    EdgeConfig closed(d);
    CHECK(next_medial_edge(g, closed, 3) == 0);
    CHECK(turn_after(g, closed, 3) == 1);
    std::vector<char> none(1, 0);
    CHECK(next_medial_edge_partial(g, open, none, 3) == -1);
    CHECK(next_medial_edge_partial(g, open, none, 0) == 1);  // stub corners need no information
}

TEST_CASE("cut vertices split loops into paths") {
    auto d = share(build_box(1));
    auto g = medial_of(d);
    std::vector<char> cut(g.vertices.size(), 0);
    for (std::size_t v = 0; v < g.vertices.size(); ++v) cut[v] = g.vertices[v].degree == 2;
    auto lc = trace_loops(g, EdgeConfig::all_closed(d), &cut);
    int open_paths = 0;
    for (const auto& p : lc.paths) {
        if (p.closed) continue;
        ++open_paths;
        CHECK(cut[g.tail(p.edges.front())]);
        CHECK(cut[g.head(p.edges.back())]);
    }
    CHECK(open_paths == 12);  // one per stub
    CHECK(lc.num_loops() == 1);  // the centre vertex
}
