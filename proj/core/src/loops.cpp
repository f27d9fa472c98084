#include "rcm/loops.hpp"

#include <stdexcept>

namespace rcm {

namespace {

// Successor and turn given the state of the primal edge at the head corner (or a stub).
inline int step(const MedialGraph& g, int m, bool open) {
    const int v = g.owner(m);
    const int c = ((m & 3) + 1) & 3;
    if (!open) return 4 * v + c;
    const int w = g.domain->neighbor(v, static_cast<Direction>(c));
    return 4 * w + ((c + 2) & 3);
}

inline int head_edge(const MedialGraph& g, int m) {
    const auto& mv = g.vertices[g.head(m)];
    return mv.degree == 4 ? mv.primal_edge : -1;
}

}  // namespace

int next_medial_edge(const MedialGraph& g, const EdgeConfig& cfg, int m) {
    const int e = head_edge(g, m);
    return step(g, m, e >= 0 && cfg.open(e));
}

int turn_after(const MedialGraph& g, const EdgeConfig& cfg, int m) {
    const int e = head_edge(g, m);
    return (e >= 0 && cfg.open(e)) ? -1 : 1;
}

int next_medial_edge_partial(const MedialGraph& g, const EdgeConfig& cfg, const std::vector<char>& revealed, int m) {
    const int e = head_edge(g, m);
    if (e >= 0 && !revealed[e]) return -1;
    return step(g, m, e >= 0 && cfg.open(e));
}

int LoopConfig::num_loops() const {
    int n = 0;
    for (const auto& p : paths) n += p.closed ? 1 : 0;
    return n;
}

std::vector<int> follow(const MedialGraph& g, const EdgeConfig& cfg, int start, const std::vector<char>* cut) {
    std::vector<int> out;
    int m = start;
    do {
        out.push_back(m);
        if (cut && (*cut)[g.head(m)]) break;
        m = next_medial_edge(g, cfg, m);
    } while (m != start);
    return out;
}

LoopConfig trace_loops(const MedialGraph& g, const EdgeConfig& cfg, const std::vector<char>* cut) {
    if (&cfg.domain() != g.domain.get() && !(cfg.domain() == *g.domain))
        throw std::invalid_argument("configuration and medial graph live on different domains");
    const int n = g.num_edges();
    LoopConfig lc;
    lc.path_of.assign(n, -1);
    lc.position.assign(n, -1);

    auto record = [&](std::vector<int> edges, bool closed) {
        MedialPath p;
        p.closed = closed;
        p.turns.resize(edges.size());
        for (std::size_t i = 0; i < edges.size(); ++i) p.turns[i] = turn_after(g, cfg, edges[i]);
        const int id = static_cast<int>(lc.paths.size());
        for (std::size_t i = 0; i < edges.size(); ++i) {
            lc.path_of[edges[i]] = id;
            lc.position[edges[i]] = static_cast<int>(i);
        }
        p.edges = std::move(edges);
        lc.paths.push_back(std::move(p));
    };

    // Open paths first: they start on edges leaving a cut vertex.
    if (cut) {
        for (int m = 0; m < n; ++m)
            if ((*cut)[g.tail(m)] && lc.path_of[m] < 0) record(follow(g, cfg, m, cut), false);
    }
    for (int m = 0; m < n; ++m)
        if (lc.path_of[m] < 0) record(follow(g, cfg, m, nullptr), true);
    return lc;
}

LoopConfig trace_loops(const EdgeConfig& cfg) {
    MedialGraph g = medial_of(cfg.domain_ptr());
    return trace_loops(g, cfg);
}

int quarter_turns(const MedialPath& path, int from, int to) {
    const int n = static_cast<int>(path.edges.size());
    int total = 0;
    for (int i = from; i != to; i = (i + 1) % n) {
        if (!path.closed && i == n - 1) throw std::out_of_range("winding past the end of an open path");
        total += path.turns[i];
    }
    return total;
}

}  // namespace rcm
