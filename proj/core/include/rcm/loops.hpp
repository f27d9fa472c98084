#pragma once

#include <vector>

#include "rcm/lattice.hpp"
#include "rcm/model.hpp"

namespace rcm {

// Loop representation on the medial graph. Every medial edge is oriented with its primal
// vertex on the left. At the head of an edge the loop turns right across an open primal edge
// and left otherwise (closed edges and degree-2 stubs).
int next_medial_edge(const MedialGraph& g, const EdgeConfig& cfg, int m);
// +1 (left) or -1 (right): the turn taken at the head of m.
int turn_after(const MedialGraph& g, const EdgeConfig& cfg, int m);

// Partial-information variant: `revealed` flags primal edges whose state is known.
// Returns -1 when the successor depends on an unrevealed edge.
int next_medial_edge_partial(const MedialGraph& g, const EdgeConfig& cfg, const std::vector<char>& revealed, int m);

struct MedialPath {
    std::vector<int> edges;
    // turns[i] is the turn taken between edges[i] and edges[i+1] (cyclically for loops).
    std::vector<int> turns;
    bool closed = true;
};

struct LoopConfig {
    std::vector<MedialPath> paths;
    std::vector<int> path_of;   // medial edge -> index in paths
    std::vector<int> position;  // medial edge -> index inside its path

    int num_loops() const;
};

// Decomposition of the medial edges into loops. Medial vertices flagged in `cut` act as
// endpoints: traversal stops on entering one and paths start on leaving one.
LoopConfig trace_loops(const MedialGraph& g, const EdgeConfig& cfg, const std::vector<char>* cut = nullptr);
LoopConfig trace_loops(const EdgeConfig& cfg);

// Net number of quarter turns from edges[from] to edges[to] along the path (forward; loops wrap).
int quarter_turns(const MedialPath& path, int from, int to);

// Medial edges visited from `start` up to and including the first edge entering a cut vertex,
// or up to the edge before `start` when the walk closes.
std::vector<int> follow(const MedialGraph& g, const EdgeConfig& cfg, int start, const std::vector<char>* cut);

}  // namespace rcm
