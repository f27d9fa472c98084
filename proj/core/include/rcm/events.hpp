#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "rcm/lattice.hpp"
#include "rcm/model.hpp"

namespace rcm {

using Event = std::function<bool(const EdgeConfig&)>;
using Observable = std::function<double(const EdgeConfig&)>;

// Reusable breadth-first search over open edges (no boundary wirings).
class OpenPathSearch {
public:
    explicit OpenPathSearch(const Domain& d);
    // True if some vertex of `from` reaches some vertex of `to` through open edges.
    // Vertices flagged in `blocked` are never expanded (they may still be endpoints).
    bool connects(const EdgeConfig& cfg, const std::vector<int>& from, const std::vector<int>& to,
                  const std::vector<char>* blocked = nullptr, bool dual = false);
    // Connection through open primal edges and open ghost edges.
    bool connects_to_ghost(const EdgeConfig& cfg, int from);

private:
    const Domain* d_;
    std::vector<unsigned> mark_;
    std::vector<unsigned> target_;
    unsigned stamp_ = 0;
    std::vector<int> queue_;
};

// (ab) <-> (cd) by open paths inside the quad.
bool crossing_occurs(const EdgeConfig& cfg, const Quad& quad);

// Rotated dual quad: dual paths from the exterior faces along (bc) to those along (da).
struct DualQuad {
    DualDomain dual;
    std::vector<int> bc_side;
    std::vector<int> da_side;
    std::vector<char> exterior;  // exterior dual vertices are endpoints only
};

DualQuad make_dual_quad(const Quad& quad);
// cfg is a configuration of the dual domain.
bool dual_crossing_occurs(const EdgeConfig& dual_cfg, const DualQuad& dq);
// Primal configuration mapped to omega*: e* open iff e closed.
EdgeConfig dual_configuration(const EdgeConfig& cfg, const DualDomain& dual);

namespace events {

Event edge_open(int e);
Event connected(int a, int b);
Event connected_to_ghost(int v);
Event crossing(const Quad& quad);
Event at_least_open(int k);
Event always();

}  // namespace events

}  // namespace rcm
