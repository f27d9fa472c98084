#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rcm/coupling.hpp"
#include "rcm/lattice.hpp"
#include "rcm/model.hpp"

namespace rcm::coupling {

enum class FlowerKind { Inner, Outer };

struct Petal {
    bool primal = true;
    // Boundary vertices of the region from one endpoint to the next, counterclockwise.
    std::vector<Vertex> vertices;
};

// Region left unexplored by the interfaces started on one side of a box annulus, with its
// boundary cut into petals at the points where interfaces reach the other side.
struct FlowerDomain {
    FlowerKind kind = FlowerKind::Inner;
    // Radius of the box whose boundary carries the endpoints.
    int scale = 0;
    DomainPtr region;
    // a_1, ..., a_2k counterclockwise; petal j runs from endpoints[j] to endpoints[j+1].
    std::vector<Vertex> endpoints;
    // petals[0] is primal; tags alternate.
    std::vector<Petal> petals;
    // Edges revealed by the exploration (adjacent to or crossed by an explored interface).
    std::vector<std::pair<Vertex, Vertex>> explored;

    int num_petals() const { return static_cast<int>(petals.size()); }
};

// cfg lives on build_annulus(r, R) with r >= 1. Interfaces start on the outer boundary and the
// flower surrounds the inner box; none when no interface reaches the inner boundary.
std::optional<FlowerDomain> explore_inner_flower(const EdgeConfig& cfg);
// Mirror: interfaces start on the inner boundary, the flower is the part joined to the outside.
std::optional<FlowerDomain> explore_outer_flower(const EdgeConfig& cfg);

// From revealed edges only: Undetermined while some interface to explore still needs an
// unrevealed edge.
enum class FlowerStatus { Undetermined, Absent, Found };
FlowerStatus inner_flower_status(const EdgeConfig& cfg, const std::vector<char>& revealed);
FlowerStatus outer_flower_status(const EdgeConfig& cfg, const std::vector<char>& revealed);
// Stopping rule for couplings on an annulus; judged on omega' when use_upper is set.
StopRule stop_when_flower_found(FlowerKind kind, bool use_upper);

// Distinct endpoints are more than eta * scale apart (always true for eta <= 0).
bool well_separated(const FlowerDomain& f, double eta);
// Primal petals wired inside one class each, dual-petal vertices other than endpoints unwired.
bool coherent(const FlowerDomain& f, const BoundaryCondition& bc);
// There are coherent xi <= xi' with lo <= xi and xi' <= hi such that two primal petals are
// wired in xi' but not in xi. For coherent inputs this is the plain definition.
bool is_boosting_pair(const FlowerDomain& f, const BoundaryCondition& lo, const BoundaryCondition& hi);

struct DoubleFlower {
    FlowerDomain inner;
    FlowerDomain outer;
    // Outer petal matched to inner petal 0 (0 or 2).
    int rotation = 0;
};

// cfg on build_annulus(r, R): inner flower from sqrt(rR) to r and outer flower from sqrt(rR)
// to R, both 1/2-well-separated with four petals, matching primal petals joined by open paths
// and matching dual petals by dual paths outside both flowers.
std::optional<DoubleFlower> double_four_petal(const EdgeConfig& cfg);

// Radii (r, R) of a box annulus domain; throws for other domains.
std::pair<int, int> annulus_radii(const Domain& d);

}  // namespace rcm::coupling
