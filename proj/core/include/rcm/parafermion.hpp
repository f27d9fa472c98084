#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "rcm/exact.hpp"
#include "rcm/loops.hpp"
#include "rcm/statistics.hpp"

namespace rcm::parafermion {

// Lattice neighbour x' of a boundary vertex x lying in the infinite component of Z^2 minus
// the domain; the lexicographically smallest (x, then y) when several exist.
// Throws std::invalid_argument when x has none.
Vertex exterior_neighbor(const Domain& d, int x);

// First medial edge of x's diamond met when going clockwise around it from the corner facing x'.
int root_medial_edge(const MedialGraph& g, int x);

// Loop through the root medial edge, in its natural orientation (open edges on its left).
// quarter_turns[j] is the winding from edges[j] to edges[0] in units of pi/2; edges[0] is e_x.
struct ExplorationPath {
    std::vector<int> edges;
    std::vector<int> quarter_turns;
    int total_turns = 0;  // net turns around the whole loop (+-4)

    // Position of medial edge m on the path, or -1.
    int index_of(int m) const;
};

ExplorationPath exploration_path(const MedialGraph& g, const EdgeConfig& cfg, int x);

// Winding W(e, e_x) in radians, e must lie on the path.
double winding(const ExplorationPath& gamma, int m);

// Boundary vertices with exactly two opposite neighbours, which the identities below exclude.
std::vector<int> straight_boundary_vertices(const Domain& d);

struct BoundaryTerm {
    int vertex = -1;
    int degree = 0;
    bool touches_infinite_component = false;
    double prob_passes = 0.0;     // phi[A(x, y)]
    double prob_connected = 0.0;  // phi[x <-> y]
    // Sum of eta(e) F(e) over the contour edges of y's diamond, divided by the unit direction
    // of e_x.
    std::complex<double> contour;
};

struct ObservableValue {
    DomainPtr domain;
    MedialGraph medial;
    ModelParams params;
    int root = -1;
    int root_edge = -1;
    std::vector<std::complex<double>> F;  // indexed by medial edge
    std::vector<BoundaryTerm> boundary;   // one entry per boundary vertex, row-major
};

// F(e) = phi^0[W e^{iW} 1(e in gamma)] at q = 4 by full enumeration under free boundary
// conditions. Windings are exact multiples of pi/2, so phases are accumulated per residue
// class. Throws std::invalid_argument for non-induced domains or straight boundary vertices,
// exact::CapExceeded above the enumeration cap.
ObservableValue observable_exact(DomainPtr d, int x, double p = 2.0 / 3.0, exact::EnumerationOptions opt = {});

struct VertexResidual {
    int medial_vertex = -1;
    Vertex doubled;
    double residual = 0.0;  // |sum_i eta(e_i) F(e_i)|
};

// Residuals of the vertex relation at every degree-4 medial vertex.
std::vector<VertexResidual> vertex_residuals(const ObservableValue& obs);
double max_vertex_residual(const ObservableValue& obs);

struct BoundaryIdentity {
    // sum over all contour edges of eta(e) F(e); vanishes when the vertex relation holds.
    std::complex<double> contour_total;
    // Same sum restricted to boundary vertices other than the root: 3 pi / 2 for a root of degree 3.
    std::complex<double> winding_sum;
    // sum_{y != x} (4 - d_y) phi[A(x, y)]
    double probability_sum = 0.0;
    // Largest |phi[A(x,y)] - phi[x <-> y]| over y with an exterior neighbour in the infinite component.
    double connection_mismatch = 0.0;
};

BoundaryIdentity boundary_identity(const ObservableValue& obs);

// Lambda_R minus H. `hole` lists the vertices of H.
Domain topological_annulus(int R, const std::vector<Vertex>& hole);
// Checks that d = Lambda_R \ H with H simply connected and Lambda_{R/8} in H in Lambda_{R/4}.
bool is_topological_annulus(const Domain& d, int R);
// Boundary vertices not on the outer square.
std::vector<int> inner_boundary(const Domain& d, int R);

struct NOmegaOptions {
    std::int64_t budget = 20000;
    std::int64_t burn_in = -1;
    std::uint64_t seed = 1;
};

// Monte Carlo estimate of sum_{y in inner boundary} phi^0[y <-> boundary of Lambda_{R/2}].
Estimate N_Omega_estimate(DomainPtr omega, int R, const ModelParams& params, const NOmegaOptions& opt);

}  // namespace rcm::parafermion
