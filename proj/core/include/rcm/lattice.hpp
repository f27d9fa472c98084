#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rcm {

struct Vertex {
    int x = 0;
    int y = 0;

    friend bool operator==(const Vertex&, const Vertex&) = default;
    // Row-major: y first, then x.
    friend std::strong_ordering operator<=>(const Vertex& a, const Vertex& b) {
        if (auto c = a.y <=> b.y; c != 0) return c;
        return a.x <=> b.x;
    }
};

enum class Direction : std::uint8_t { East = 0, North = 1, West = 2, South = 3 };

constexpr std::array<Vertex, 4> kSteps{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

inline Direction opposite(Direction d) { return static_cast<Direction>((static_cast<int>(d) + 2) % 4); }

enum class Orientation : std::uint8_t { Horizontal, Vertical };

// Endpoint u is the lower-left one.
struct Edge {
    int u = -1;
    int v = -1;
    Orientation orientation = Orientation::Horizontal;
};

struct BoundingBox {
    int x_min = 0, y_min = 0, x_max = -1, y_max = -1;
    int width() const { return x_max - x_min + 1; }
    int height() const { return y_max - y_min + 1; }
    bool contains(Vertex v) const { return v.x >= x_min && v.x <= x_max && v.y >= y_min && v.y <= y_max; }
};

// A finite connected subgraph of Z^2. Vertices are indexed in row-major order,
// edges by their lower-left endpoint (row-major) with horizontal before vertical.
class Domain {
public:
    Domain(std::vector<Vertex> vertices, const std::vector<std::pair<Vertex, Vertex>>& edges);

    // Subgraph spanned by all lattice edges between the given vertices.
    static Domain induced(std::vector<Vertex> vertices);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    const Vertex& vertex(int i) const { return vertices_[i]; }
    const Edge& edge(int e) const { return edges_[e]; }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }

    // -1 when absent.
    int find_vertex(Vertex v) const;
    int find_edge(Vertex a, Vertex b) const;
    int incident_edge(int v, Direction d) const { return incident_[4 * v + static_cast<int>(d)]; }
    int neighbor(int v, Direction d) const;
    int degree(int v) const { return degree_[v]; }
    int other_endpoint(int e, int v) const { return edges_[e].u == v ? edges_[e].v : edges_[e].u; }

    // Vertices of degree at most 3, row-major.
    const std::vector<int>& boundary() const { return boundary_; }
    bool is_boundary(int v) const { return degree_[v] <= 3; }
    const BoundingBox& bbox() const { return bbox_; }

    // True when every lattice edge between two domain vertices is a domain edge.
    bool is_induced() const;

    friend bool operator==(const Domain& a, const Domain& b);

private:
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::vector<int> incident_;
    std::vector<int> degree_;
    std::vector<int> boundary_;
    std::vector<int> grid_;
    BoundingBox bbox_;
};

using DomainPtr = std::shared_ptr<const Domain>;

inline DomainPtr share(Domain d) { return std::make_shared<const Domain>(std::move(d)); }

// Lambda_n = {-n..n}^2.
Domain build_box(int n);
// Lambda_R minus Lambda_{r-1}; requires 0 <= r < R.
Domain build_annulus(int r, int R);
// Induced subgraph on [x0,x1] x [y0,y1].
Domain build_rectangle(int x0, int y0, int x1, int y1);

// Translated copy.
Domain translate(const Domain& d, Vertex shift);

// Partition of the boundary (plus the ghost vertex) into wired classes.
// label[v] < 0 means v is not wired to anything.
class BoundaryCondition {
public:
    BoundaryCondition() = default;
    BoundaryCondition(int num_vertices, std::vector<int> labels, std::optional<int> ghost_label);

    static BoundaryCondition free(const Domain& d);
    // All boundary vertices in one class; the ghost joins it when wire_ghost is set.
    static BoundaryCondition wired(const Domain& d, bool wire_ghost = true);
    static BoundaryCondition from_partition(const Domain& d, const std::vector<std::vector<Vertex>>& classes,
                                            bool ghost_in_first_class = false);

    int num_vertices() const { return static_cast<int>(labels_.size()); }
    int label(int v) const { return labels_[v]; }
    std::optional<int> ghost_label() const { return ghost_label_; }
    int num_classes() const { return static_cast<int>(classes_.size()); }
    // Members of each class (domain vertex indices, ghost excluded).
    const std::vector<std::vector<int>>& classes() const { return classes_; }
    bool is_free() const;
    bool wired_together(int a, int b) const;

    // xi <= xi' in the refinement order: every class of xi lies inside a class of xi'.
    friend bool leq(const BoundaryCondition& a, const BoundaryCondition& b);
    friend bool operator==(const BoundaryCondition& a, const BoundaryCondition& b);

private:
    void normalize();
    std::vector<int> labels_;
    std::optional<int> ghost_label_;
    std::vector<std::vector<int>> classes_;
};

// Domain with four marked boundary vertices a, b, c, d in counterclockwise order.
struct Quad {
    DomainPtr domain;
    // Counterclockwise boundary cycle starting at the bottom-left vertex.
    std::vector<int> cycle;
    // Positions of a, b, c, d inside cycle.
    std::array<int, 4> marks{};

    // Boundary arc from mark i to mark (i+1)%4, endpoints included, as vertex indices.
    std::vector<int> arc_vertices(int i) const;
    int mark_vertex(int i) const { return cycle[marks[i]]; }
};

Quad make_quad(DomainPtr d, Vertex a, Vertex b, Vertex c, Vertex d_mark);
// a bottom-right, b top-right, c top-left, d bottom-left: (ab) and (cd) are the vertical sides.
Quad make_rectangle_quad(int x0, int y0, int x1, int y1);

// Counterclockwise outer boundary walk. Throws when the boundary is not a simple cycle.
std::vector<int> boundary_cycle(const Domain& d);

struct DualDomain {
    // Dual vertex (x, y) stands for the face with lower-left corner (x, y).
    DomainPtr domain;
    // primal_to_dual[e] = index of e* in domain; dual_to_primal inverse.
    std::vector<int> primal_to_dual;
    std::vector<int> dual_to_primal;
    // Dual vertices on the outer boundary (external faces of the primal collapsed).
    BoundaryCondition bc;
};

// Dual of a simply connected domain in which every bounded face is a unit square.
// Dual vertices: bounded faces plus the exterior unit faces touching a boundary edge.
DualDomain dual_of(const Domain& d);
// p* with p* p / ((1-p*)(1-p)) = q.
double dual_p(double p, double q);

// Cells of side eta*R (an integer) tiling the plane; returns the lower-left corners
// of cells intersecting d's bounding box.
std::vector<Vertex> eta_regular_cells(const Domain& d, double eta, int R);
bool is_eta_regular(const Domain& d, double eta, int R);
// Domain regularity plus all four marks on the (eta*R) grid.
bool is_eta_regular(const Quad& q, double eta, int R);

// Medial graph. Medial vertices sit at midpoints of lattice edges incident to the domain:
// domain edges give degree-4 vertices, the remaining lattice edges at a domain vertex
// give degree-2 stubs (one per domain vertex side, so prime ends are split).
struct MedialGraph {
    struct MedialVertex {
        int primal_edge = -1;  // >= 0 for degree-4 vertices
        int owner = -1;        // domain vertex owning a stub
        int degree = 4;
        Vertex doubled;        // position in doubled coordinates
    };
    DomainPtr domain;
    std::vector<MedialVertex> vertices;
    // corner_vertex[4*v + k]: medial vertex at corner k (E, N, W, S) of v's diamond.
    std::vector<int> corner_vertex;
    // Medial edge id 4*v + k runs from corner k to corner (k+1)%4 of v's diamond.
    int num_edges() const { return static_cast<int>(corner_vertex.size()); }
    int tail(int m) const { return corner_vertex[m]; }
    int head(int m) const { return corner_vertex[(m & ~3) | (((m & 3) + 1) & 3)]; }
    int owner(int m) const { return m >> 2; }
    // Direction of edge m in doubled coordinates.
    Vertex direction(int m) const;
    // Edges with exactly one degree-2 endpoint.
    std::vector<int> contour;
    bool in_contour(int m) const;
    // Unit vector collinear with a contour edge, pointing to its degree-2 end (doubled units).
    Vertex outward(int m) const;
};

MedialGraph medial_of(DomainPtr d);

}  // namespace rcm
