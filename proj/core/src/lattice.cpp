#include "rcm/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

#include "rcm/union_find.hpp"

namespace rcm {

namespace {

Vertex add(Vertex a, Vertex b) { return {a.x + b.x, a.y + b.y}; }

std::pair<Vertex, Vertex> normalized(Vertex a, Vertex b) {
    if (b < a) std::swap(a, b);
    return {a, b};
}

}  // namespace

Domain::Domain(std::vector<Vertex> vertices, const std::vector<std::pair<Vertex, Vertex>>& edges)
    : vertices_(std::move(vertices)) {
    std::sort(vertices_.begin(), vertices_.end());
    vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());
    if (vertices_.empty()) throw std::invalid_argument("domain must have at least one vertex");

    bbox_ = {vertices_.front().x, vertices_.front().y, vertices_.front().x, vertices_.front().y};
    for (const auto& v : vertices_) {
        bbox_.x_min = std::min(bbox_.x_min, v.x);
        bbox_.x_max = std::max(bbox_.x_max, v.x);
        bbox_.y_min = std::min(bbox_.y_min, v.y);
        bbox_.y_max = std::max(bbox_.y_max, v.y);
    }
    grid_.assign(static_cast<std::size_t>(bbox_.width()) * bbox_.height(), -1);
    for (int i = 0; i < num_vertices(); ++i) {
        const auto& v = vertices_[i];
        grid_[static_cast<std::size_t>(v.y - bbox_.y_min) * bbox_.width() + (v.x - bbox_.x_min)] = i;
    }

    // Sort key: lower-left endpoint row-major, horizontal before vertical.
    std::vector<std::tuple<int, int, int, int>> keyed;
    keyed.reserve(edges.size());
    for (const auto& [a0, b0] : edges) {
        auto [a, b] = normalized(a0, b0);
        if (std::abs(a.x - b.x) + std::abs(a.y - b.y) != 1)
            throw std::invalid_argument("edge endpoints must be nearest neighbours");
        int ia = find_vertex(a), ib = find_vertex(b);
        if (ia < 0 || ib < 0) throw std::invalid_argument("edge endpoint outside the vertex set");
        int orient = (a.y == b.y) ? 0 : 1;
        keyed.emplace_back(a.y, a.x, orient, ib);
    }
    std::sort(keyed.begin(), keyed.end());
    keyed.erase(std::unique(keyed.begin(), keyed.end()), keyed.end());

    incident_.assign(4 * vertices_.size(), -1);
    degree_.assign(vertices_.size(), 0);
    edges_.reserve(keyed.size());
    for (const auto& [y, x, orient, ib] : keyed) {
        int ia = find_vertex({x, y});
        Edge e{ia, ib, orient == 0 ? Orientation::Horizontal : Orientation::Vertical};
        int id = static_cast<int>(edges_.size());
        edges_.push_back(e);
        Direction out = orient == 0 ? Direction::East : Direction::North;
        incident_[4 * ia + static_cast<int>(out)] = id;
        incident_[4 * ib + static_cast<int>(opposite(out))] = id;
        ++degree_[ia];
        ++degree_[ib];
    }

    UnionFind uf(num_vertices());
    for (const auto& e : edges_) uf.unite(e.u, e.v);
    if (uf.components() != 1) throw std::invalid_argument("domain must be connected");

    for (int i = 0; i < num_vertices(); ++i)
        if (degree_[i] <= 3) boundary_.push_back(i);
}

Domain Domain::induced(std::vector<Vertex> vertices) {
    std::set<Vertex> present(vertices.begin(), vertices.end());
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (const auto& v : present) {
        for (Vertex step : {Vertex{1, 0}, Vertex{0, 1}}) {
            Vertex w = add(v, step);
            if (present.count(w)) edges.emplace_back(v, w);
        }
    }
    return Domain(std::move(vertices), edges);
}

int Domain::find_vertex(Vertex v) const {
    if (!bbox_.contains(v)) return -1;
    return grid_[static_cast<std::size_t>(v.y - bbox_.y_min) * bbox_.width() + (v.x - bbox_.x_min)];
}

int Domain::find_edge(Vertex a, Vertex b) const {
    int ia = find_vertex(a);
    if (ia < 0) return -1;
    for (int k = 0; k < 4; ++k)
        if (add(a, kSteps[k]) == b) return incident_[4 * ia + k];
    return -1;
}

int Domain::neighbor(int v, Direction d) const {
    int e = incident_edge(v, d);
    return e < 0 ? -1 : other_endpoint(e, v);
}

bool Domain::is_induced() const {
    for (int v = 0; v < num_vertices(); ++v)
        for (int k = 0; k < 4; ++k)
            if (incident_[4 * v + k] < 0 && find_vertex(add(vertices_[v], kSteps[k])) >= 0) return false;
    return true;
}

bool operator==(const Domain& a, const Domain& b) {
    if (a.vertices_ != b.vertices_ || a.edges_.size() != b.edges_.size()) return false;
    for (std::size_t i = 0; i < a.edges_.size(); ++i)
        if (a.edges_[i].u != b.edges_[i].u || a.edges_[i].v != b.edges_[i].v) return false;
    return true;
}

Domain build_box(int n) {
    if (n < 0) throw std::invalid_argument("box radius must be nonnegative");
    return build_rectangle(-n, -n, n, n);
}

Domain build_rectangle(int x0, int y0, int x1, int y1) {
    if (x1 < x0 || y1 < y0) throw std::invalid_argument("empty rectangle");
    std::vector<Vertex> vs;
    vs.reserve(static_cast<std::size_t>(x1 - x0 + 1) * (y1 - y0 + 1));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) vs.push_back({x, y});
    return Domain::induced(std::move(vs));
}

Domain build_annulus(int r, int R) {
    if (r < 1 || r >= R) throw std::invalid_argument("annulus requires 1 <= r < R");
    std::vector<Vertex> vs;
    for (int y = -R; y <= R; ++y)
        for (int x = -R; x <= R; ++x)
            if (std::max(std::abs(x), std::abs(y)) >= r) vs.push_back({x, y});
    return Domain::induced(std::move(vs));
}

Domain translate(const Domain& d, Vertex shift) {
    std::vector<Vertex> vs;
    vs.reserve(d.num_vertices());
    for (const auto& v : d.vertices()) vs.push_back(add(v, shift));
    std::vector<std::pair<Vertex, Vertex>> es;
    es.reserve(d.num_edges());
    for (const auto& e : d.edges()) es.emplace_back(vs[e.u], vs[e.v]);
    return Domain(std::move(vs), es);
}

// ---------------------------------------------------------------------------

BoundaryCondition::BoundaryCondition(int num_vertices, std::vector<int> labels, std::optional<int> ghost_label)
    : labels_(std::move(labels)), ghost_label_(ghost_label) {
    if (static_cast<int>(labels_.size()) != num_vertices)
        throw std::invalid_argument("boundary condition size mismatch");
    normalize();
}

void BoundaryCondition::normalize() {
    // Relabel classes 0,1,... by first appearance; drop singletons.
    std::map<int, int> count;
    for (int l : labels_)
        if (l >= 0) ++count[l];
    if (ghost_label_ && *ghost_label_ >= 0) ++count[*ghost_label_];
    std::map<int, int> relabel;
    auto assign = [&](int l) -> int {
        if (l < 0 || count[l] < 2) return -1;
        auto [it, inserted] = relabel.emplace(l, static_cast<int>(relabel.size()));
        return it->second;
    };
    for (int& l : labels_) l = assign(l);
    if (ghost_label_) {
        int g = assign(*ghost_label_);
        ghost_label_ = g >= 0 ? std::optional<int>(g) : std::nullopt;
    }
    classes_.assign(relabel.size(), {});
    for (int v = 0; v < static_cast<int>(labels_.size()); ++v)
        if (labels_[v] >= 0) classes_[labels_[v]].push_back(v);
}

BoundaryCondition BoundaryCondition::free(const Domain& d) {
    return BoundaryCondition(d.num_vertices(), std::vector<int>(d.num_vertices(), -1), std::nullopt);
}

BoundaryCondition BoundaryCondition::wired(const Domain& d, bool wire_ghost) {
    std::vector<int> labels(d.num_vertices(), -1);
    for (int v : d.boundary()) labels[v] = 0;
    return BoundaryCondition(d.num_vertices(), std::move(labels), wire_ghost ? std::optional<int>(0) : std::nullopt);
}

BoundaryCondition BoundaryCondition::from_partition(const Domain& d, const std::vector<std::vector<Vertex>>& classes,
                                                    bool ghost_in_first_class) {
    std::vector<int> labels(d.num_vertices(), -1);
    for (std::size_t c = 0; c < classes.size(); ++c) {
        for (const auto& v : classes[c]) {
            int i = d.find_vertex(v);
            if (i < 0) throw std::invalid_argument("partition vertex outside domain");
            if (!d.is_boundary(i)) throw std::invalid_argument("partition vertex is not a boundary vertex");
            if (labels[i] >= 0) throw std::invalid_argument("vertex listed in two classes");
            labels[i] = static_cast<int>(c);
        }
    }
    std::optional<int> ghost;
    if (ghost_in_first_class && !classes.empty()) ghost = 0;
    return BoundaryCondition(d.num_vertices(), std::move(labels), ghost);
}

bool BoundaryCondition::is_free() const { return classes_.empty() && !ghost_label_; }

bool BoundaryCondition::wired_together(int a, int b) const {
    return a == b || (labels_[a] >= 0 && labels_[a] == labels_[b]);
}

bool leq(const BoundaryCondition& a, const BoundaryCondition& b) {
    if (a.num_vertices() != b.num_vertices()) throw std::invalid_argument("boundary conditions on different domains");
    for (std::size_t c = 0; c < a.classes_.size(); ++c) {
        const auto& members = a.classes_[c];
        int target = b.labels_[members.front()];
        for (int v : members)
            if (target < 0 || b.labels_[v] != target) return false;
        if (a.ghost_label_ && *a.ghost_label_ == static_cast<int>(c)) {
            if (!b.ghost_label_ || *b.ghost_label_ != target) return false;
        }
    }
    return true;
}

bool operator==(const BoundaryCondition& a, const BoundaryCondition& b) {
    return a.labels_ == b.labels_ && a.ghost_label_ == b.ghost_label_;
}

// ---------------------------------------------------------------------------

std::vector<int> boundary_cycle(const Domain& d) {
    const int start = 0;  // row-major first vertex: bottom row, leftmost
    if (d.num_edges() == 0) throw std::invalid_argument("boundary of a single vertex is not a cycle");
    std::vector<int> cycle;
    std::vector<char> seen(d.num_vertices(), 0);
    int v = start;
    int arrive = static_cast<int>(Direction::South);
    int first_out = -1;
    for (std::size_t guard = 0; guard <= 4 * static_cast<std::size_t>(d.num_edges()) + 4; ++guard) {
        int out = -1;
        for (int turn : {3, 0, 1, 2}) {
            int k = (arrive + turn) % 4;
            if (d.incident_edge(v, static_cast<Direction>(k)) >= 0) {
                out = k;
                break;
            }
        }
        if (v == start && out == first_out) break;
        if (first_out < 0) first_out = out;
        if (seen[v]) throw std::invalid_argument("domain boundary is not a simple cycle");
        seen[v] = 1;
        cycle.push_back(v);
        v = d.neighbor(v, static_cast<Direction>(out));
        arrive = out;
    }
    std::vector<int> expected(d.boundary().begin(), d.boundary().end());
    std::vector<int> got = cycle;
    std::sort(got.begin(), got.end());
    if (got != expected) throw std::invalid_argument("domain boundary is not a simple cycle");
    return cycle;
}

std::vector<int> Quad::arc_vertices(int i) const {
    const int n = static_cast<int>(cycle.size());
    std::vector<int> out;
    for (int pos = marks[i];; pos = (pos + 1) % n) {
        out.push_back(cycle[pos]);
        if (pos == marks[(i + 1) % 4]) break;
    }
    return out;
}

Quad make_quad(DomainPtr d, Vertex a, Vertex b, Vertex c, Vertex dm) {
    Quad quad;
    quad.cycle = boundary_cycle(*d);
    const int n = static_cast<int>(quad.cycle.size());
    std::array<Vertex, 4> pts{a, b, c, dm};
    for (int i = 0; i < 4; ++i) {
        int idx = d->find_vertex(pts[i]);
        auto it = std::find(quad.cycle.begin(), quad.cycle.end(), idx);
        if (idx < 0 || it == quad.cycle.end()) throw std::invalid_argument("quad mark is not on the boundary cycle");
        quad.marks[i] = static_cast<int>(it - quad.cycle.begin());
    }
    int total = 0;
    for (int i = 0; i < 4; ++i) {
        int gap = ((quad.marks[(i + 1) % 4] - quad.marks[i]) % n + n) % n;
        if (gap == 0) throw std::invalid_argument("degenerate quad: empty arc");
        total += gap;
    }
    if (total != n) throw std::invalid_argument("quad marks are not in counterclockwise order");
    quad.domain = std::move(d);
    return quad;
}

Quad make_rectangle_quad(int x0, int y0, int x1, int y1) {
    if (x1 <= x0 || y1 <= y0) throw std::invalid_argument("degenerate quad: rectangle has no interior");
    return make_quad(share(build_rectangle(x0, y0, x1, y1)), {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0});
}

// ---------------------------------------------------------------------------

namespace {

bool complete_square(const Domain& d, Vertex ll) {
    return d.find_edge(ll, {ll.x + 1, ll.y}) >= 0 && d.find_edge(ll, {ll.x, ll.y + 1}) >= 0 &&
           d.find_edge({ll.x + 1, ll.y}, {ll.x + 1, ll.y + 1}) >= 0 &&
           d.find_edge({ll.x, ll.y + 1}, {ll.x + 1, ll.y + 1}) >= 0;
}

}  // namespace

DualDomain dual_of(const Domain& d) {
    if (d.num_edges() == 0) throw std::invalid_argument("dual of an edgeless domain");
    // Faces adjacent to each edge, by lower-left corner.
    auto faces_of = [&](const Edge& e) -> std::pair<Vertex, Vertex> {
        Vertex u = d.vertex(e.u);
        if (e.orientation == Orientation::Horizontal) return {{u.x, u.y - 1}, {u.x, u.y}};
        return {{u.x - 1, u.y}, {u.x, u.y}};
    };
    std::set<Vertex> faces;
    for (const auto& e : d.edges()) {
        auto [f1, f2] = faces_of(e);
        faces.insert(f1);
        faces.insert(f2);
    }
    int complete = 0;
    for (const auto& f : faces) complete += complete_square(d, f) ? 1 : 0;
    if (d.num_vertices() - d.num_edges() + complete != 1)
        throw std::invalid_argument("dual requires a simply connected domain with unit-square faces");

    std::vector<std::pair<Vertex, Vertex>> dual_edges;
    dual_edges.reserve(d.num_edges());
    for (const auto& e : d.edges()) dual_edges.push_back(faces_of(e));
    DualDomain out;
    out.domain = share(Domain(std::vector<Vertex>(faces.begin(), faces.end()), dual_edges));
    const Domain& dd = *out.domain;
    out.primal_to_dual.resize(d.num_edges());
    out.dual_to_primal.assign(dd.num_edges(), -1);
    for (int e = 0; e < d.num_edges(); ++e) {
        int f = dd.find_edge(dual_edges[e].first, dual_edges[e].second);
        out.primal_to_dual[e] = f;
        out.dual_to_primal[f] = e;
    }
    std::vector<int> labels(dd.num_vertices(), -1);
    for (int v = 0; v < dd.num_vertices(); ++v)
        if (!complete_square(d, dd.vertex(v))) labels[v] = 0;
    out.bc = BoundaryCondition(dd.num_vertices(), std::move(labels), std::nullopt);
    return out;
}

double dual_p(double p, double q) {
    if (!(p >= 0.0 && p <= 1.0) || q <= 0.0) throw std::invalid_argument("dual_p requires p in [0,1], q > 0");
    if (p == 0.0) return 1.0;
    if (p == 1.0) return 0.0;
    // p*/(1-p*) = q (1-p)/p
    double ratio = q * (1.0 - p) / p;
    return ratio / (1.0 + ratio);
}

// ---------------------------------------------------------------------------

namespace {

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

std::optional<int> integer_side(double eta, int R) {
    double s = eta * R;
    double rounded = std::round(s);
    if (!(eta > 0.0) || R < 1 || std::abs(s - rounded) > 1e-9 || rounded < 1) return std::nullopt;
    return static_cast<int>(rounded);
}

}  // namespace

std::vector<Vertex> eta_regular_cells(const Domain& d, double eta, int R) {
    auto side = integer_side(eta, R);
    if (!side) throw std::invalid_argument("eta*R must be a positive integer");
    const int s = *side;
    const auto& bb = d.bbox();
    std::vector<Vertex> cells;
    for (int j = floor_div(bb.y_min, s); j * s < bb.y_max; ++j) {
        for (int i = floor_div(bb.x_min, s); i * s < bb.x_max; ++i) {
            Vertex ll{i * s, j * s};
            bool inside = true;
            for (int y = ll.y; y <= ll.y + s && inside; ++y)
                for (int x = ll.x; x <= ll.x + s && inside; ++x) {
                    if (d.find_vertex({x, y}) < 0) inside = false;
                    else if (x < ll.x + s && d.find_edge({x, y}, {x + 1, y}) < 0) inside = false;
                    else if (y < ll.y + s && d.find_edge({x, y}, {x, y + 1}) < 0) inside = false;
                }
            if (inside) cells.push_back(ll);
        }
    }
    return cells;
}

bool is_eta_regular(const Domain& d, double eta, int R) {
    auto side = integer_side(eta, R);
    if (!side) return false;
    const int s = *side;
    for (const auto& v : d.vertices())
        if (std::max(std::abs(v.x), std::abs(v.y)) > R) return false;
    std::vector<char> vcov(d.num_vertices(), 0), ecov(d.num_edges(), 0);
    for (const auto& ll : eta_regular_cells(d, eta, R)) {
        for (int y = ll.y; y <= ll.y + s; ++y)
            for (int x = ll.x; x <= ll.x + s; ++x) {
                vcov.at(d.find_vertex({x, y})) = 1;
                if (x < ll.x + s) ecov.at(d.find_edge({x, y}, {x + 1, y})) = 1;
                if (y < ll.y + s) ecov.at(d.find_edge({x, y}, {x, y + 1})) = 1;
            }
    }
    return std::all_of(vcov.begin(), vcov.end(), [](char c) { return c; }) &&
           std::all_of(ecov.begin(), ecov.end(), [](char c) { return c; });
}

bool is_eta_regular(const Quad& q, double eta, int R) {
    if (!is_eta_regular(*q.domain, eta, R)) return false;
    const int s = *integer_side(eta, R);
    for (int i = 0; i < 4; ++i) {
        Vertex m = q.domain->vertex(q.mark_vertex(i));
        if (m.x % s != 0 || m.y % s != 0) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

Vertex MedialGraph::direction(int m) const {
    Vertex a = kSteps[m & 3], b = kSteps[(m + 1) & 3];
    return {b.x - a.x, b.y - a.y};
}

bool MedialGraph::in_contour(int m) const {
    return (vertices[tail(m)].degree == 2) != (vertices[head(m)].degree == 2);
}

Vertex MedialGraph::outward(int m) const {
    Vertex dir = direction(m);
    if (vertices[head(m)].degree == 2) return dir;
    return {-dir.x, -dir.y};
}

MedialGraph medial_of(DomainPtr d) {
    MedialGraph g;
    const Domain& dom = *d;
    g.vertices.resize(dom.num_edges());
    for (int e = 0; e < dom.num_edges(); ++e) {
        const auto& ed = dom.edge(e);
        Vertex u = dom.vertex(ed.u), v = dom.vertex(ed.v);
        g.vertices[e] = {e, -1, 4, {u.x + v.x, u.y + v.y}};
    }
    g.corner_vertex.assign(4 * static_cast<std::size_t>(dom.num_vertices()), -1);
    for (int v = 0; v < dom.num_vertices(); ++v) {
        for (int k = 0; k < 4; ++k) {
            int e = dom.incident_edge(v, static_cast<Direction>(k));
            if (e >= 0) {
                g.corner_vertex[4 * v + k] = e;
            } else {
                Vertex p = dom.vertex(v);
                g.corner_vertex[4 * v + k] = static_cast<int>(g.vertices.size());
                g.vertices.push_back({-1, v, 2, {2 * p.x + kSteps[k].x, 2 * p.y + kSteps[k].y}});
            }
        }
    }
    g.domain = std::move(d);
    for (int m = 0; m < g.num_edges(); ++m)
        if (g.in_contour(m)) g.contour.push_back(m);
    return g;
}

}  // namespace rcm
