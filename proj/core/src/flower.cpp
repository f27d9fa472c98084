#include "rcm/flower.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <stdexcept>

#include "rcm/loops.hpp"
#include "rcm/union_find.hpp"

namespace rcm::coupling {

namespace {

using EdgeKey = std::pair<Vertex, Vertex>;

EdgeKey key(Vertex a, Vertex b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

int norm_inf(Vertex v) { return std::max(std::abs(v.x), std::abs(v.y)); }

// Corner of a stub medial vertex relative to its owner.
int stub_corner(const MedialGraph& g, int mv) {
    const auto& vx = g.vertices[mv];
    Vertex o = g.domain->vertex(vx.owner);
    Vertex s{vx.doubled.x - 2 * o.x, vx.doubled.y - 2 * o.y};
    for (int k = 0; k < 4; ++k)
        if (kSteps[k] == s) return k;
    throw std::logic_error("malformed stub");
}

// Stub on the outer (true) or inner (false) side of the annulus.
bool outer_stub(const MedialGraph& g, int mv, int R) {
    const Vertex& p = g.vertices[mv].doubled;
    return std::max(std::abs(p.x), std::abs(p.y)) > 2 * R;
}

// Predecessor of m; -1 when it depends on an unrevealed edge.
int previous_edge(const MedialGraph& g, const EdgeConfig& cfg, const std::vector<char>& revealed, int m) {
    const int v = g.owner(m), c = m & 3;
    const auto& mv = g.vertices[g.tail(m)];
    if (mv.degree == 4) {
        if (!revealed[mv.primal_edge]) return -1;
        if (cfg.open(mv.primal_edge)) {
            const int w = g.domain->neighbor(v, static_cast<Direction>(c));
            return 4 * w + ((c + 1) & 3);
        }
    }
    return 4 * v + ((c + 3) & 3);
}

struct Exploration {
    FlowerStatus status = FlowerStatus::Absent;
    std::vector<std::vector<int>> paths;  // forward-oriented medial edges
    std::vector<int> crossing;
};

// Interfaces with an endpoint on the exploring side (outer for inner flowers).
Exploration explore(const MedialGraph& g, const EdgeConfig& cfg, const std::vector<char>& revealed, FlowerKind kind,
                    int R) {
    const bool from_outer = kind == FlowerKind::Inner;
    Exploration ex;
    std::set<int> first_edges;
    const int nv = static_cast<int>(g.vertices.size());
    auto is_stub = [&](int mv) { return g.vertices[mv].degree == 2; };
    auto source = [&](int mv) { return is_stub(mv) && outer_stub(g, mv, R) == from_outer; };
    bool undetermined = false;
    for (int mv = 0; mv < nv && !undetermined; ++mv) {
        if (!source(mv)) continue;
        const int v = g.vertices[mv].owner, k = stub_corner(g, mv);
        // Forward from the edge leaving the stub.
        {
            std::vector<int> path;
            int m = 4 * v + k;
            while (true) {
                path.push_back(m);
                if (is_stub(g.head(m))) break;
                m = next_medial_edge_partial(g, cfg, revealed, m);
                if (m < 0) {
                    undetermined = true;
                    break;
                }
            }
            if (undetermined) break;
            if (first_edges.insert(path.front()).second) ex.paths.push_back(std::move(path));
        }
        // Backward from the edge entering the stub.
        {
            std::vector<int> path;
            int m = 4 * v + ((k + 3) & 3);
            while (true) {
                path.push_back(m);
                if (is_stub(g.tail(m))) break;
                m = previous_edge(g, cfg, revealed, m);
                if (m < 0) {
                    undetermined = true;
                    break;
                }
            }
            if (undetermined) break;
            std::reverse(path.begin(), path.end());
            if (first_edges.insert(path.front()).second) ex.paths.push_back(std::move(path));
        }
    }
    if (undetermined) {
        ex.status = FlowerStatus::Undetermined;
        ex.paths.clear();
        return ex;
    }
    for (int i = 0; i < static_cast<int>(ex.paths.size()); ++i) {
        const auto& p = ex.paths[i];
        const bool a = outer_stub(g, g.tail(p.front()), R), b = outer_stub(g, g.head(p.back()), R);
        if (a != b) ex.crossing.push_back(i);
    }
    ex.status = ex.crossing.empty() ? FlowerStatus::Absent : FlowerStatus::Found;
    return ex;
}

Domain component_domain(const std::vector<Vertex>& candidates, const std::set<EdgeKey>& removed, Vertex seed) {
    const std::set<Vertex> pool(candidates.begin(), candidates.end());
    std::set<Vertex> seen{seed};
    std::vector<Vertex> stack{seed};
    while (!stack.empty()) {
        const Vertex v = stack.back();
        stack.pop_back();
        for (const auto& s : kSteps) {
            const Vertex w{v.x + s.x, v.y + s.y};
            if (pool.count(w) && !removed.count(key(v, w)) && seen.insert(w).second) stack.push_back(w);
        }
    }
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (const auto& v : seen)
        for (int k : {0, 1}) {
            const Vertex w{v.x + kSteps[k].x, v.y + kSteps[k].y};
            if (seen.count(w) && !removed.count(key(v, w))) edges.emplace_back(v, w);
        }
    return Domain(std::vector<Vertex>(seen.begin(), seen.end()), edges);
}

double angle(Vertex v) {
    double a = std::atan2(static_cast<double>(v.y), static_cast<double>(v.x));
    return a < 0 ? a + 2 * std::numbers::pi : a;
}

std::optional<FlowerDomain> build_flower(const EdgeConfig& cfg, FlowerKind kind) {
    const Domain& A = cfg.domain();
    const auto [r, R] = annulus_radii(A);
    MedialGraph g = medial_of(cfg.domain_ptr());
    std::vector<char> all(A.num_edges(), 1);
    Exploration ex = explore(g, cfg, all, kind, R);
    if (ex.status != FlowerStatus::Found) return std::nullopt;

    FlowerDomain f;
    f.kind = kind;
    f.scale = kind == FlowerKind::Inner ? r : R;
    std::set<EdgeKey> removed;
    for (const auto& p : ex.paths)
        for (int m : p) {
            const auto& mv = g.vertices[g.head(m)];
            if (mv.degree != 4) continue;
            const Edge& e = A.edge(mv.primal_edge);
            if (removed.insert(key(A.vertex(e.u), A.vertex(e.v))).second)
                f.explored.emplace_back(A.vertex(e.u), A.vertex(e.v));
        }

    std::vector<Vertex> candidates;
    Vertex seed{0, 0};
    if (kind == FlowerKind::Inner) {
        for (int y = -R; y <= R; ++y)
            for (int x = -R; x <= R; ++x) candidates.push_back({x, y});
    } else {
        for (int y = -R - 1; y <= R + 1; ++y)
            for (int x = -R - 1; x <= R + 1; ++x)
                if (norm_inf({x, y}) >= r) candidates.push_back({x, y});
        seed = {R + 1, R + 1};
    }
    f.region = share(component_domain(candidates, removed, seed));
    const Domain& F = *f.region;
    MedialGraph gf = medial_of(f.region);
    EdgeConfig open_f = EdgeConfig::all_open(f.region);

    // Tips: where crossing interfaces meet the far side. At the end of a path the petal before
    // the tip is primal; at the start of a path the petal after it is.
    struct Cut {
        int edge;      // medial edge of the region
        bool after;    // boundary falls after the edge
        Vertex tip;
    };
    std::vector<Cut> cuts;
    for (int i : ex.crossing) {
        const auto& p = ex.paths[i];
        const bool ends_far = outer_stub(g, g.head(p.back()), R) != (kind == FlowerKind::Inner);
        const int m = ends_far ? p.back() : p.front();
        const Vertex a = A.vertex(g.owner(m));
        const int fa = F.find_vertex(a);
        if (fa < 0) throw std::logic_error("flower tip outside the explored region");
        cuts.push_back({4 * fa + (m & 3), ends_far, a});
    }
    const std::vector<int> loop = follow(gf, open_f, cuts.front().edge, nullptr);
    std::vector<int> pos(gf.num_edges(), -1);
    for (int i = 0; i < static_cast<int>(loop.size()); ++i) pos[loop[i]] = i;
    const int L = static_cast<int>(loop.size());

    struct Boundary {
        int at;
        bool primal_next;
        Vertex tip;
    };
    std::vector<Boundary> bounds;
    for (const auto& c : cuts) {
        if (pos[c.edge] < 0) throw std::logic_error("flower tip missing from the boundary loop");
        bounds.push_back({(pos[c.edge] + (c.after ? 1 : 0)) % L, !c.after, c.tip});
    }
    std::sort(bounds.begin(), bounds.end(), [](const Boundary& a, const Boundary& b) { return a.at < b.at; });
    const int k = static_cast<int>(bounds.size());
    for (int j = 0; j < k; ++j)
        if (bounds[j].primal_next == bounds[(j + 1) % k].primal_next)
            throw std::logic_error("petal tags do not alternate");

    std::vector<Vertex> tips;
    std::vector<Petal> petals;
    for (int j = 0; j < k; ++j) {
        Petal pt;
        pt.primal = bounds[j].primal_next;
        auto push = [&](Vertex v) {
            if (pt.vertices.empty() || !(pt.vertices.back() == v)) pt.vertices.push_back(v);
        };
        push(bounds[j].tip);
        const int end = bounds[(j + 1) % k].at;
        for (int i = bounds[j].at; i != end; i = (i + 1) % L) {
            const int owner = gf.owner(loop[i]);
            if (F.degree(owner) <= 3) push(F.vertex(owner));
        }
        push(bounds[(j + 1) % k].tip);
        tips.push_back(bounds[j].tip);
        petals.push_back(std::move(pt));
    }
    if (kind == FlowerKind::Outer) {
        // The hole is traversed clockwise; present both kinds counterclockwise.
        std::vector<Vertex> t2(k);
        std::vector<Petal> p2(k);
        for (int i = 0; i < k; ++i) {
            t2[i] = tips[(k - i) % k];
            p2[i] = petals[k - 1 - i];
            std::reverse(p2[i].vertices.begin(), p2[i].vertices.end());
        }
        tips = std::move(t2);
        petals = std::move(p2);
    }
    int start = -1;
    for (int j = 0; j < k; ++j)
        if (petals[j].primal && (start < 0 || angle(tips[j]) < angle(tips[start]))) start = j;
    for (int j = 0; j < k; ++j) {
        f.endpoints.push_back(tips[(start + j) % k]);
        f.petals.push_back(petals[(start + j) % k]);
    }
    return f;
}

FlowerStatus status_of(const EdgeConfig& cfg, const std::vector<char>& revealed, FlowerKind kind) {
    const auto [r, R] = annulus_radii(cfg.domain());
    (void)r;
    MedialGraph g = medial_of(cfg.domain_ptr());
    return explore(g, cfg, revealed, kind, R).status;
}

// Vertex sets per petal; endpoints belong to primal petals only.
struct PetalSets {
    std::vector<std::vector<int>> primal;    // region vertex indices
    std::vector<int> dual_interior;          // region vertex indices
};

PetalSets petal_sets(const FlowerDomain& f) {
    const Domain& F = *f.region;
    PetalSets ps;
    std::set<int> in_primal;
    for (const auto& p : f.petals) {
        if (!p.primal) continue;
        std::vector<int> ids;
        for (const auto& v : p.vertices) {
            int i = F.find_vertex(v);
            if (i < 0) throw std::invalid_argument("petal vertex outside region");
            ids.push_back(i);
            in_primal.insert(i);
        }
        ps.primal.push_back(std::move(ids));
    }
    std::set<int> dual;
    for (const auto& p : f.petals) {
        if (p.primal) continue;
        for (std::size_t i = 1; i + 1 < p.vertices.size(); ++i) {
            int id = F.find_vertex(p.vertices[i]);
            if (id >= 0 && !in_primal.count(id)) dual.insert(id);
        }
    }
    ps.dual_interior.assign(dual.begin(), dual.end());
    return ps;
}

}  // namespace

std::pair<int, int> annulus_radii(const Domain& d) {
    int r = -1, R = -1;
    for (const auto& v : d.vertices()) {
        const int n = norm_inf(v);
        r = r < 0 ? n : std::min(r, n);
        R = std::max(R, n);
    }
    if (r < 1 || r >= R || !(d == build_annulus(r, R)))
        throw std::invalid_argument("flower exploration needs a box annulus with inner radius >= 1");
    return {r, R};
}

std::optional<FlowerDomain> explore_inner_flower(const EdgeConfig& cfg) { return build_flower(cfg, FlowerKind::Inner); }

std::optional<FlowerDomain> explore_outer_flower(const EdgeConfig& cfg) { return build_flower(cfg, FlowerKind::Outer); }

FlowerStatus inner_flower_status(const EdgeConfig& cfg, const std::vector<char>& revealed) {
    return status_of(cfg, revealed, FlowerKind::Inner);
}

FlowerStatus outer_flower_status(const EdgeConfig& cfg, const std::vector<char>& revealed) {
    return status_of(cfg, revealed, FlowerKind::Outer);
}

StopRule stop_when_flower_found(FlowerKind kind, bool use_upper) {
    struct Cache {
        const Domain* domain = nullptr;
        int R = 0;
        std::unique_ptr<MedialGraph> g;
    };
    auto cache = std::make_shared<Cache>();
    return [cache, kind, use_upper](const CouplingState& st) {
        if (cache->domain != &st.domain()) {
            cache->R = annulus_radii(st.domain()).second;
            cache->g = std::make_unique<MedialGraph>(medial_of(st.domain_ptr()));
            cache->domain = &st.domain();
        }
        const EdgeConfig& cfg = use_upper ? st.omega_prime() : st.omega();
        return explore(*cache->g, cfg, st.revealed_mask(), kind, cache->R).status == FlowerStatus::Found;
    };
}

bool well_separated(const FlowerDomain& f, double eta) {
    if (eta <= 0) return true;
    const double limit = eta * f.scale;
    for (std::size_t i = 0; i < f.endpoints.size(); ++i)
        for (std::size_t j = i + 1; j < f.endpoints.size(); ++j) {
            const double dx = f.endpoints[i].x - f.endpoints[j].x, dy = f.endpoints[i].y - f.endpoints[j].y;
            if (!(std::hypot(dx, dy) > limit)) return false;
        }
    return true;
}

bool coherent(const FlowerDomain& f, const BoundaryCondition& bc) {
    if (bc.num_vertices() != f.region->num_vertices()) throw std::invalid_argument("boundary condition size mismatch");
    const PetalSets ps = petal_sets(f);
    for (const auto& petal : ps.primal)
        for (int v : petal)
            if (!bc.wired_together(petal.front(), v)) return false;
    for (int v : ps.dual_interior)
        if (bc.label(v) >= 0) return false;
    return true;
}

bool is_boosting_pair(const FlowerDomain& f, const BoundaryCondition& lo, const BoundaryCondition& hi) {
    const int n = f.region->num_vertices();
    if (lo.num_vertices() != n || hi.num_vertices() != n) throw std::invalid_argument("boundary condition size mismatch");
    const PetalSets ps = petal_sets(f);
    if (ps.primal.size() < 2) return false;

    // Smallest coherent xi above lo.
    UnionFind uf(n);
    for (const auto& cls : lo.classes())
        for (int v : cls) uf.unite(cls.front(), v);
    for (const auto& petal : ps.primal)
        for (int v : petal) uf.unite(petal.front(), v);
    std::vector<int> size(n, 0);
    for (int v = 0; v < n; ++v) ++size[uf.find(v)];
    for (int v : ps.dual_interior)
        if (size[uf.find(v)] > 1) return false;
    std::vector<int> lab_lo(n);
    for (int v = 0; v < n; ++v) lab_lo[v] = size[uf.find(v)] > 1 ? uf.find(v) : -1;
    BoundaryCondition xi(n, lab_lo, std::nullopt);

    // Largest coherent xi' below hi: primal petals grouped as hi groups them, the rest free.
    std::vector<int> lab_hi(n, -1);
    for (const auto& petal : ps.primal) {
        const int l = hi.label(petal.front());
        for (int v : petal)
            if (!hi.wired_together(petal.front(), v)) return false;
        for (int v : petal) lab_hi[v] = l >= 0 ? l : n + petal.front();
    }
    BoundaryCondition xi_prime(n, lab_hi, std::nullopt);
    if (!leq(xi, xi_prime)) return false;
    for (std::size_t i = 0; i < ps.primal.size(); ++i)
        for (std::size_t j = i + 1; j < ps.primal.size(); ++j) {
            const int a = ps.primal[i].front(), b = ps.primal[j].front();
            if (xi_prime.wired_together(a, b) && !xi.wired_together(a, b)) return true;
        }
    return false;
}

// ---------------------------------------------------------------------------

namespace {

EdgeConfig restrict_to(const EdgeConfig& cfg, DomainPtr sub) {
    EdgeConfig out(sub);
    const Domain& d = cfg.domain();
    for (int e = 0; e < sub->num_edges(); ++e) {
        const Edge& ed = sub->edge(e);
        const int f = d.find_edge(sub->vertex(ed.u), sub->vertex(ed.v));
        if (f < 0) throw std::invalid_argument("sub-domain not contained in the configuration's domain");
        out.set(e, cfg.open(f));
    }
    return out;
}

}  // namespace

std::optional<DoubleFlower> double_four_petal(const EdgeConfig& cfg) {
    const Domain& A = cfg.domain();
    const auto [r, R] = annulus_radii(A);
    const int mid = static_cast<int>(std::lround(std::sqrt(static_cast<double>(r) * R)));
    if (mid <= r || mid >= R) return std::nullopt;
    auto fin = explore_inner_flower(restrict_to(cfg, share(build_annulus(r, mid))));
    auto fout = explore_outer_flower(restrict_to(cfg, share(build_annulus(mid, R))));
    if (!fin || !fout || fin->num_petals() != 4 || fout->num_petals() != 4) return std::nullopt;
    if (!well_separated(*fin, 0.5) || !well_separated(*fout, 0.5)) return std::nullopt;

    // Edges of the annulus outside both flowers.
    std::vector<char> allowed(A.num_edges(), 1);
    for (const Domain* F : {fin->region.get(), fout->region.get()})
        for (const auto& e : F->edges()) {
            const int id = A.find_edge(F->vertex(e.u), F->vertex(e.v));
            if (id >= 0) allowed[id] = 0;
        }

    auto vertex_ids = [&](const Petal& p, bool interior_only) {
        std::vector<int> ids;
        for (std::size_t i = 0; i < p.vertices.size(); ++i) {
            if (interior_only && (i == 0 || i + 1 == p.vertices.size())) continue;
            const int id = A.find_vertex(p.vertices[i]);
            if (id >= 0) ids.push_back(id);
        }
        return ids;
    };
    auto primal_joined = [&](const Petal& a, const Petal& b) {
        const auto from = vertex_ids(a, false), to = vertex_ids(b, false);
        std::vector<char> target(A.num_vertices(), 0), seen(A.num_vertices(), 0);
        for (int v : to) target[v] = 1;
        std::vector<int> stack(from.begin(), from.end());
        for (int v : from) seen[v] = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            if (target[v]) return true;
            for (int k = 0; k < 4; ++k) {
                const int e = A.incident_edge(v, static_cast<Direction>(k));
                if (e < 0 || !allowed[e] || !cfg.open(e)) continue;
                const int w = A.other_endpoint(e, v);
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
        return false;
    };

    // Dual connections through faces; a dual petal is represented by the faces along its
    // explored closed edges.
    std::map<Vertex, int> face_id;
    auto face = [&](Vertex ll) { return face_id.emplace(ll, static_cast<int>(face_id.size())).first->second; };
    std::vector<std::array<int, 2>> faces_of(A.num_edges());
    for (int e = 0; e < A.num_edges(); ++e) {
        const Vertex a = A.vertex(A.edge(e).u);
        faces_of[e] = A.edge(e).orientation == Orientation::Horizontal
                          ? std::array<int, 2>{face(a), face({a.x, a.y - 1})}
                          : std::array<int, 2>{face(a), face({a.x - 1, a.y})};
    }
    std::vector<std::vector<int>> face_edges(face_id.size());
    for (int e = 0; e < A.num_edges(); ++e)
        for (int f : faces_of[e]) face_edges[f].push_back(e);
    auto dual_seeds = [&](const Petal& p, const FlowerDomain& fl) {
        std::set<EdgeKey> explored;
        for (const auto& [a, b] : fl.explored) explored.insert(key(a, b));
        std::vector<int> seeds;
        for (int v : vertex_ids(p, true))
            for (int k = 0; k < 4; ++k) {
                const int e = A.incident_edge(v, static_cast<Direction>(k));
                if (e < 0 || cfg.open(e)) continue;
                const Edge& ed = A.edge(e);
                if (!explored.count(key(A.vertex(ed.u), A.vertex(ed.v)))) continue;
                seeds.push_back(faces_of[e][0]);
                seeds.push_back(faces_of[e][1]);
            }
        return seeds;
    };
    auto dual_joined = [&](const Petal& a, const FlowerDomain& fa, const Petal& b, const FlowerDomain& fb) {
        const auto from = dual_seeds(a, fa), to = dual_seeds(b, fb);
        std::vector<char> target(face_id.size(), 0), seen(face_id.size(), 0);
        for (int f : to) target[f] = 1;
        std::vector<int> stack;
        for (int f : from)
            if (!seen[f]) {
                seen[f] = 1;
                stack.push_back(f);
            }
        while (!stack.empty()) {
            const int f = stack.back();
            stack.pop_back();
            if (target[f]) return true;
            for (int e : face_edges[f]) {
                if (cfg.open(e) || !allowed[e]) continue;
                const int g = faces_of[e][0] == f ? faces_of[e][1] : faces_of[e][0];
                if (!seen[g]) {
                    seen[g] = 1;
                    stack.push_back(g);
                }
            }
        }
        return false;
    };

    for (int s : {0, 2}) {
        bool ok = true;
        for (int i = 0; i < 4 && ok; ++i) {
            const Petal& pi = fin->petals[i];
            const Petal& po = fout->petals[(i + s) % 4];
            ok = pi.primal ? primal_joined(pi, po) : dual_joined(pi, *fin, po, *fout);
        }
        if (ok) return DoubleFlower{*fin, *fout, s};
    }
    return std::nullopt;
}

}  // namespace rcm::coupling
