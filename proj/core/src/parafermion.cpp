#include "rcm/parafermion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rcm/sampler.hpp"
#include "rcm/summation.hpp"
#include "rcm/union_find.hpp"

namespace rcm::parafermion {

namespace {

int ring(Vertex v) { return std::max(std::abs(v.x), std::abs(v.y)); }

Vertex step(Vertex v, int k) { return {v.x + kSteps[k].x, v.y + kSteps[k].y}; }

// Lattice points of the bounding box grown by one that are outside d and reach the frame.
class ExteriorMap {
public:
    explicit ExteriorMap(const Domain& d) : box_(d.bbox()) {
        box_.x_min -= 1;
        box_.y_min -= 1;
        box_.x_max += 1;
        box_.y_max += 1;
        infinite_.assign(static_cast<std::size_t>(box_.width()) * box_.height(), 0);
        std::vector<Vertex> stack{{box_.x_min, box_.y_min}};
        infinite_[index({box_.x_min, box_.y_min})] = 1;
        while (!stack.empty()) {
            const Vertex v = stack.back();
            stack.pop_back();
            for (int k = 0; k < 4; ++k) {
                const Vertex w = step(v, k);
                if (!box_.contains(w) || infinite_[index(w)] || d.find_vertex(w) >= 0) continue;
                infinite_[index(w)] = 1;
                stack.push_back(w);
            }
        }
    }

    // Points outside the grown box are always in the infinite component.
    bool infinite(Vertex v) const { return !box_.contains(v) || infinite_[index(v)]; }

private:
    std::size_t index(Vertex v) const {
        return static_cast<std::size_t>(v.y - box_.y_min) * box_.width() + (v.x - box_.x_min);
    }
    BoundingBox box_;
    std::vector<char> infinite_;
};

std::complex<double> unit(Vertex doubled) {
    const double n = std::hypot(doubled.x, doubled.y);
    return {doubled.x / n, doubled.y / n};
}

void check_domain(const Domain& d) {
    if (!d.is_induced()) throw std::invalid_argument("parafermionic observable needs an induced domain");
    if (!straight_boundary_vertices(d).empty())
        throw std::invalid_argument("domain has a boundary vertex with exactly two opposite neighbours");
}

}  // namespace

Vertex exterior_neighbor(const Domain& d, int x) {
    ExteriorMap ext(d);
    const Vertex v = d.vertex(x);
    std::vector<Vertex> candidates;
    for (int k = 0; k < 4; ++k) {
        const Vertex w = step(v, k);
        if (d.find_vertex(w) < 0 && ext.infinite(w)) candidates.push_back(w);
    }
    if (candidates.empty()) throw std::invalid_argument("root vertex has no neighbour in the infinite exterior");
    return *std::min_element(candidates.begin(), candidates.end(),
                             [](Vertex a, Vertex b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
}

int root_medial_edge(const MedialGraph& g, int x) {
    const Domain& d = *g.domain;
    const Vertex v = d.vertex(x), w = exterior_neighbor(d, x);
    int c = 0;
    while (step(v, c) != w) ++c;
    return 4 * x + ((c + 3) & 3);
}

int ExplorationPath::index_of(int m) const {
    auto it = std::find(edges.begin(), edges.end(), m);
    return it == edges.end() ? -1 : static_cast<int>(it - edges.begin());
}

ExplorationPath exploration_path(const MedialGraph& g, const EdgeConfig& cfg, int x) {
    ExplorationPath path;
    const int start = root_medial_edge(g, x);
    std::vector<int> turns;
    int m = start;
    do {
        path.edges.push_back(m);
        turns.push_back(turn_after(g, cfg, m));
        m = next_medial_edge(g, cfg, m);
    } while (m != start);
    const int n = static_cast<int>(path.edges.size());
    path.quarter_turns.assign(n, 0);
    int acc = 0;
    for (int j = n - 1; j >= 1; --j) {
        acc += turns[j];
        path.quarter_turns[j] = acc;
    }
    path.total_turns = acc + turns[0];
    return path;
}

double winding(const ExplorationPath& gamma, int m) {
    const int j = gamma.index_of(m);
    if (j < 0) throw std::invalid_argument("medial edge is not on the exploration path");
    return gamma.quarter_turns[j] * std::numbers::pi / 2;
}

std::vector<int> straight_boundary_vertices(const Domain& d) {
    std::vector<int> out;
    for (int v : d.boundary()) {
        if (d.degree(v) != 2) continue;
        const bool ew = d.incident_edge(v, Direction::East) >= 0 && d.incident_edge(v, Direction::West) >= 0;
        const bool ns = d.incident_edge(v, Direction::North) >= 0 && d.incident_edge(v, Direction::South) >= 0;
        if (ew || ns) out.push_back(v);
    }
    return out;
}

ObservableValue observable_exact(DomainPtr d, int x, double p, exact::EnumerationOptions opt) {
    check_domain(*d);
    if (x < 0 || x >= d->num_vertices() || !d->is_boundary(x))
        throw std::invalid_argument("root must be a boundary vertex");
    ObservableValue obs;
    obs.domain = d;
    obs.medial = medial_of(d);
    obs.params = ModelParams{p, 4.0, 0.0};
    obs.root = x;
    obs.root_edge = root_medial_edge(obs.medial, x);
    const MedialGraph& g = obs.medial;

    exact::ExactMeasure measure(d, BoundaryCondition::free(*d), obs.params, opt);
    const auto& prob = measure.probabilities();

    // residue[4 m + r]: sum of weight * k over configurations where m is on gamma with winding
    // k quarter turns, k = r (mod 4).
    std::vector<CompensatedSum> residue(4 * static_cast<std::size_t>(g.num_edges()));
    const auto& bnd = d->boundary();
    std::vector<int> slot(d->num_vertices(), -1);
    for (std::size_t i = 0; i < bnd.size(); ++i) slot[bnd[i]] = static_cast<int>(i);
    std::vector<CompensatedSum> passes(bnd.size()), connected(bnd.size());
    std::vector<char> hit(bnd.size());
    UnionFind uf(d->num_vertices());

    for (std::uint64_t mask = 0; mask < measure.num_configs(); ++mask) {
        const double w = prob[mask];
        if (w == 0.0) continue;
        const EdgeConfig cfg = measure.config_of(mask);
        const ExplorationPath gamma = exploration_path(g, cfg, x);
        std::fill(hit.begin(), hit.end(), 0);
        for (std::size_t j = 0; j < gamma.edges.size(); ++j) {
            const int m = gamma.edges[j], k = gamma.quarter_turns[j];
            residue[4 * static_cast<std::size_t>(m) + (k & 3)].add(w * k);
            if (g.in_contour(m)) hit[slot[g.owner(m)]] = 1;
        }
        uf.reset(d->num_vertices());
        for (int e = 0; e < d->num_edges(); ++e)
            if (cfg.open(e)) uf.unite(d->edge(e).u, d->edge(e).v);
        for (std::size_t i = 0; i < bnd.size(); ++i) {
            if (hit[i]) passes[i].add(w);
            if (uf.same(x, bnd[i])) connected[i].add(w);
        }
    }

    const double half_pi = std::numbers::pi / 2;
    obs.F.resize(g.num_edges());
    for (int m = 0; m < g.num_edges(); ++m) {
        const auto* r = &residue[4 * static_cast<std::size_t>(m)];
        obs.F[m] = half_pi * std::complex<double>(r[0].value() - r[2].value(), r[1].value() - r[3].value());
    }

    // eta(e) e^{iW(e, e_x)} equals +-1 times the direction of e_x; dividing by it puts the
    // boundary contributions on the real axis.
    const std::complex<double> frame = std::conj(unit(g.direction(obs.root_edge)));
    ExteriorMap ext(*d);
    for (std::size_t i = 0; i < bnd.size(); ++i) {
        BoundaryTerm t;
        t.vertex = bnd[i];
        t.degree = d->degree(bnd[i]);
        for (int k = 0; k < 4; ++k) {
            const Vertex w = step(d->vertex(bnd[i]), k);
            if (d->find_vertex(w) < 0 && ext.infinite(w)) t.touches_infinite_component = true;
        }
        t.prob_passes = passes[i].value();
        t.prob_connected = connected[i].value();
        for (int k = 0; k < 4; ++k) {
            const int m = 4 * bnd[i] + k;
            if (g.in_contour(m)) t.contour += frame * unit(g.outward(m)) * obs.F[m];
        }
        obs.boundary.push_back(t);
    }
    return obs;
}

std::vector<VertexResidual> vertex_residuals(const ObservableValue& obs) {
    const MedialGraph& g = obs.medial;
    std::vector<std::complex<double>> sum(g.vertices.size());
    for (int m = 0; m < g.num_edges(); ++m) {
        const Vertex dir = g.direction(m);
        sum[g.tail(m)] += unit(dir) * obs.F[m];
        sum[g.head(m)] += unit({-dir.x, -dir.y}) * obs.F[m];
    }
    std::vector<VertexResidual> out;
    for (std::size_t v = 0; v < g.vertices.size(); ++v)
        if (g.vertices[v].degree == 4)
            out.push_back({static_cast<int>(v), g.vertices[v].doubled, std::abs(sum[v])});
    return out;
}

double max_vertex_residual(const ObservableValue& obs) {
    double worst = 0.0;
    for (const auto& r : vertex_residuals(obs)) worst = std::max(worst, r.residual);
    return worst;
}

BoundaryIdentity boundary_identity(const ObservableValue& obs) {
    BoundaryIdentity out;
    for (const auto& t : obs.boundary) {
        out.contour_total += t.contour;
        if (t.vertex == obs.root) continue;
        out.winding_sum += t.contour;
        out.probability_sum += (4 - t.degree) * t.prob_passes;
        if (t.touches_infinite_component)
            out.connection_mismatch = std::max(out.connection_mismatch, std::abs(t.prob_passes - t.prob_connected));
    }
    return out;
}

Domain topological_annulus(int R, const std::vector<Vertex>& hole) {
    std::vector<char> in_hole(static_cast<std::size_t>(2 * R + 1) * (2 * R + 1), 0);
    for (const auto& h : hole) {
        if (ring(h) > R) throw std::invalid_argument("hole must lie inside Lambda_R");
        in_hole[static_cast<std::size_t>(h.y + R) * (2 * R + 1) + (h.x + R)] = 1;
    }
    std::vector<Vertex> vs;
    for (int y = -R; y <= R; ++y)
        for (int x = -R; x <= R; ++x)
            if (!in_hole[static_cast<std::size_t>(y + R) * (2 * R + 1) + (x + R)]) vs.push_back({x, y});
    return Domain::induced(std::move(vs));
}

bool is_topological_annulus(const Domain& d, int R) {
    if (R < 1) return false;
    for (const auto& v : d.vertices())
        if (ring(v) > R) return false;
    std::vector<Vertex> hole;
    for (int y = -R; y <= R; ++y)
        for (int x = -R; x <= R; ++x)
            if (d.find_vertex({x, y}) < 0) hole.push_back({x, y});
    if (hole.empty() || !(topological_annulus(R, hole) == d)) return false;
    for (const auto& h : hole)
        if (4 * ring(h) > R) return false;
    for (int y = -R / 8; y <= R / 8; ++y)
        for (int x = -R / 8; x <= R / 8; ++x)
            if (d.find_vertex({x, y}) >= 0) return false;

    // H is 4-connected and its complement 8-connected (no enclosed holes).
    const int side = 2 * R + 3;
    auto idx = [&](Vertex v) { return static_cast<std::size_t>(v.y + R + 1) * side + (v.x + R + 1); };
    std::vector<char> is_hole(static_cast<std::size_t>(side) * side, 0), seen(is_hole.size(), 0);
    for (const auto& h : hole) is_hole[idx(h)] = 1;
    std::vector<Vertex> stack{hole.front()};
    seen[idx(hole.front())] = 1;
    std::size_t reached = 0;
    while (!stack.empty()) {
        const Vertex v = stack.back();
        stack.pop_back();
        ++reached;
        for (int k = 0; k < 4; ++k) {
            const Vertex w = step(v, k);
            if (is_hole[idx(w)] && !seen[idx(w)]) {
                seen[idx(w)] = 1;
                stack.push_back(w);
            }
        }
    }
    if (reached != hole.size()) return false;
    std::fill(seen.begin(), seen.end(), 0);
    stack = {{-R - 1, -R - 1}};
    seen[idx(stack.front())] = 1;
    reached = 0;
    while (!stack.empty()) {
        const Vertex v = stack.back();
        stack.pop_back();
        ++reached;
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy) {
                const Vertex w{v.x + dx, v.y + dy};
                if (ring(w) > R + 1 || is_hole[idx(w)] || seen[idx(w)]) continue;
                seen[idx(w)] = 1;
                stack.push_back(w);
            }
    }
    return reached + hole.size() == static_cast<std::size_t>(side) * side;
}

std::vector<int> inner_boundary(const Domain& d, int R) {
    std::vector<int> out;
    for (int v : d.boundary())
        if (ring(d.vertex(v)) < R) out.push_back(v);
    return out;
}

Estimate N_Omega_estimate(DomainPtr omega, int R, const ModelParams& params, const NOmegaOptions& opt) {
    if (!is_topological_annulus(*omega, R)) throw std::invalid_argument("domain is not a topological R-annulus");
    const auto inner = inner_boundary(*omega, R);
    const int target = (R + 1) / 2;
    const Domain* d = omega.get();
    Observable count = [d, inner, target](const EdgeConfig& cfg) {
        UnionFind uf(d->num_vertices());
        for (int e = 0; e < d->num_edges(); ++e)
            if (cfg.open(e)) uf.unite(d->edge(e).u, d->edge(e).v);
        std::vector<char> far(d->num_vertices(), 0);
        for (int v = 0; v < d->num_vertices(); ++v)
            if (ring(d->vertex(v)) >= target) far[uf.find(v)] = 1;
        double n = 0.0;
        for (int y : inner) n += far[uf.find(y)];
        return n;
    };
    sampler::RunOptions run;
    run.budget = opt.budget;
    run.burn_in = opt.burn_in;
    run.seed = opt.seed;
    run.algo = params.h == 0.0 ? sampler::Algorithm::ChayesMachta : sampler::Algorithm::HeatBath;
    return sampler::estimate_many({count}, params, omega, BoundaryCondition::free(*omega), run).front();
}

}  // namespace rcm::parafermion
