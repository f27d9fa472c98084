#include "rcm/observables.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <queue>
#include <stdexcept>

#include "rcm/union_find.hpp"

namespace rcm::observables {

namespace {

int ring(Vertex v) { return std::max(std::abs(v.x), std::abs(v.y)); }

bool edge_open(const EdgeConfig& cfg, Vertex a, Vertex b) {
    const int e = cfg.domain().find_edge(a, b);
    return e >= 0 && cfg.open(e);
}

// Vertex-disjoint source-to-sink paths, counted up to `limit`, by unit-capacity augmentation
// on the vertex-split graph.
int max_disjoint_paths(const std::vector<std::vector<int>>& adj, const std::vector<char>& source,
                       const std::vector<char>& sink, int limit) {
    const int n = static_cast<int>(adj.size());
    const int S = 2 * n, T = 2 * n + 1;
    struct Arc {
        int to;
        int cap;
    };
    std::vector<Arc> arcs;
    std::vector<std::vector<int>> out(2 * n + 2);
    auto add = [&](int a, int b) {
        out[a].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({b, 1});
        out[b].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({a, 0});
    };
    for (int i = 0; i < n; ++i) {
        add(2 * i, 2 * i + 1);
        for (int j : adj[i]) add(2 * i + 1, 2 * j);
        if (source[i]) add(S, 2 * i);
        if (sink[i]) add(2 * i + 1, T);
    }
    int flow = 0;
    std::vector<int> via(2 * n + 2);
    while (flow < limit) {
        std::fill(via.begin(), via.end(), -1);
        std::queue<int> q;
        q.push(S);
        via[S] = -2;
        while (!q.empty() && via[T] == -1) {
            const int u = q.front();
            q.pop();
            for (int a : out[u])
                if (arcs[a].cap > 0 && via[arcs[a].to] == -1) {
                    via[arcs[a].to] = a;
                    q.push(arcs[a].to);
                }
        }
        if (via[T] == -1) break;
        for (int v = T; v != S;) {
            const int a = via[v];
            arcs[a].cap -= 1;
            arcs[a ^ 1].cap += 1;
            v = arcs[a ^ 1].to;
        }
        ++flow;
    }
    return flow;
}

class ArmSolver {
public:
    ArmSolver(const EdgeConfig& cfg, const ArmSpec& spec)
        : cfg_(cfg), spec_(spec), r_(spec.r), R_(spec.R), side_(2 * spec.R + 1) {
        for (int y = -R_; y <= R_; ++y)
            for (int x = -R_; x <= R_; ++x)
                if (in_region({x, y}) && cfg.domain().find_vertex({x, y}) < 0)
                    throw std::invalid_argument("configuration does not cover the annulus");
        label_primal();
        label_dual();
        order_clusters();
    }

    bool solve() {
        const int m = static_cast<int>(regions_.size());
        const int k = static_cast<int>(spec_.sigma.size());
        if (m == 0) return false;
        if (spec_.half_plane) return place(spec_.sigma, 0, false);
        for (int rot = 0; rot < k; ++rot) {
            std::vector<int> s(k);
            for (int i = 0; i < k; ++i) s[i] = spec_.sigma[(i + rot) % k];
            for (int start = 0; start < m; ++start)
                if (place(s, start, true)) return true;
        }
        return false;
    }

private:
    struct Region {
        int color;  // 1 primal, 0 dual
        int root;
        int capacity = -1;
    };

    bool in_region(Vertex v) const {
        const int k = ring(v);
        return k >= r_ && k <= R_ && (!spec_.half_plane || v.y >= 0);
    }
    int vid(Vertex v) const { return (v.y + R_) * side_ + (v.x + R_); }
    Vertex vertex_of(int id) const { return {id % side_ - R_, id / side_ - R_}; }
    // Faces by lower-left corner in [-R-1, R]^2: the annulus faces plus one band on either side.
    int fid(Vertex f) const { return (f.y + R_ + 1) * (side_ + 1) + (f.x + R_ + 1); }
    Vertex face_of(int id) const { return {id % (side_ + 1) - R_ - 1, id / (side_ + 1) - R_ - 1}; }
    int inner_ring() const { return std::max(r_ - 1, 0); }
    bool corner_ok(Vertex v) const {
        const int k = ring(v);
        return k >= inner_ring() && k <= R_ + 1 && (!spec_.half_plane || v.y >= 0);
    }
    bool face_in(Vertex f) const {
        return f.x >= -R_ - 1 && f.x <= R_ && f.y >= -R_ - 1 && f.y <= R_ && corner_ok(f) &&
               corner_ok({f.x + 1, f.y}) && corner_ok({f.x, f.y + 1}) && corner_ok({f.x + 1, f.y + 1});
    }
    bool face_touches(Vertex f, int k) const {
        return ring(f) == k || ring({f.x + 1, f.y}) == k || ring({f.x, f.y + 1}) == k ||
               ring({f.x + 1, f.y + 1}) == k;
    }
    // Dual paths start inside the hole and end outside Lambda_R.
    bool face_inner(Vertex f) const { return face_touches(f, r_ == 0 ? 0 : r_ - 1); }
    bool face_outer(Vertex f) const { return face_touches(f, R_ + 1); }

    void label_primal() {
        const int n = side_ * side_;
        primal_ = UnionFind(n);
        for (int y = -R_; y <= R_; ++y)
            for (int x = -R_; x <= R_; ++x) {
                const Vertex v{x, y};
                if (!in_region(v)) continue;
                for (Vertex w : {Vertex{x + 1, y}, Vertex{x, y + 1}})
                    if (in_region(w) && edge_open(cfg_, v, w)) primal_.unite(vid(v), vid(w));
            }
        std::vector<char> inner(n, 0), outer(n, 0);
        for (int id = 0; id < n; ++id) {
            const Vertex v = vertex_of(id);
            if (!in_region(v)) continue;
            if (ring(v) == r_) inner[primal_.find(id)] = 1;
            if (ring(v) == R_) outer[primal_.find(id)] = 1;
        }
        primal_crossing_.assign(n, 0);
        for (int id = 0; id < n; ++id) primal_crossing_[id] = inner[id] && outer[id];
    }

    // Two faces are dual-adjacent across a closed edge of the annulus.
    bool dual_open(Vertex f, Vertex g) const {
        const Vertex a = g.x == f.x + 1 ? Vertex{f.x + 1, f.y} : Vertex{f.x, f.y + 1};
        const Vertex b{f.x + 1, f.y + 1};
        return in_region(a) && in_region(b) && !edge_open(cfg_, a, b);
    }

    void label_dual() {
        const int n = (side_ + 1) * (side_ + 1);
        dual_ = UnionFind(n);
        for (int id = 0; id < n; ++id) {
            const Vertex f = face_of(id);
            if (!face_in(f)) continue;
            for (Vertex g : {Vertex{f.x + 1, f.y}, Vertex{f.x, f.y + 1}})
                if (face_in(g) && dual_open(f, g)) dual_.unite(id, fid(g));
        }
        std::vector<char> inner(n, 0), outer(n, 0);
        for (int id = 0; id < n; ++id) {
            const Vertex f = face_of(id);
            if (!face_in(f)) continue;
            if (face_inner(f)) inner[dual_.find(id)] = 1;
            if (face_outer(f)) outer[dual_.find(id)] = 1;
        }
        dual_crossing_.assign(n, 0);
        for (int id = 0; id < n; ++id) dual_crossing_[id] = inner[id] && outer[id];
    }

    // Crossing clusters in the order they meet the outer ring, counterclockwise from (R, 0).
    void order_clusters() {
        std::vector<Vertex> walk;
        const int R = R_;
        for (int y = 0; y <= R; ++y) walk.push_back({R, y});
        for (int x = R - 1; x >= -R; --x) walk.push_back({x, R});
        const int y_end = spec_.half_plane ? 0 : -R;
        for (int y = R - 1; y >= y_end; --y) walk.push_back({-R, y});
        if (!spec_.half_plane) {
            for (int x = -R + 1; x <= R; ++x) walk.push_back({x, -R});
            for (int y = -R + 1; y < 0; ++y) walk.push_back({R, y});
        }
        auto face_between = [&](Vertex v, Vertex w) {
            if (v.x == w.x) return Vertex{v.x == R ? R : -R - 1, std::min(v.y, w.y)};
            return Vertex{std::min(v.x, w.x), v.y == R ? R : -R - 1};
        };
        std::vector<std::pair<int, int>> seq;  // (color, root)
        auto push = [&](int color, int root) {
            if (seq.empty() || seq.back() != std::pair{color, root}) seq.push_back({color, root});
        };
        const std::size_t n = walk.size();
        for (std::size_t i = 0; i < n; ++i) {
            const int pr = primal_.find(vid(walk[i]));
            if (primal_crossing_[pr]) push(1, pr);
            if (i + 1 == n && spec_.half_plane) break;
            const Vertex f = face_between(walk[i], walk[(i + 1) % n]);
            if (!face_in(f)) continue;
            const int dr = dual_.find(fid(f));
            if (dual_crossing_[dr]) push(0, dr);
        }
        if (!spec_.half_plane)
            while (seq.size() > 1 && seq.front() == seq.back()) seq.pop_back();
        for (std::size_t i = 0; i + 1 < seq.size(); ++i)
            if (seq[i].first == seq[i + 1].first) throw std::logic_error("crossing clusters do not alternate");
        for (const auto& [c, root] : seq) regions_.push_back({c, root});
    }

    int capacity(Region& reg, int limit) {
        if (reg.capacity >= limit) return reg.capacity;
        std::vector<int> members;
        std::map<int, int> local;
        std::vector<std::vector<int>> adj;
        std::vector<char> src, snk;
        if (reg.color == 1) {
            for (int id = 0; id < side_ * side_; ++id)
                if (in_region(vertex_of(id)) && primal_.find(id) == reg.root) {
                    local[id] = static_cast<int>(members.size());
                    members.push_back(id);
                }
            adj.resize(members.size());
            for (std::size_t i = 0; i < members.size(); ++i) {
                const Vertex v = vertex_of(members[i]);
                src.push_back(ring(v) == r_);
                snk.push_back(ring(v) == R_);
                for (int k = 0; k < 4; ++k) {
                    const Vertex w{v.x + kSteps[k].x, v.y + kSteps[k].y};
                    if (!in_region(w) || !edge_open(cfg_, v, w)) continue;
                    adj[i].push_back(local.at(vid(w)));
                }
            }
        } else {
            const int n = (side_ + 1) * (side_ + 1);
            for (int id = 0; id < n; ++id)
                if (face_in(face_of(id)) && dual_.find(id) == reg.root) {
                    local[id] = static_cast<int>(members.size());
                    members.push_back(id);
                }
            adj.resize(members.size());
            for (std::size_t i = 0; i < members.size(); ++i) {
                const Vertex f = face_of(members[i]);
                src.push_back(face_inner(f));
                snk.push_back(face_outer(f));
                for (Vertex g : {Vertex{f.x + 1, f.y}, Vertex{f.x, f.y + 1}, Vertex{f.x - 1, f.y}, Vertex{f.x, f.y - 1}}) {
                    if (!face_in(g)) continue;
                    const bool open = g.x > f.x || g.y > f.y ? dual_open(f, g) : dual_open(g, f);
                    if (open) adj[i].push_back(local.at(fid(g)));
                }
            }
        }
        reg.capacity = max_disjoint_paths(adj, src, snk, limit);
        return reg.capacity;
    }

    bool place(const std::vector<int>& s, int start, bool cyclic) {
        const int m = static_cast<int>(regions_.size());
        const int limit = static_cast<int>(s.size());
        int idx = start, steps = 0, used = 0;
        for (int c : s) {
            for (;;) {
                Region& reg = regions_[idx];
                if (reg.color == c && (used == 0 || capacity(reg, limit) > used)) break;
                ++steps;
                if (steps >= m) return false;
                idx = cyclic ? (idx + 1) % m : idx + 1;
                used = 0;
            }
            ++used;
        }
        return true;
    }

    const EdgeConfig& cfg_;
    const ArmSpec& spec_;
    int r_, R_, side_;
    UnionFind primal_, dual_;
    std::vector<char> primal_crossing_, dual_crossing_;
    std::vector<Region> regions_;
};

// Breadth-first search helper over the open cluster of a vertex.
struct ClusterProbe {
    explicit ClusterProbe(const Domain& d) : d(d), mark(d.num_vertices(), 0) {}

    void explore(const EdgeConfig& cfg, int origin) {
        ++stamp;
        size = 0;
        radius = 0;
        touches = false;
        queue.clear();
        queue.push_back(origin);
        mark[origin] = stamp;
        for (std::size_t i = 0; i < queue.size(); ++i) {
            const int v = queue[i];
            ++size;
            radius = std::max(radius, ring(d.vertex(v)));
            touches = touches || d.is_boundary(v);
            for (int k = 0; k < 4; ++k) {
                const int e = d.incident_edge(v, static_cast<Direction>(k));
                if (e < 0 || !cfg.open(e)) continue;
                const int w = d.other_endpoint(e, v);
                if (mark[w] != stamp) {
                    mark[w] = stamp;
                    queue.push_back(w);
                }
            }
        }
    }

    const Domain& d;
    std::vector<unsigned> mark;
    unsigned stamp = 0;
    std::vector<int> queue;
    int size = 0;
    int radius = 0;
    bool touches = false;
};

Estimate from_batches(const std::vector<double>& batches, const ModelParams& params, const sampler::RunOptions& o,
                      std::int64_t n_samples, std::int64_t burn) {
    Estimate e;
    summarize(batches, e.mean, e.std_error);
    e.n_samples = n_samples;
    e.seed = o.seed;
    e.params = params;
    e.n_batches = static_cast<int>(batches.size());
    e.burn_in = burn;
    return e;
}

int origin_of(const Domain& d) {
    const int o = d.find_vertex({0, 0});
    if (o < 0) throw std::invalid_argument("domain does not contain the origin");
    return o;
}

}  // namespace

bool circuit_occurs(const EdgeConfig& cfg, int n) {
    if (n < 1) throw std::invalid_argument("circuit scale must be at least 1");
    auto in_ann = [n](Vertex v) {
        const int k = ring(v);
        return k >= n && k <= 2 * n;
    };
    auto blocked = [&](Vertex a, Vertex b) { return in_ann(a) && in_ann(b) && edge_open(cfg, a, b); };
    // Faces by lower-left corner; anything with a corner outside Lambda_2n has escaped.
    const int lo = -2 * n, hi = 2 * n - 1, w = hi - lo + 1;
    std::vector<char> seen(static_cast<std::size_t>(w) * w, 0);
    std::vector<Vertex> stack{{0, 0}};
    seen[static_cast<std::size_t>(0 - lo) * w + (0 - lo)] = 1;
    while (!stack.empty()) {
        const Vertex f = stack.back();
        stack.pop_back();
        const std::array<std::pair<Vertex, std::pair<Vertex, Vertex>>, 4> moves{{
            {{f.x + 1, f.y}, {{f.x + 1, f.y}, {f.x + 1, f.y + 1}}},
            {{f.x, f.y + 1}, {{f.x, f.y + 1}, {f.x + 1, f.y + 1}}},
            {{f.x - 1, f.y}, {{f.x, f.y}, {f.x, f.y + 1}}},
            {{f.x, f.y - 1}, {{f.x, f.y}, {f.x + 1, f.y}}},
        }};
        for (const auto& [g, edge] : moves) {
            if (blocked(edge.first, edge.second)) continue;
            if (g.x < lo || g.x > hi || g.y < lo || g.y > hi) return false;
            auto& s = seen[static_cast<std::size_t>(g.y - lo) * w + (g.x - lo)];
            if (!s) {
                s = 1;
                stack.push_back(g);
            }
        }
    }
    return true;
}

void ArmSpec::validate() const {
    if (sigma.empty()) throw std::invalid_argument("arm types must be non-empty");
    for (int s : sigma)
        if (s != 0 && s != 1) throw std::invalid_argument("arm types are 0 (dual) or 1 (primal)");
    if (r < 0 || r >= R) throw std::invalid_argument("need 0 <= r < R");
}

bool arm_occurs(const EdgeConfig& cfg, const ArmSpec& spec) {
    spec.validate();
    return ArmSolver(cfg, spec).solve();
}

bool box_crossing_occurs(const EdgeConfig& cfg, int r) {
    const Domain& d = cfg.domain();
    std::vector<int> from, to;
    for (int y = -r; y <= r; ++y) {
        const int a = d.find_vertex({-r, y}), b = d.find_vertex({r, y});
        if (a < 0 || b < 0) throw std::invalid_argument("configuration does not cover the box");
        from.push_back(a);
        to.push_back(b);
    }
    std::vector<char> target(d.num_vertices(), 0), seen(d.num_vertices(), 0);
    for (int v : to) target[v] = 1;
    std::vector<int> stack(from.begin(), from.end());
    for (int v : from) seen[v] = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        if (target[v]) return true;
        for (int k = 0; k < 4; ++k) {
            const int e = d.incident_edge(v, static_cast<Direction>(k));
            if (e < 0 || !cfg.open(e)) continue;
            const int w = d.other_endpoint(e, v);
            if (seen[w] || ring(d.vertex(w)) > r) continue;
            seen[w] = 1;
            stack.push_back(w);
        }
    }
    return false;
}

sampler::Algorithm default_algorithm(const ModelParams& params) {
    return params.h == 0.0 ? sampler::Algorithm::ChayesMachta : sampler::Algorithm::HeatBath;
}

DeltaEstimates delta_hat(const ModelParams& params, int r, int R, const sampler::RunOptions& options) {
    if (r < 1 || r >= R) throw std::invalid_argument("need 1 <= r < R");
    auto d = share(build_box(R));
    const int e0 = d->find_edge({0, 0}, {1, 0});
    sampler::VectorObservable f = [e0, r](const EdgeConfig& c, std::vector<double>& x) {
        x[0] = c.open(e0) ? 1.0 : 0.0;
        x[1] = box_crossing_occurs(c, r) ? 1.0 : 0.0;
        x[2] = x[0] - x[1];
    };
    auto pe = sampler::estimate_paired_vector(f, 3, params, d, BoundaryCondition::wired(*d),
                                              BoundaryCondition::free(*d), options);
    DeltaEstimates out;
    out.delta_R = pe.difference[0];
    out.delta_rR = pe.difference[1];
    out.difference = pe.difference[2];
    out.wired_edge = pe.high[0];
    out.free_edge = pe.low[0];
    out.wired_crossing = pe.high[1];
    out.free_crossing = pe.low[1];
    return out;
}

Estimate delta_edge(const ModelParams& params, int R, const sampler::RunOptions& options) {
    if (R < 1) throw std::invalid_argument("need R >= 1");
    auto d = share(build_box(R));
    const int e0 = d->find_edge({0, 0}, {1, 0});
    Observable f = [e0](const EdgeConfig& c) { return c.open(e0) ? 1.0 : 0.0; };
    return sampler::estimate_paired({f}, params, d, BoundaryCondition::wired(*d), BoundaryCondition::free(*d), options)
        .difference.front();
}

int proxy_box_radius(double q, int R) { return q == 1.0 ? R : 4 * R; }

Estimate box_crossing(const ModelParams& params, int R, const sampler::RunOptions& options) {
    if (R < 1) throw std::invalid_argument("box radius must be at least 1");
    auto d = share(build_box(proxy_box_radius(params.q, R)));
    Observable f = [R](const EdgeConfig& c) { return box_crossing_occurs(c, R) ? 1.0 : 0.0; };
    return sampler::estimate_many({f}, params, d, BoundaryCondition::free(*d), options).front();
}

Estimate arm_probability(const ModelParams& params, const ArmSpec& spec, const sampler::RunOptions& options) {
    spec.validate();
    auto d = share(build_box(proxy_box_radius(params.q, spec.R)));
    Observable f = [spec](const EdgeConfig& c) { return arm_occurs(c, spec) ? 1.0 : 0.0; };
    return sampler::estimate_many({f}, params, d, BoundaryCondition::free(*d), options).front();
}

std::string LengthScanResult::L_string() const { return L_hat ? std::to_string(*L_hat) : "exceeds-cap"; }

LengthScanResult characteristic_length(double q, double p, double delta, int R_cap,
                                       const sampler::RunOptions& options) {
    if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("delta must lie in (0, 1/2)");
    if (R_cap < 1) throw std::invalid_argument("R_cap must be at least 1");
    const ModelParams params{p, q, 0.0};
    params.validate();
    LengthScanResult res;
    res.q = q;
    res.p = p;
    res.delta = delta;
    res.R_cap = R_cap;
    res.proxy = proxy_box_radius(q, 1) != 1;
    std::map<int, Estimate> cache;
    auto outside = [&](int R) {
        auto it = cache.find(R);
        if (it == cache.end()) {
            sampler::RunOptions o = options;
            o.seed = options.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(R);
            it = cache.emplace(R, box_crossing(params, R, o)).first;
        }
        const Estimate& e = it->second;
        return e.mean + 2 * e.std_error < delta || e.mean - 2 * e.std_error > 1 - delta;
    };
    std::vector<int> scan;
    for (int R = 1; R < R_cap; R *= 2) scan.push_back(R);
    scan.push_back(R_cap);
    int lo = 0, hi = -1;
    for (int R : scan) {
        if (outside(R)) {
            hi = R;
            break;
        }
        lo = R;
    }
    if (hi > 0) {
        while (hi - lo > 1) {
            const int mid = lo + (hi - lo) / 2;
            if (outside(mid)) hi = mid;
            else lo = mid;
        }
        res.L_hat = hi;
    }
    for (const auto& [R, e] : cache) res.curve.push_back({R, e});
    return res;
}

std::optional<int> ClusterStats::phi(double n) const {
    for (std::size_t k = 0; k < pi1.size(); ++k) {
        const double r = static_cast<double>(k + 1);
        if (r * r * pi1[k].mean >= n) return static_cast<int>(k + 1);
    }
    return std::nullopt;
}

ClusterStats cluster_stats(const ModelParams& params, DomainPtr d, const BoundaryCondition& bc,
                           const sampler::RunOptions& options) {
    const int origin = origin_of(*d);
    int rmax = 0;
    for (const auto& v : d->vertices()) rmax = std::max(rmax, ring(v));
    auto probe = std::make_shared<ClusterProbe>(*d);
    const int k = 4 + rmax;
    sampler::VectorObservable f = [probe, origin, rmax](const EdgeConfig& c, std::vector<double>& x) {
        probe->explore(c, origin);
        const double s = probe->size;
        x[0] = probe->touches ? 1.0 : 0.0;
        x[1] = s;
        x[2] = s * s;
        x[3] = probe->touches ? 0.0 : s;
        for (int j = 1; j <= rmax; ++j) x[3 + j] = probe->radius >= j ? 1.0 : 0.0;
    };
    auto est = sampler::estimate_vector(f, k, params, d, bc, options);
    ClusterStats out;
    out.theta_proxy = est[0];
    out.mean_size = est[1];
    out.second_moment = est[2];
    out.chi_proxy = est[3];
    out.pi1.assign(est.begin() + 4, est.end());
    out.radius_distribution.assign(rmax + 1, 0.0);
    for (int j = 0; j <= rmax; ++j) {
        const double at_least = j == 0 ? 1.0 : out.pi1[j - 1].mean;
        const double beyond = j == rmax ? 0.0 : out.pi1[j].mean;
        out.radius_distribution[j] = at_least - beyond;
    }
    return out;
}

Estimate ghost_magnetization(const ModelParams& params, DomainPtr d, const BoundaryCondition& bc,
                             const sampler::RunOptions& options) {
    const int origin = origin_of(*d);
    if (params.h == 0.0) {
        Estimate e;
        e.params = params;
        e.seed = options.seed;
        return e;
    }
    auto search = std::make_shared<OpenPathSearch>(*d);
    Observable f = [search, origin](const EdgeConfig& c) { return search->connects_to_ghost(c, origin) ? 1.0 : 0.0; };
    return sampler::estimate_many({f}, params, d, bc, options).front();
}

CovarianceSum covariance_sum(const ModelParams& params, DomainPtr d, const BoundaryCondition& bc, int e, int R_cap,
                             const sampler::RunOptions& options) {
    if (e < 0 || e >= d->num_edges()) throw std::invalid_argument("edge index out of range");
    if (R_cap < 0) throw std::invalid_argument("R_cap must be nonnegative");
    auto doubled_mid = [&](int f) {
        const Vertex a = d->vertex(d->edge(f).u), b = d->vertex(d->edge(f).v);
        return Vertex{a.x + b.x, a.y + b.y};
    };
    const Vertex m0 = doubled_mid(e);
    // shell of f: ceil(sup-distance between midpoints)
    std::vector<int> shell(d->num_edges(), -1);
    for (int f = 0; f < d->num_edges(); ++f) {
        const Vertex m = doubled_mid(f);
        const int twice = std::max(std::abs(m.x - m0.x), std::abs(m.y - m0.y));
        const int s = (twice + 1) / 2;
        if (s <= R_cap) shell[f] = s;
    }
    const int K = R_cap + 1;
    // x[0] = w_e, x[1+k] = shell sum, x[1+K+k] = w_e * shell sum
    sampler::VectorObservable obs = [e, shell, K](const EdgeConfig& c, std::vector<double>& x) {
        std::fill(x.begin(), x.end(), 0.0);
        x[0] = c.open(e) ? 1.0 : 0.0;
        for (int f = 0; f < c.num_edges(); ++f)
            if (shell[f] >= 0 && c.open(f)) x[1 + shell[f]] += 1.0;
        for (int k = 0; k < K; ++k) x[1 + K + k] = x[0] * x[1 + k];
    };
    const auto run = sampler::run_batches(obs, 1 + 2 * K, params, d, bc, options);
    const auto& bx = run.series[0].batch_means();
    const std::size_t nb = bx.size();
    CovarianceSum out;
    std::vector<double> total(nb, 0.0);
    for (int k = 0; k < K; ++k) {
        const auto& by = run.series[1 + k].batch_means();
        const auto& bxy = run.series[1 + K + k].batch_means();
        std::vector<double> cov(nb);
        for (std::size_t b = 0; b < nb; ++b) {
            cov[b] = bxy[b] - bx[b] * by[b];
            total[b] += cov[b];
        }
        out.shells.push_back(from_batches(cov, params, options, run.series[0].used_samples(), run.burn_in));
    }
    out.total = from_batches(total, params, options, run.series[0].used_samples(), run.burn_in);
    out.note = "truncated at sup-distance " + std::to_string(R_cap) + "; finite-volume estimate on " +
               std::to_string(d->num_edges()) + " edges";
    return out;
}

CovarianceSum covariance_sum_f2(const ModelParams& params, int R_cap, const sampler::RunOptions& options) {
    if (R_cap < 1) throw std::invalid_argument("R_cap must be at least 1");
    auto d = share(build_box(2 * R_cap));
    auto out = covariance_sum(params, d, BoundaryCondition::free(*d), d->find_edge({0, 0}, {1, 0}), R_cap, options);
    out.note += " (free box of side " + std::to_string(4 * R_cap) + ")";
    return out;
}

}  // namespace rcm::observables
