#include "rcm/events.hpp"

#include <stdexcept>

namespace rcm {

OpenPathSearch::OpenPathSearch(const Domain& d)
    : d_(&d), mark_(d.num_vertices() + 1, 0), target_(d.num_vertices() + 1, 0) {
    queue_.reserve(d.num_vertices() + 1);
}

bool OpenPathSearch::connects(const EdgeConfig& cfg, const std::vector<int>& from, const std::vector<int>& to,
                              const std::vector<char>* blocked, bool dual) {
    ++stamp_;
    for (int v : to) target_[v] = stamp_;
    queue_.clear();
    for (int v : from) {
        if (target_[v] == stamp_) return true;
        if (mark_[v] != stamp_) {
            mark_[v] = stamp_;
            queue_.push_back(v);
        }
    }
    const std::size_t seeds = queue_.size();
    for (std::size_t head = 0; head < queue_.size(); ++head) {
        int v = queue_[head];
        if (blocked && (*blocked)[v] && head >= seeds) continue;
        for (int k = 0; k < 4; ++k) {
            int e = d_->incident_edge(v, static_cast<Direction>(k));
            if (e < 0 || cfg.open(e) == dual) continue;
            int w = d_->other_endpoint(e, v);
            if (mark_[w] == stamp_) continue;
            if (target_[w] == stamp_) return true;
            mark_[w] = stamp_;
            queue_.push_back(w);
        }
    }
    return false;
}

bool OpenPathSearch::connects_to_ghost(const EdgeConfig& cfg, int from) {
    if (!cfg.has_ghost()) return false;
    ++stamp_;
    queue_.clear();
    queue_.push_back(from);
    mark_[from] = stamp_;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
        int v = queue_[head];
        if (cfg.ghost_open(v)) return true;
        for (int k = 0; k < 4; ++k) {
            int e = d_->incident_edge(v, static_cast<Direction>(k));
            if (e < 0 || !cfg.open(e)) continue;
            int w = d_->other_endpoint(e, v);
            if (mark_[w] == stamp_) continue;
            mark_[w] = stamp_;
            queue_.push_back(w);
        }
    }
    return false;
}

bool crossing_occurs(const EdgeConfig& cfg, const Quad& quad) {
    OpenPathSearch search(*quad.domain);
    return search.connects(cfg, quad.arc_vertices(0), quad.arc_vertices(2));
}

DualQuad make_dual_quad(const Quad& quad) {
    const Domain& d = *quad.domain;
    DualQuad dq{dual_of(d), {}, {}, {}};
    const Domain& dd = *dq.dual.domain;
    const int n = static_cast<int>(quad.cycle.size());
    auto exterior_face = [&](int from, int to) {
        Vertex a = d.vertex(from), b = d.vertex(to);
        Vertex ll;
        if (b.x > a.x) ll = {a.x, a.y - 1};
        else if (b.y > a.y) ll = {a.x, a.y};
        else if (b.x < a.x) ll = {b.x, a.y};
        else ll = {a.x - 1, b.y};
        int f = dd.find_vertex(ll);
        if (f < 0) throw std::logic_error("missing exterior face");
        return f;
    };
    for (int side : {1, 3}) {
        auto& out = side == 1 ? dq.bc_side : dq.da_side;
        for (int pos = quad.marks[side]; pos != quad.marks[(side + 1) % 4]; pos = (pos + 1) % n)
            out.push_back(exterior_face(quad.cycle[pos], quad.cycle[(pos + 1) % n]));
    }
    dq.exterior.assign(dd.num_vertices(), 0);
    for (int v = 0; v < dd.num_vertices(); ++v) dq.exterior[v] = dq.dual.bc.label(v) >= 0;
    return dq;
}

bool dual_crossing_occurs(const EdgeConfig& dual_cfg, const DualQuad& dq) {
    OpenPathSearch search(*dq.dual.domain);
    return search.connects(dual_cfg, dq.bc_side, dq.da_side, &dq.exterior);
}

EdgeConfig dual_configuration(const EdgeConfig& cfg, const DualDomain& dual) {
    EdgeConfig out(dual.domain);
    for (int e = 0; e < cfg.num_edges(); ++e) out.set(dual.primal_to_dual[e], !cfg.open(e));
    return out;
}

namespace events {

Event edge_open(int e) {
    return [e](const EdgeConfig& c) { return c.open(e); };
}

Event connected(int a, int b) {
    auto search = std::make_shared<std::unique_ptr<OpenPathSearch>>();
    return [a, b, search](const EdgeConfig& c) {
        if (!*search) *search = std::make_unique<OpenPathSearch>(c.domain());
        return (*search)->connects(c, {a}, {b});
    };
}

Event connected_to_ghost(int v) {
    auto search = std::make_shared<std::unique_ptr<OpenPathSearch>>();
    return [v, search](const EdgeConfig& c) {
        if (!*search) *search = std::make_unique<OpenPathSearch>(c.domain());
        return (*search)->connects_to_ghost(c, v);
    };
}

Event crossing(const Quad& quad) {
    auto search = std::make_shared<OpenPathSearch>(*quad.domain);
    auto from = quad.arc_vertices(0), to = quad.arc_vertices(2);
    DomainPtr keep = quad.domain;
    return [search, from, to, keep](const EdgeConfig& c) { return search->connects(c, from, to); };
}

Event at_least_open(int k) {
    return [k](const EdgeConfig& c) { return c.num_open() >= k; };
}

Event always() {
    return [](const EdgeConfig&) { return true; };
}

}  // namespace events

}  // namespace rcm
