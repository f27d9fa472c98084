#include "rcm/model.hpp"

#include <cmath>
#include <stdexcept>

#include "rcm/union_find.hpp"

namespace rcm {

double ModelParams::critical_p(double q) {
    if (!(q > 0.0)) throw std::invalid_argument("q must be positive");
    return std::sqrt(q) / (1.0 + std::sqrt(q));
}

void ModelParams::validate() const {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0,1)");
    if (!(q >= 1.0) || !std::isfinite(q)) throw std::invalid_argument("q must be >= 1");
    if (!(h >= 0.0) || std::isnan(h)) throw std::invalid_argument("h must be >= 0");
}

double ModelParams::ghost_p() const { return std::isinf(h) ? 1.0 : -std::expm1(-h); }

EdgeConfig::EdgeConfig(DomainPtr d, bool with_ghost) : domain_(std::move(d)) {
    bits_.assign(domain_->num_edges(), 0);
    if (with_ghost) ghost_.assign(domain_->num_vertices(), 0);
}

EdgeConfig EdgeConfig::all_open(DomainPtr d, bool with_ghost) {
    EdgeConfig c(std::move(d), with_ghost);
    std::fill(c.bits_.begin(), c.bits_.end(), 1);
    std::fill(c.ghost_.begin(), c.ghost_.end(), 1);
    return c;
}

int EdgeConfig::num_open() const {
    int n = 0;
    for (auto b : bits_) n += b;
    return n;
}

int EdgeConfig::num_ghost_open() const {
    int n = 0;
    for (auto b : ghost_) n += b;
    return n;
}

std::string EdgeConfig::to_string() const {
    std::string s;
    s.reserve(bits_.size() + ghost_.size() + 1);
    for (auto b : bits_) s.push_back(b ? '1' : '0');
    if (has_ghost()) {
        s.push_back('|');
        for (auto b : ghost_) s.push_back(b ? '1' : '0');
    }
    return s;
}

bool leq(const EdgeConfig& a, const EdgeConfig& b) {
    if (a.bits_.size() != b.bits_.size() || a.ghost_.size() != b.ghost_.size())
        throw std::invalid_argument("configurations on different domains");
    for (std::size_t i = 0; i < a.bits_.size(); ++i)
        if (a.bits_[i] > b.bits_[i]) return false;
    for (std::size_t i = 0; i < a.ghost_.size(); ++i)
        if (a.ghost_[i] > b.ghost_[i]) return false;
    return true;
}

namespace {

UnionFind wired_union_find(const EdgeConfig& cfg, const BoundaryCondition& bc) {
    const Domain& d = cfg.domain();
    const int n = d.num_vertices();
    if (bc.num_vertices() != n) throw std::invalid_argument("boundary condition does not match the domain");
    const bool ghost = cfg.has_ghost();
    UnionFind uf(n + (ghost ? 1 : 0));
    for (int c = 0; c < bc.num_classes(); ++c) {
        const auto& members = bc.classes()[c];
        for (std::size_t i = 1; i < members.size(); ++i) uf.unite(members[0], members[i]);
        if (ghost && bc.ghost_label() == c) uf.unite(members[0], n);
    }
    for (int e = 0; e < d.num_edges(); ++e)
        if (cfg.open(e)) uf.unite(d.edge(e).u, d.edge(e).v);
    if (ghost)
        for (int v = 0; v < n; ++v)
            if (cfg.ghost_open(v)) uf.unite(v, n);
    return uf;
}

}  // namespace

int cluster_count(const EdgeConfig& cfg, const BoundaryCondition& bc) {
    return wired_union_find(cfg, bc).components();
}

std::vector<int> cluster_labels(const EdgeConfig& cfg, const BoundaryCondition& bc) {
    auto uf = wired_union_find(cfg, bc);
    std::vector<int> labels(uf.size());
    for (int i = 0; i < uf.size(); ++i) labels[i] = uf.find(i);
    return labels;
}

bool connected(const EdgeConfig& cfg, int a, int b) {
    const Domain& d = cfg.domain();
    UnionFind uf(d.num_vertices());
    for (int e = 0; e < d.num_edges(); ++e)
        if (cfg.open(e)) uf.unite(d.edge(e).u, d.edge(e).v);
    return uf.same(a, b);
}

}  // namespace rcm
