#include "rcm/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>

#include "rcm/summation.hpp"
#include "rcm/union_find.hpp"

namespace rcm::exact {

namespace {

constexpr int kHardBitLimit = 30;

// Union-find over a fixed small vertex set, restarted from a base partition per configuration.
struct SmallUnionFind {
    std::vector<int> parent;
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (a < b) std::swap(a, b);
        parent[a] = b;
        return true;
    }
};

}  // namespace

ExactMeasure::ExactMeasure(DomainPtr d, BoundaryCondition bc, ModelParams params, EnumerationOptions opt)
    : domain_(std::move(d)), bc_(std::move(bc)), params_(params) {
    params_.validate();
    if (!std::isfinite(params_.h)) throw std::invalid_argument("exact enumeration needs a finite field h");
    if (bc_.num_vertices() != domain_->num_vertices())
        throw std::invalid_argument("boundary condition does not match the domain");
    const int ne = domain_->num_edges();
    const int nv = domain_->num_vertices();
    ghost_ = params_.h > 0.0;
    bits_ = ne + (ghost_ ? nv : 0);
    if (bits_ > opt.cap || bits_ > kHardBitLimit)
        throw CapExceeded("enumeration needs " + std::to_string(bits_) + " edges, cap is " + std::to_string(opt.cap));

    const int nodes = nv + (ghost_ ? 1 : 0);
    SmallUnionFind base{std::vector<int>(nodes)};
    std::iota(base.parent.begin(), base.parent.end(), 0);
    int base_components = nodes;
    for (int c = 0; c < bc_.num_classes(); ++c) {
        const auto& m = bc_.classes()[c];
        for (std::size_t i = 1; i < m.size(); ++i) base_components -= base.unite(m[0], m[i]);
        if (ghost_ && bc_.ghost_label() == c) base_components -= base.unite(m[0], nv);
    }
    std::vector<std::pair<int, int>> ends(bits_);
    for (int e = 0; e < ne; ++e) ends[e] = {domain_->edge(e).u, domain_->edge(e).v};
    if (ghost_)
        for (int v = 0; v < nv; ++v) ends[ne + v] = {v, nv};

    const double log_ratio = std::log(params_.p) - std::log1p(-params_.p);
    const double log_ghost = ghost_ ? std::log(std::expm1(params_.h)) : 0.0;
    const double log_q = std::log(params_.q);
    const std::uint64_t primal_mask = (std::uint64_t{1} << ne) - 1;

    const std::uint64_t n = num_configs();
    prob_.resize(n);
    SmallUnionFind uf;
    double max_log = -INFINITY;
    for (std::uint64_t m = 0; m < n; ++m) {
        uf.parent = base.parent;
        int k = base_components;
        for (std::uint64_t rest = m; rest; rest &= rest - 1) {
            int b = std::countr_zero(rest);
            k -= uf.unite(ends[b].first, ends[b].second);
        }
        double lw = std::popcount(m & primal_mask) * log_ratio + k * log_q;
        if (ghost_) lw += std::popcount(m >> ne) * log_ghost;
        prob_[m] = lw;
        max_log = std::max(max_log, lw);
    }
    CompensatedSum sum;
    for (double lw : prob_) sum.add(std::exp(lw - max_log));
    log_z_ = max_log + std::log(sum.value());
    for (double& x : prob_) x = std::exp(x - log_z_);
}

double ExactMeasure::partition_function() const { return std::exp(log_z_); }

EdgeConfig ExactMeasure::config_of(std::uint64_t mask) const {
    EdgeConfig c(domain_, ghost_);
    const int ne = domain_->num_edges();
    for (int e = 0; e < ne; ++e) c.set(e, (mask >> e) & 1);
    if (ghost_)
        for (int v = 0; v < domain_->num_vertices(); ++v) c.set_ghost(v, (mask >> (ne + v)) & 1);
    return c;
}

std::uint64_t ExactMeasure::mask_of(const EdgeConfig& cfg) const {
    std::uint64_t m = 0;
    const int ne = domain_->num_edges();
    for (int e = 0; e < ne; ++e)
        if (cfg.open(e)) m |= std::uint64_t{1} << e;
    if (ghost_ && cfg.has_ghost())
        for (int v = 0; v < domain_->num_vertices(); ++v)
            if (cfg.ghost_open(v)) m |= std::uint64_t{1} << (ne + v);
    return m;
}

double ExactMeasure::expectation(const Observable& f) const {
    // Gray-code order: consecutive configurations differ in one edge.
    EdgeConfig cfg(domain_, ghost_);
    const int ne = domain_->num_edges();
    const std::uint64_t n = num_configs();
    std::uint64_t g = 0;
    CompensatedSum sum;
    for (std::uint64_t i = 0; i < n; ++i) {
        if (i > 0) {
            int b = std::countr_zero(i);
            g ^= std::uint64_t{1} << b;
            if (b < ne) cfg.set(b, !cfg.open(b));
            else cfg.set_ghost(b - ne, !cfg.ghost_open(b - ne));
        }
        double v = f(cfg);
        if (v != 0.0) sum.add(v * prob_[g]);
    }
    return sum.value();
}

double ExactMeasure::probability(const Event& event) const {
    return expectation([&](const EdgeConfig& c) { return event(c) ? 1.0 : 0.0; });
}

double ExactMeasure::covariance(const Event& a, const Event& b) const {
    double pa = probability(a);
    double pb = probability(b);
    double pab = probability([&](const EdgeConfig& c) { return a(c) && b(c); });
    return pab - pa * pb;
}

std::vector<double> ExactMeasure::edge_marginals() const {
    const int ne = domain_->num_edges();
    std::vector<CompensatedSum> acc(ne);
    for (std::uint64_t m = 0; m < num_configs(); ++m)
        for (std::uint64_t rest = m & ((std::uint64_t{1} << ne) - 1); rest; rest &= rest - 1)
            acc[std::countr_zero(rest)].add(prob_[m]);
    std::vector<double> out(ne);
    for (int e = 0; e < ne; ++e) out[e] = acc[e].value();
    return out;
}

std::vector<double> ExactMeasure::primal_distribution() const {
    const int ne = domain_->num_edges();
    std::vector<double> out(std::size_t{1} << ne, 0.0);
    const std::uint64_t primal = (std::uint64_t{1} << ne) - 1;
    for (std::uint64_t m = 0; m < num_configs(); ++m) out[m & primal] += prob_[m];
    return out;
}

double partition_function(const ModelParams& params, DomainPtr d, const BoundaryCondition& bc,
                          EnumerationOptions opt) {
    return ExactMeasure(std::move(d), bc, params, opt).partition_function();
}

double event_probability(const ModelParams& params, DomainPtr d, const BoundaryCondition& bc, const Event& event,
                         EnumerationOptions opt) {
    return ExactMeasure(std::move(d), bc, params, opt).probability(event);
}

double covariance(const ModelParams& params, DomainPtr d, const BoundaryCondition& bc, const Event& a,
                  const Event& b, EnumerationOptions opt) {
    return ExactMeasure(std::move(d), bc, params, opt).covariance(a, b);
}

double conditional_edge_probability(const ModelParams& params, bool connected_off_e) {
    if (connected_off_e) return params.p;
    return params.p / (params.p + (1.0 - params.p) * params.q);
}

std::pair<double, double> boost_formula_check(const ModelParams& params, const Quad& quad, EnumerationOptions opt) {
    const Domain& d = *quad.domain;
    auto ab = quad.arc_vertices(0), cd = quad.arc_vertices(2);
    std::vector<int> separate(d.num_vertices(), -1), joined(d.num_vertices(), -1);
    for (int v : ab) separate[v] = joined[v] = 0;
    for (int v : cd) {
        separate[v] = 1;
        joined[v] = 0;
    }
    BoundaryCondition mix(d.num_vertices(), separate, std::nullopt);
    BoundaryCondition mix_joined(d.num_vertices(), joined, std::nullopt);
    auto event = events::crossing(quad);
    double base = ExactMeasure(quad.domain, mix, params, opt).probability(event);
    double lhs = ExactMeasure(quad.domain, mix_joined, params, opt).probability(event);
    double rhs = params.q * base / (1.0 + (params.q - 1.0) * base);
    return {lhs, rhs};
}

std::pair<double, double> crossing_duality_check(const ModelParams& params, const Quad& quad, EnumerationOptions opt) {
    if (params.h != 0.0) throw std::invalid_argument("crossing duality requires h = 0");
    DualQuad dq = make_dual_quad(quad);
    double primal = ExactMeasure(quad.domain, BoundaryCondition::free(*quad.domain), params, opt)
                        .probability(events::crossing(quad));
    ModelParams dual_params{dual_p(params.p, params.q), params.q, 0.0};
    OpenPathSearch search(*dq.dual.domain);
    double dual = ExactMeasure(dq.dual.domain, dq.dual.bc, dual_params, opt).probability([&](const EdgeConfig& c) {
        return search.connects(c, dq.bc_side, dq.da_side, &dq.exterior);
    });
    return {primal, 1.0 - dual};
}

double spatial_markov_deviation(const ExactMeasure& measure, const std::vector<int>& inner_edges) {
    const Domain& d = measure.domain();
    const int ne = d.num_edges(), nv = d.num_vertices();
    const bool ghost = measure.has_ghost();

    std::vector<Vertex> hv;
    std::vector<std::pair<Vertex, Vertex>> he;
    std::vector<int> full_vertex_of;
    for (int e : inner_edges) {
        if (e < 0 || e >= ne) throw std::invalid_argument("inner edge out of range");
        he.emplace_back(d.vertex(d.edge(e).u), d.vertex(d.edge(e).v));
        hv.push_back(he.back().first);
        hv.push_back(he.back().second);
    }
    auto h = share(Domain(hv, he));
    const int hne = h->num_edges(), hnv = h->num_vertices();
    for (int v = 0; v < hnv; ++v) full_vertex_of.push_back(d.find_vertex(h->vertex(v)));

    // Full-mask bit -> inner-mask bit.
    std::vector<std::pair<int, int>> bit_map;
    std::uint64_t inner_mask = 0;
    for (int e : inner_edges) {
        int he_idx = h->find_edge(d.vertex(d.edge(e).u), d.vertex(d.edge(e).v));
        bit_map.emplace_back(e, he_idx);
        inner_mask |= std::uint64_t{1} << e;
    }
    if (ghost) {
        for (int v = 0; v < hnv; ++v) {
            int full_bit = ne + full_vertex_of[v];
            bit_map.emplace_back(full_bit, hne + v);
            inner_mask |= std::uint64_t{1} << full_bit;
        }
    }
    const std::uint64_t all = measure.num_configs() - 1;
    const std::uint64_t outer_mask = all & ~inner_mask;
    auto to_inner = [&](std::uint64_t full) {
        std::uint64_t m = 0;
        for (auto [fb, ib] : bit_map)
            if ((full >> fb) & 1) m |= std::uint64_t{1} << ib;
        return m;
    };

    std::map<std::pair<std::vector<int>, int>, std::unique_ptr<ExactMeasure>> cache;
    const auto& prob = measure.probabilities();
    double worst = 0.0;
    std::uint64_t outer = 0;
    std::vector<double> cond;
    while (true) {
        // Induced boundary condition from the outside configuration.
        UnionFind uf(nv + 1);
        for (int c = 0; c < measure.bc().num_classes(); ++c) {
            const auto& m = measure.bc().classes()[c];
            for (std::size_t i = 1; i < m.size(); ++i) uf.unite(m[0], m[i]);
            if (ghost && measure.bc().ghost_label() == c) uf.unite(m[0], nv);
        }
        for (int e = 0; e < ne; ++e)
            if ((outer >> e) & 1) uf.unite(d.edge(e).u, d.edge(e).v);
        if (ghost)
            for (int v = 0; v < nv; ++v)
                if ((outer >> (ne + v)) & 1) uf.unite(v, nv);
        std::vector<int> labels(hnv);
        for (int v = 0; v < hnv; ++v) labels[v] = uf.find(full_vertex_of[v]);
        int ghost_label = ghost ? uf.find(nv) : -1;
        auto key = std::make_pair(labels, ghost_label);
        auto it = cache.find(key);
        if (it == cache.end()) {
            BoundaryCondition induced(hnv, labels, ghost ? std::optional<int>(ghost_label) : std::nullopt);
            it = cache.emplace(key, std::make_unique<ExactMeasure>(h, induced, measure.params(),
                                                                   EnumerationOptions{kHardBitLimit}))
                     .first;
        }
        const ExactMeasure& local = *it->second;

        cond.clear();
        CompensatedSum total_sum;
        std::uint64_t inner = 0;
        while (true) {
            double w = prob[outer | inner];
            cond.push_back(w);
            total_sum.add(w);
            if (inner == inner_mask) break;
            inner = (inner - inner_mask) & inner_mask;
        }
        const double total = total_sum.value();
        inner = 0;
        for (double w : cond) {
            worst = std::max(worst, std::abs(w / total - local.probability_of(to_inner(inner))));
            inner = (inner - inner_mask) & inner_mask;
        }
        if (outer == outer_mask) break;
        outer = (outer - outer_mask) & outer_mask;
    }
    return worst;
}

}  // namespace rcm::exact
