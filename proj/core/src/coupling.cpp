#include "rcm/coupling.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <stdexcept>

#include "rcm/rng.hpp"
#include "rcm/sampler.hpp"
#include "rcm/summation.hpp"
#include "rcm/union_find.hpp"

namespace rcm::coupling {

// ---------------------------------------------------------------------------
// ConditionalTable

ConditionalTable::ConditionalTable(const exact::ExactMeasure& measure, int table_limit) {
    if (measure.has_ghost()) throw std::invalid_argument("couplings are defined without a magnetic field");
    n_ = measure.num_bits();
    pow3_.resize(n_ + 1);
    pow3_[0] = 1;
    for (int i = 1; i <= n_; ++i) pow3_[i] = pow3_[i - 1] * 3;
    root_ = pow3_[n_] - 1;
    const auto& prob = measure.probabilities();
    if (n_ > table_limit) {
        probs_ = prob;
        return;
    }
    sums_.assign(pow3_[n_], 0.0);
    std::vector<int> digit(n_, 0);
    for (std::uint64_t idx = 0; idx < pow3_[n_]; ++idx) {
        int low2 = -1;
        std::uint64_t mask = 0;
        for (int d = 0; d < n_; ++d) {
            if (digit[d] == 2) {
                low2 = d;
                break;
            }
            if (digit[d] == 1) mask |= std::uint64_t{1} << d;
        }
        if (low2 < 0) sums_[idx] = prob[mask];
        else sums_[idx] = sums_[idx - 2 * pow3_[low2]] + sums_[idx - pow3_[low2]];
        for (int d = 0; d < n_; ++d) {
            if (++digit[d] < 3) break;
            digit[d] = 0;
        }
    }
}

std::uint64_t ConditionalTable::reveal(std::uint64_t index, int e, bool open,
                                       const std::vector<std::uint64_t>& pow3) {
    return index - (open ? 1 : 2) * pow3[e];
}

double ConditionalTable::closed_probability(std::uint64_t index, int e) const {
    if (e < 0 || e >= n_ || (index / pow3_[e]) % 3 != 2) throw std::invalid_argument("edge already revealed");
    if (tabulated()) return sums_[index - 2 * pow3_[e]] / sums_[index];
    const std::uint64_t key = index * 32 + static_cast<std::uint64_t>(e);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    double v = scan(index, e);
    memo_.emplace(key, v);
    return v;
}

double ConditionalTable::scan(std::uint64_t index, int e) const {
    std::uint64_t known = 0, values = 0;
    std::uint64_t rest = index;
    for (int d = 0; d < n_; ++d, rest /= 3) {
        const int digit = static_cast<int>(rest % 3);
        if (digit == 2) continue;
        known |= std::uint64_t{1} << d;
        if (digit == 1) values |= std::uint64_t{1} << d;
    }
    const std::uint64_t bit = std::uint64_t{1} << e;
    CompensatedSum all, closed;
    for (std::uint64_t m = 0; m < probs_.size(); ++m) {
        if ((m & known) != values) continue;
        all.add(probs_[m]);
        if (!(m & bit)) closed.add(probs_[m]);
    }
    return closed.value() / all.value();
}

// ---------------------------------------------------------------------------
// CouplingState

CouplingState::CouplingState(DomainPtr d, BoundaryCondition bc_low, BoundaryCondition bc_high)
    : domain_(std::move(d)),
      bc_low_(std::move(bc_low)),
      bc_high_(std::move(bc_high)),
      low_(domain_),
      high_(domain_),
      revealed_(domain_->num_edges(), 0) {}

void CouplingState::record(const RevealedStep& s) {
    if (s.edge < 0 || s.edge >= domain_->num_edges() || revealed_[s.edge])
        throw std::logic_error("decision tree returned an invalid edge");
    revealed_[s.edge] = 1;
    low_.set(s.edge, s.low);
    high_.set(s.edge, s.high);
    history_.push_back(s);
}

bool CouplingState::ordered() const {
    for (const auto& s : history_)
        if (s.low && !s.high) return false;
    return true;
}

BoundaryCondition CouplingState::induced(const EdgeConfig& cfg, const BoundaryCondition& bc) const {
    const Domain& d = *domain_;
    UnionFind uf(d.num_vertices());
    for (const auto& s : history_)
        if (cfg.open(s.edge)) uf.unite(d.edge(s.edge).u, d.edge(s.edge).v);
    for (const auto& cls : bc.classes())
        for (int v : cls) uf.unite(cls.front(), v);
    std::vector<char> active(d.num_vertices(), 0);
    for (int e = 0; e < d.num_edges(); ++e)
        if (!revealed_[e]) active[d.edge(e).u] = active[d.edge(e).v] = 1;
    std::vector<int> labels(d.num_vertices(), -1);
    for (int v = 0; v < d.num_vertices(); ++v)
        if (active[v]) labels[v] = uf.find(v);
    return BoundaryCondition(d.num_vertices(), std::move(labels), std::nullopt);
}

// ---------------------------------------------------------------------------
// Faces touching the domain, for the dual explorations.

namespace {

struct FaceGraph {
    std::vector<std::array<int, 2>> faces_of_edge;
    std::vector<char> outer;
};

FaceGraph face_graph(const Domain& d) {
    FaceGraph fg;
    std::map<Vertex, int> index;
    auto face = [&](Vertex ll) {
        auto [it, inserted] = index.emplace(ll, static_cast<int>(index.size()));
        return it->second;
    };
    fg.faces_of_edge.resize(d.num_edges());
    for (int e = 0; e < d.num_edges(); ++e) {
        Vertex a = d.vertex(d.edge(e).u);
        if (d.edge(e).orientation == Orientation::Horizontal)
            fg.faces_of_edge[e] = {face(a), face({a.x, a.y - 1})};
        else
            fg.faces_of_edge[e] = {face(a), face({a.x - 1, a.y})};
    }
    fg.outer.assign(index.size(), 0);
    for (const auto& [ll, id] : index) {
        bool complete = d.find_edge(ll, {ll.x + 1, ll.y}) >= 0 && d.find_edge(ll, {ll.x, ll.y + 1}) >= 0 &&
                        d.find_edge({ll.x + 1, ll.y}, {ll.x + 1, ll.y + 1}) >= 0 &&
                        d.find_edge({ll.x, ll.y + 1}, {ll.x + 1, ll.y + 1}) >= 0;
        fg.outer[id] = complete ? 0 : 1;
    }
    return fg;
}

// Vertices joined to the boundary by revealed edges open in omega'.
std::vector<char> boundary_cluster(const CouplingState& st) {
    const Domain& d = st.domain();
    UnionFind uf(d.num_vertices());
    for (const auto& s : st.history())
        if (s.high) uf.unite(d.edge(s.edge).u, d.edge(s.edge).v);
    std::vector<char> root_hit(d.num_vertices(), 0);
    for (int v : d.boundary()) root_hit[uf.find(v)] = 1;
    std::vector<char> in(d.num_vertices(), 0);
    for (int v = 0; v < d.num_vertices(); ++v) in[v] = root_hit[uf.find(v)];
    return in;
}

// Faces joined to the outer faces through revealed edges closed in omega.
std::vector<char> dual_boundary_cluster(const CouplingState& st, const FaceGraph& fg) {
    const int nf = static_cast<int>(fg.outer.size());
    UnionFind uf(nf);
    for (const auto& s : st.history())
        if (!s.low) uf.unite(fg.faces_of_edge[s.edge][0], fg.faces_of_edge[s.edge][1]);
    std::vector<char> root_hit(nf, 0);
    for (int f = 0; f < nf; ++f)
        if (fg.outer[f]) root_hit[uf.find(f)] = 1;
    std::vector<char> in(nf, 0);
    for (int f = 0; f < nf; ++f) in[f] = root_hit[uf.find(f)];
    return in;
}

class FixedOrderTree final : public DecisionTree {
public:
    explicit FixedOrderTree(std::vector<int> order) : order_(std::move(order)) {}
    std::string name() const override { return "deterministic"; }
    void reset() override {}
    int next_edge(const CouplingState& st) override { return order_.at(st.time()); }

private:
    std::vector<int> order_;
};

class BoundaryClusterTree final : public DecisionTree {
public:
    explicit BoundaryClusterTree(const Domain& d) : d_(&d) { reset(); }
    std::string name() const override { return "boundary-cluster"; }

    void reset() override {
        inside_.assign(d_->num_vertices(), 0);
        for (int v : d_->boundary()) inside_[v] = 1;
        seen_ = 0;
    }

    int next_edge(const CouplingState& st) override {
        const auto& h = st.history();
        for (; seen_ < h.size(); ++seen_) {
            const Edge& ed = d_->edge(h[seen_].edge);
            if (h[seen_].high && (inside_[ed.u] || inside_[ed.v])) inside_[ed.u] = inside_[ed.v] = 1;
        }
        int fallback = -1;
        for (int e = 0; e < d_->num_edges(); ++e) {
            if (st.revealed(e)) continue;
            if (inside_[d_->edge(e).u] || inside_[d_->edge(e).v]) return e;
            if (fallback < 0) fallback = e;
        }
        return fallback;
    }

private:
    const Domain* d_;
    std::vector<char> inside_;
    std::size_t seen_ = 0;
};

class DualClusterTree final : public DecisionTree {
public:
    explicit DualClusterTree(const Domain& d) : d_(&d), fg_(face_graph(d)) { reset(); }
    std::string name() const override { return "dual-cluster"; }

    void reset() override {
        inside_ = fg_.outer;
        seen_ = 0;
    }

    int next_edge(const CouplingState& st) override {
        const auto& h = st.history();
        for (; seen_ < h.size(); ++seen_) {
            const auto& f = fg_.faces_of_edge[h[seen_].edge];
            if (!h[seen_].low && (inside_[f[0]] || inside_[f[1]])) inside_[f[0]] = inside_[f[1]] = 1;
        }
        int fallback = -1;
        for (int e = 0; e < d_->num_edges(); ++e) {
            if (st.revealed(e)) continue;
            const auto& f = fg_.faces_of_edge[e];
            if (inside_[f[0]] || inside_[f[1]]) return e;
            if (fallback < 0) fallback = e;
        }
        return fallback;
    }

private:
    const Domain* d_;
    FaceGraph fg_;
    std::vector<char> inside_;
    std::size_t seen_ = 0;
};

}  // namespace

TreePtr deterministic_tree(const Domain& d, std::vector<int> order) {
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> identity(d.num_edges());
    std::iota(identity.begin(), identity.end(), 0);
    if (sorted != identity) throw std::invalid_argument("edge order is not a permutation");
    return std::make_unique<FixedOrderTree>(std::move(order));
}

TreePtr deterministic_tree(const Domain& d) {
    std::vector<int> order(d.num_edges());
    std::iota(order.begin(), order.end(), 0);
    return std::make_unique<FixedOrderTree>(std::move(order));
}

TreePtr boundary_cluster_tree(const Domain& d) { return std::make_unique<BoundaryClusterTree>(d); }

TreePtr dual_cluster_tree(const Domain& d) { return std::make_unique<DualClusterTree>(d); }

StopRule stop_when_coincide() {
    return [](const CouplingState& st) { return st.xi() == st.xi_prime(); };
}

StopRule stop_when_boundary_cluster_explored() {
    return [](const CouplingState& st) {
        const Domain& d = st.domain();
        auto in = boundary_cluster(st);
        for (int e = 0; e < d.num_edges(); ++e)
            if (!st.revealed(e) && (in[d.edge(e).u] || in[d.edge(e).v])) return false;
        return true;
    };
}

StopRule stop_when_dual_cluster_explored() {
    // Face structure is cached per domain object.
    auto cache = std::make_shared<std::pair<const Domain*, FaceGraph>>(nullptr, FaceGraph{});
    return [cache](const CouplingState& st) {
        const Domain& d = st.domain();
        if (cache->first != &d) *cache = {&d, face_graph(d)};
        const FaceGraph& fg = cache->second;
        auto in = dual_boundary_cluster(st, fg);
        for (int e = 0; e < d.num_edges(); ++e)
            if (!st.revealed(e) && (in[fg.faces_of_edge[e][0]] || in[fg.faces_of_edge[e][1]])) return false;
        return true;
    };
}

// ---------------------------------------------------------------------------
// ExactCoupler

namespace {

exact::ExactMeasure checked_measure(const DomainPtr& d, const BoundaryCondition& bc, double p, double q,
                                    exact::EnumerationOptions opt) {
    ModelParams params{p, q, 0.0};
    params.validate();
    return exact::ExactMeasure(d, bc, params, opt);
}

void check_order(const BoundaryCondition& bc_low, const BoundaryCondition& bc_high, double p_low, double p_high,
                 double q) {
    if (!(p_low <= p_high)) throw std::invalid_argument("p_low must not exceed p_high");
    if (!(q >= 1.0)) throw std::invalid_argument("q must be at least 1");
    if (!leq(bc_low, bc_high)) throw std::invalid_argument("bc_low must be dominated by bc_high");
}

}  // namespace

ExactCoupler::ExactCoupler(DomainPtr d, BoundaryCondition bc_low, BoundaryCondition bc_high, double p_low,
                           double p_high, double q, exact::EnumerationOptions opt)
    : domain_((check_order(bc_low, bc_high, p_low, p_high, q), std::move(d))),
      bc_low_(std::move(bc_low)),
      bc_high_(std::move(bc_high)),
      low_measure_(checked_measure(domain_, bc_low_, p_low, q, opt)),
      high_measure_(checked_measure(domain_, bc_high_, p_high, q, opt)),
      low_(low_measure_),
      high_(high_measure_) {}

CouplingResult ExactCoupler::run(DecisionTree& tree, std::uint64_t seed, const StopRule& stop) const {
    const int n = domain_->num_edges();
    CouplingState st(domain_, bc_low_, bc_high_);
    CouplingResult res;
    tree.reset();
    CounterRng rng(seed);
    const auto& pow3 = low_.powers();
    std::uint64_t idx_low = low_.root(), idx_high = high_.root();
    for (int t = 0; t <= n; ++t) {
        if (stop && !res.at_stop && stop(st)) {
            res.at_stop = st;
            res.stop_time = t;
        }
        if (t == n) break;
        const int e = tree.next_edge(st);
        if (e < 0 || e >= n || st.revealed(e)) throw std::logic_error("decision tree returned an invalid edge");
        const double u = rng.uniform(0, static_cast<std::uint32_t>(e), Stream::Coupling);
        const bool lo = u >= low_.closed_probability(idx_low, e);
        const bool hi = u >= high_.closed_probability(idx_high, e);
        idx_low = ConditionalTable::reveal(idx_low, e, lo, pow3);
        idx_high = ConditionalTable::reveal(idx_high, e, hi, pow3);
        st.record({e, lo, hi, u});
        res.order.push_back(e);
        if (lo && !hi) ++res.monotonicity_violations;
    }
    res.omega = st.omega();
    res.omega_prime = st.omega_prime();
    if (!res.at_stop) res.at_stop = std::move(st);
    return res;
}

CouplingResult run_coupling(DecisionTree& tree, DomainPtr d, const BoundaryCondition& bc_low,
                            const BoundaryCondition& bc_high, double p_low, double p_high, double q,
                            std::uint64_t seed, const StopRule& stop) {
    ExactCoupler coupler(std::move(d), bc_low, bc_high, p_low, p_high, q);
    return coupler.run(tree, seed, stop);
}

// ---------------------------------------------------------------------------
// Heat-bath grand coupling

DynamicsResult dynamics_coupling(DomainPtr d, const BoundaryCondition& bc_low, const BoundaryCondition& bc_high,
                                 double p_low, double p_high, double q, std::uint64_t seed, std::int64_t sweeps) {
    check_order(bc_low, bc_high, p_low, p_high, q);
    if (sweeps < 0) throw std::invalid_argument("sweeps must be non-negative");
    ModelParams lo_params{p_low, q, 0.0}, hi_params{p_high, q, 0.0};
    lo_params.validate();
    hi_params.validate();
    sampler::ChainState low(d, bc_low, lo_params, seed, false);
    sampler::ChainState high(d, bc_high, hi_params, seed, true);
    DynamicsResult res;
    for (std::int64_t s = 1; s <= sweeps; ++s) {
        sampler::heat_bath_sweep(low);
        sampler::heat_bath_sweep(high);
        if (!leq(low.config(), high.config())) ++res.monotonicity_violations;
        if (res.coalescence < 0 && low.config() == high.config()) res.coalescence = s;
    }
    res.omega = low.config();
    res.omega_prime = high.config();
    for (int e = 0; e < d->num_edges(); ++e) res.differing_edges += res.omega.open(e) != res.omega_prime.open(e);
    return res;
}

}  // namespace rcm::coupling
