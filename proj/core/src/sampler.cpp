#include "rcm/sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "rcm/exact.hpp"
#include "rcm/union_find.hpp"

namespace rcm::sampler {

std::string to_string(Algorithm a) { return a == Algorithm::HeatBath ? "heatbath" : "cm"; }

Algorithm parse_algorithm(const std::string& name) {
    if (name == "heatbath" || name == "heat-bath" || name == "hb") return Algorithm::HeatBath;
    if (name == "cm" || name == "chayes-machta") return Algorithm::ChayesMachta;
    throw std::invalid_argument("unknown algorithm '" + name + "'");
}

ChainState::ChainState(DomainPtr d, BoundaryCondition bc, ModelParams params, std::uint64_t seed, bool start_open)
    : config_(start_open ? EdgeConfig::all_open(d, params.h > 0.0) : EdgeConfig(d, params.h > 0.0)),
      bc_(std::move(bc)),
      params_(params),
      rng_(seed) {
    params_.validate();
    if (bc_.num_vertices() != d->num_vertices()) throw std::invalid_argument("boundary condition does not match");
    const int nodes = d->num_vertices() + 1;
    mark_.assign(nodes, 0);
    class_mark_.assign(bc_.num_classes() + 1, 0);
    queue_.reserve(nodes);
    ghost_pos_.assign(d->num_vertices(), -1);
    if (config_.has_ghost())
        for (int v = 0; v < d->num_vertices(); ++v)
            if (config_.ghost_open(v)) flip_ghost_list(v, true);
}

void ChainState::set_config(const EdgeConfig& cfg) {
    if (cfg.num_edges() != config_.num_edges() || cfg.has_ghost() != config_.has_ghost())
        throw std::invalid_argument("configuration does not match the chain");
    ghost_open_.clear();
    std::fill(ghost_pos_.begin(), ghost_pos_.end(), -1);
    config_ = cfg;
    if (config_.has_ghost())
        for (int v = 0; v < domain().num_vertices(); ++v)
            if (config_.ghost_open(v)) flip_ghost_list(v, true);
    labels_valid_ = false;
}

void ChainState::flip_ghost_list(int v, bool open) {
    if (open) {
        ghost_pos_[v] = static_cast<int>(ghost_open_.size());
        ghost_open_.push_back(v);
    } else {
        int pos = ghost_pos_[v];
        int last = ghost_open_.back();
        ghost_open_[pos] = last;
        ghost_pos_[last] = pos;
        ghost_open_.pop_back();
        ghost_pos_[v] = -1;
    }
}

bool ChainState::search(int from, int to, int skip_edge, int skip_ghost) {
    if (from == to) return true;
    const Domain& d = domain();
    const int g = ghost_node();
    const bool ghost = config_.has_ghost();
    const auto glabel = bc_.ghost_label();
    if (++stamp_ == 0) {
        std::fill(mark_.begin(), mark_.end(), 0);
        std::fill(class_mark_.begin(), class_mark_.end(), 0);
        stamp_ = 1;
    }
    queue_.clear();
    auto visit = [&](int w) {
        if (mark_[w] == stamp_) return false;
        mark_[w] = stamp_;
        queue_.push_back(w);
        return w == to;
    };
    auto expand_class = [&](int c) {
        if (class_mark_[c] == stamp_) return false;
        class_mark_[c] = stamp_;
        for (int w : bc_.classes()[c])
            if (visit(w)) return true;
        if (ghost && glabel == c && visit(g)) return true;
        return false;
    };
    visit(from);
    for (std::size_t head = 0; head < queue_.size(); ++head) {
        const int x = queue_[head];
        if (x == g) {
            for (int w : ghost_open_)
                if (w != skip_ghost && visit(w)) return true;
            if (glabel && expand_class(*glabel)) return true;
            continue;
        }
        for (int k = 0; k < 4; ++k) {
            int e = d.incident_edge(x, static_cast<Direction>(k));
            if (e < 0 || e == skip_edge || !config_.open(e)) continue;
            if (visit(d.other_endpoint(e, x))) return true;
        }
        int c = bc_.label(x);
        if (c >= 0 && expand_class(c)) return true;
        if (ghost && x != skip_ghost && config_.ghost_open(x) && visit(g)) return true;
    }
    return false;
}

bool ChainState::connected_off_edge(int e) {
    const auto& ed = domain().edge(e);
    return search(ed.u, ed.v, e, -1);
}

bool ChainState::ghost_connected_off(int v) { return search(v, ghost_node(), -1, v); }

void ChainState::relabel() {
    labels_ = cluster_labels(config_, bc_);
    labels_valid_ = true;
}

bool ChainState::labels_consistent() const {
    if (!labels_valid_) return true;
    return labels_ == cluster_labels(config_, bc_);
}

void heat_bath_sweep(ChainState& s) {
    const Domain& d = s.domain();
    const ModelParams& mp = s.params_;
    const bool independent = mp.q == 1.0;
    const double p_joined = mp.p;
    const double p_split = exact::conditional_edge_probability(mp, false);
    if (!independent && !s.labels_valid_) s.relabel();
    const std::uint64_t sweep = s.sweeps_;
    bool changed = false;
    for (int e = 0; e < d.num_edges(); ++e) {
        const auto& ed = d.edge(e);
        const bool was_open = s.config_.open(e);
        bool joined = false;
        if (!independent) {
            if (!was_open && s.labels_valid_) joined = s.labels_[ed.u] == s.labels_[ed.v];
            else joined = s.search(ed.u, ed.v, e, -1);
        }
        const bool now_open = s.rng_.uniform(sweep, static_cast<std::uint32_t>(e), Stream::HeatBath) <
                              (joined ? p_joined : p_split);
        if (now_open == was_open) continue;
        s.config_.set(e, now_open);
        changed = true;
        if (s.labels_valid_ && ((now_open && s.labels_[ed.u] != s.labels_[ed.v]) || (!now_open && !joined)))
            s.labels_valid_ = false;
    }
    if (s.config_.has_ghost()) {
        ModelParams gp{mp.ghost_p(), mp.q, 0.0};
        const double g_joined = gp.p;
        const double g_split = gp.p >= 1.0 ? 1.0 : exact::conditional_edge_probability(gp, false);
        const int g = s.ghost_node();
        for (int v = 0; v < d.num_vertices(); ++v) {
            const bool was_open = s.config_.ghost_open(v);
            bool joined = false;
            if (!independent) {
                if (!was_open && s.labels_valid_) joined = s.labels_[v] == s.labels_[g];
                else joined = s.search(v, g, -1, v);
            }
            const bool now_open =
                s.rng_.uniform(sweep, static_cast<std::uint32_t>(d.num_edges() + v), Stream::HeatBath) <
                (joined ? g_joined : g_split);
            if (now_open == was_open) continue;
            s.config_.set_ghost(v, now_open);
            s.flip_ghost_list(v, now_open);
            changed = true;
            if (s.labels_valid_ && ((now_open && s.labels_[v] != s.labels_[g]) || (!now_open && !joined)))
                s.labels_valid_ = false;
        }
    }
    if (independent && changed) s.labels_valid_ = false;
    ++s.sweeps_;
}

void chayes_machta_step(ChainState& s) {
    if (s.params_.h != 0.0) throw std::invalid_argument("Chayes-Machta update requires h = 0");
    const Domain& d = s.domain();
    const int n = d.num_vertices();
    UnionFind uf(n);
    for (const auto& members : s.bc_.classes())
        for (std::size_t i = 1; i < members.size(); ++i) uf.unite(members[0], members[i]);
    for (int e = 0; e < d.num_edges(); ++e)
        if (s.config_.open(e)) uf.unite(d.edge(e).u, d.edge(e).v);
    const std::uint64_t step = s.sweeps_;
    const double activation = 1.0 / s.params_.q;
    s.active_.assign(n, 0);
    for (int v = 0; v < n; ++v) {
        int r = uf.find(v);
        if (r == v)
            s.active_[v] = s.rng_.uniform(step, static_cast<std::uint32_t>(v), Stream::ClusterActivation) < activation;
        else
            s.active_[v] = s.active_[r];
    }
    for (int e = 0; e < d.num_edges(); ++e) {
        const auto& ed = d.edge(e);
        if (!s.active_[ed.u] || !s.active_[ed.v]) continue;
        s.config_.set(e, s.rng_.uniform(step, static_cast<std::uint32_t>(e), Stream::ClusterEdge) < s.params_.p);
    }
    s.labels_valid_ = false;
    ++s.sweeps_;
}

void advance(ChainState& state, Algorithm algo) {
    if (algo == Algorithm::HeatBath) heat_bath_sweep(state);
    else chayes_machta_step(state);
}

namespace {

Observable bounding_box_crossing(const Domain& d) {
    std::vector<int> left, right;
    for (int v = 0; v < d.num_vertices(); ++v) {
        if (d.vertex(v).x == d.bbox().x_min) left.push_back(v);
        if (d.vertex(v).x == d.bbox().x_max) right.push_back(v);
    }
    auto search = std::make_shared<OpenPathSearch>(d);
    return [=](const EdgeConfig& c) { return search->connects(c, left, right) ? 1.0 : 0.0; };
}

constexpr std::int64_t kMinBurnIn = 1000;

}  // namespace

std::int64_t automatic_burn_in(ChainState& state, Algorithm algo) {
    auto monitor = bounding_box_crossing(state.domain());
    std::vector<double> series;
    series.reserve(kMinBurnIn);
    for (std::int64_t i = 0; i < kMinBurnIn; ++i) {
        advance(state, algo);
        series.push_back(monitor(state.config()));
    }
    std::vector<double> tail(series.begin() + kMinBurnIn / 2, series.end());
    double tau = integrated_autocorrelation_time(tail);
    std::int64_t need = std::max<std::int64_t>(kMinBurnIn, static_cast<std::int64_t>(std::ceil(20.0 * tau)));
    for (std::int64_t i = kMinBurnIn; i < need; ++i) advance(state, algo);
    return need;
}

namespace {

void check_budget(const RunOptions& o, std::int64_t burn) {
    if (o.batches < 32) throw std::invalid_argument("at least 32 batches are required");
    if (o.budget - burn < o.batches)
        throw std::invalid_argument("budget too small: need at least " + std::to_string(o.batches) +
                                    " sweeps after burn-in");
}

Estimate make_estimate(const BatchMeans& bm, const ModelParams& mp, const RunOptions& o, std::int64_t burn) {
    Estimate e;
    e.mean = bm.mean();
    e.std_error = bm.std_error();
    e.n_samples = bm.used_samples();
    e.seed = o.seed;
    e.params = mp;
    e.n_batches = bm.n_batches();
    e.burn_in = burn;
    return e;
}

}  // namespace

BatchRun run_batches(const VectorObservable& f, int k, const ModelParams& params, DomainPtr d,
                     const BoundaryCondition& bc, const RunOptions& options) {
    if (options.burn_in >= 0) check_budget(options, options.burn_in);
    if (options.algo == Algorithm::ChayesMachta && params.h != 0.0)
        throw std::invalid_argument("Chayes-Machta update requires h = 0");
    ChainState state(std::move(d), bc, params, options.seed, options.start_open);
    BatchRun run;
    run.burn_in = options.burn_in;
    if (run.burn_in < 0) run.burn_in = automatic_burn_in(state, options.algo);
    else
        for (std::int64_t i = 0; i < run.burn_in; ++i) advance(state, options.algo);
    check_budget(options, run.burn_in);
    const std::int64_t n = options.budget - run.burn_in;
    for (int i = 0; i < k; ++i) run.series.emplace_back(n, options.batches);
    const std::int64_t used = run.series.empty() ? 0 : run.series.front().used_samples();
    std::vector<double> x(k);
    for (std::int64_t s = 0; s < used; ++s) {
        advance(state, options.algo);
        f(state.config(), x);
        for (int i = 0; i < k; ++i) {
            run.series[i].add(x[i]);
            if (options.dump) options.dump(state.sweep_count(), i, x[i]);
        }
    }
    return run;
}

std::vector<Estimate> estimate_vector(const VectorObservable& f, int k, const ModelParams& params, DomainPtr d,
                                      const BoundaryCondition& bc, const RunOptions& options) {
    const BatchRun run = run_batches(f, k, params, std::move(d), bc, options);
    std::vector<Estimate> out;
    for (const auto& bm : run.series) out.push_back(make_estimate(bm, params, options, run.burn_in));
    return out;
}

std::vector<Estimate> estimate_many(const std::vector<Observable>& observables, const ModelParams& params,
                                    DomainPtr d, const BoundaryCondition& bc, const RunOptions& options) {
    VectorObservable f = [&](const EdgeConfig& c, std::vector<double>& x) {
        for (std::size_t i = 0; i < observables.size(); ++i) x[i] = observables[i](c);
    };
    return estimate_vector(f, static_cast<int>(observables.size()), params, std::move(d), bc, options);
}

Estimate estimate(const Event& event, const ModelParams& params, DomainPtr d, const BoundaryCondition& bc,
                  std::int64_t budget, std::int64_t burn_in, std::uint64_t seed, Algorithm algo) {
    if (burn_in < 0 || budget <= burn_in) throw std::invalid_argument("need budget > burn_in >= 0");
    RunOptions o;
    o.budget = budget;
    o.burn_in = burn_in;
    o.seed = seed;
    o.algo = algo;
    Observable f = [&](const EdgeConfig& c) { return event(c) ? 1.0 : 0.0; };
    return estimate_many({f}, params, std::move(d), bc, o).front();
}

PairedEstimates estimate_paired_vector(const VectorObservable& f, int k, const ModelParams& params, DomainPtr d,
                                       const BoundaryCondition& bc_high, const BoundaryCondition& bc_low,
                                       const RunOptions& options) {
    if (options.burn_in >= 0) check_budget(options, options.burn_in);
    if (options.algo == Algorithm::ChayesMachta && params.h != 0.0)
        throw std::invalid_argument("Chayes-Machta update requires h = 0");
    ChainState high(d, bc_high, params, options.seed, options.start_open);
    ChainState low(d, bc_low, params, options.seed, options.start_open);
    std::int64_t burn = options.burn_in;
    if (burn < 0) {
        burn = automatic_burn_in(high, options.algo);
        for (std::int64_t i = 0; i < burn; ++i) advance(low, options.algo);
    } else {
        for (std::int64_t i = 0; i < burn; ++i) {
            advance(high, options.algo);
            advance(low, options.algo);
        }
    }
    check_budget(options, burn);
    const std::int64_t n = options.budget - burn;
    std::vector<BatchMeans> bh, bl, bd;
    for (int i = 0; i < k; ++i) {
        bh.emplace_back(n, options.batches);
        bl.emplace_back(n, options.batches);
        bd.emplace_back(n, options.batches);
    }
    const std::int64_t used = k == 0 ? 0 : bh.front().used_samples();
    std::vector<double> xh(k), xl(k);
    for (std::int64_t s = 0; s < used; ++s) {
        advance(high, options.algo);
        advance(low, options.algo);
        f(high.config(), xh);
        f(low.config(), xl);
        for (int i = 0; i < k; ++i) {
            bh[i].add(xh[i]);
            bl[i].add(xl[i]);
            bd[i].add(xh[i] - xl[i]);
        }
    }
    PairedEstimates out;
    for (int i = 0; i < k; ++i) {
        out.high.push_back(make_estimate(bh[i], params, options, burn));
        out.low.push_back(make_estimate(bl[i], params, options, burn));
        out.difference.push_back(make_estimate(bd[i], params, options, burn));
    }
    return out;
}

PairedEstimates estimate_paired(const std::vector<Observable>& observables, const ModelParams& params, DomainPtr d,
                                const BoundaryCondition& bc_high, const BoundaryCondition& bc_low,
                                const RunOptions& options) {
    VectorObservable f = [&](const EdgeConfig& c, std::vector<double>& x) {
        for (std::size_t i = 0; i < observables.size(); ++i) x[i] = observables[i](c);
    };
    return estimate_paired_vector(f, static_cast<int>(observables.size()), params, std::move(d), bc_high, bc_low,
                                  options);
}

}  // namespace rcm::sampler
