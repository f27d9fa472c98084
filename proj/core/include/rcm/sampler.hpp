#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rcm/events.hpp"
#include "rcm/model.hpp"
#include "rcm/rng.hpp"
#include "rcm/statistics.hpp"

namespace rcm::sampler {

enum class Algorithm { HeatBath, ChayesMachta };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

// Markov chain state. With h > 0 the configuration carries ghost edges.
class ChainState {
public:
    ChainState(DomainPtr d, BoundaryCondition bc, ModelParams params, std::uint64_t seed, bool start_open = false);

    const EdgeConfig& config() const { return config_; }
    EdgeConfig& config() { return config_; }
    const Domain& domain() const { return config_.domain(); }
    const BoundaryCondition& bc() const { return bc_; }
    const ModelParams& params() const { return params_; }
    const CounterRng& rng() const { return rng_; }
    std::uint64_t sweep_count() const { return sweeps_; }

    // Endpoints of primal edge e joined off e (through open edges, wirings and the ghost).
    bool connected_off_edge(int e);
    // Vertex v joined to the ghost off v's ghost edge.
    bool ghost_connected_off(int v);
    // Rebuild cached component labels.
    void relabel();
    bool labels_valid() const { return labels_valid_; }
    // Component labels agree with a from-scratch labeling (used by tests).
    bool labels_consistent() const;

    // Exchange the configuration (e.g. to restart from a chosen state).
    void set_config(const EdgeConfig& cfg);

private:
    friend void heat_bath_sweep(ChainState&);
    friend void chayes_machta_step(ChainState&);

    bool search(int from, int to, int skip_edge, int skip_ghost);
    void flip_ghost_list(int v, bool open);
    int ghost_node() const { return config_.domain().num_vertices(); }

    EdgeConfig config_;
    BoundaryCondition bc_;
    ModelParams params_;
    CounterRng rng_;
    std::uint64_t sweeps_ = 0;

    std::vector<int> labels_;
    bool labels_valid_ = false;
    std::vector<unsigned> mark_;
    std::vector<unsigned> class_mark_;
    unsigned stamp_ = 0;
    std::vector<int> queue_;
    // Vertices whose ghost edge is open, with positions for O(1) removal.
    std::vector<int> ghost_open_;
    std::vector<int> ghost_pos_;
    std::vector<char> active_;
};

// One pass over all edges in index order (ghost edges after primal edges); each edge is
// redrawn from its conditional law given the rest.
void heat_bath_sweep(ChainState& state);
// Cluster update: each cluster (wired classes count as one) is active with probability 1/q,
// edges between active vertices are redrawn as Bernoulli(p). Requires h = 0.
void chayes_machta_step(ChainState& state);
void advance(ChainState& state, Algorithm algo);

struct RunOptions {
    std::int64_t budget = 100000;  // sweeps, burn-in included
    std::int64_t burn_in = -1;     // negative: automatic
    std::uint64_t seed = 1;
    Algorithm algo = Algorithm::HeatBath;
    int batches = 32;
    bool start_open = false;
    // Called as (sweep, observable index, value) for every recorded sample.
    std::function<void(std::uint64_t, int, double)> dump;
};

// Automatic burn-in: 20 integrated autocorrelation times of a crossing monitor, at least 1000.
std::int64_t automatic_burn_in(ChainState& state, Algorithm algo);

// Fills x[0..k-1] with k observables of one configuration; lets them share work such as
// cluster labels.
using VectorObservable = std::function<void(const EdgeConfig&, std::vector<double>&)>;

struct BatchRun {
    std::vector<BatchMeans> series;
    std::int64_t burn_in = 0;
};

// Raw batch means of k observables along one chain.
BatchRun run_batches(const VectorObservable& f, int k, const ModelParams& params, DomainPtr d,
                     const BoundaryCondition& bc, const RunOptions& options);

std::vector<Estimate> estimate_vector(const VectorObservable& f, int k, const ModelParams& params, DomainPtr d,
                                      const BoundaryCondition& bc, const RunOptions& options);

std::vector<Estimate> estimate_many(const std::vector<Observable>& observables, const ModelParams& params,
                                    DomainPtr d, const BoundaryCondition& bc, const RunOptions& options);

Estimate estimate(const Event& event, const ModelParams& params, DomainPtr d, const BoundaryCondition& bc,
                  std::int64_t budget, std::int64_t burn_in, std::uint64_t seed,
                  Algorithm algo = Algorithm::HeatBath);

struct PairedEstimates {
    std::vector<Estimate> high;
    std::vector<Estimate> low;
    // Batch means of the per-sample difference high - low.
    std::vector<Estimate> difference;
};

// Two chains driven by the same uniforms (common random numbers).
PairedEstimates estimate_paired(const std::vector<Observable>& observables, const ModelParams& params, DomainPtr d,
                                const BoundaryCondition& bc_high, const BoundaryCondition& bc_low,
                                const RunOptions& options);

PairedEstimates estimate_paired_vector(const VectorObservable& f, int k, const ModelParams& params, DomainPtr d,
                                       const BoundaryCondition& bc_high, const BoundaryCondition& bc_low,
                                       const RunOptions& options);

}  // namespace rcm::sampler
