#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rcm/exact.hpp"
#include "rcm/lattice.hpp"
#include "rcm/model.hpp"

namespace rcm::coupling {

// Law of one edge given the states of a revealed subset, with the other edges integrated out.
// Up to 14 edges the answer comes from a table of sums over all partial assignments (3^n
// entries, digit 0 closed, 1 open, 2 free); larger domains fall back to memoised scans.
class ConditionalTable {
public:
    explicit ConditionalTable(const exact::ExactMeasure& measure, int table_limit = 14);

    int num_edges() const { return n_; }
    bool tabulated() const { return !sums_.empty(); }
    // Index of the empty partial assignment.
    std::uint64_t root() const { return root_; }
    static std::uint64_t reveal(std::uint64_t index, int e, bool open, const std::vector<std::uint64_t>& pow3);
    const std::vector<std::uint64_t>& powers() const { return pow3_; }

    // P[e closed | partial assignment]. `index` encodes the assignment in base 3.
    double closed_probability(std::uint64_t index, int e) const;

private:
    double scan(std::uint64_t index, int e) const;

    int n_ = 0;
    std::uint64_t root_ = 0;
    std::vector<std::uint64_t> pow3_;
    std::vector<double> sums_;
    std::vector<double> probs_;
    mutable std::unordered_map<std::uint64_t, double> memo_;
};

struct RevealedStep {
    int edge = -1;
    bool low = false;
    bool high = false;
    double uniform = 0.0;
};

// Revealed history of a coupled construction: the ordered pair of partial configurations,
// the revealed edges and the uniforms consumed so far.
class CouplingState {
public:
    CouplingState(DomainPtr d, BoundaryCondition bc_low, BoundaryCondition bc_high);

    const Domain& domain() const { return *domain_; }
    const DomainPtr& domain_ptr() const { return domain_; }
    int time() const { return static_cast<int>(history_.size()); }
    const std::vector<RevealedStep>& history() const { return history_; }
    bool revealed(int e) const { return revealed_[e] != 0; }
    const std::vector<char>& revealed_mask() const { return revealed_; }
    // Values on revealed edges; unrevealed edges read as closed.
    const EdgeConfig& omega() const { return low_; }
    const EdgeConfig& omega_prime() const { return high_; }
    const BoundaryCondition& bc_low() const { return bc_low_; }
    const BoundaryCondition& bc_high() const { return bc_high_; }

    // Boundary conditions induced on the unexplored graph by the revealed open edges plus the
    // initial wirings; vertices without unrevealed incident edges are left unlabelled.
    BoundaryCondition xi() const { return induced(low_, bc_low_); }
    BoundaryCondition xi_prime() const { return induced(high_, bc_high_); }

    void record(const RevealedStep& s);
    // omega <= omega_prime on revealed edges.
    bool ordered() const;

private:
    BoundaryCondition induced(const EdgeConfig& cfg, const BoundaryCondition& bc) const;

    DomainPtr domain_;
    BoundaryCondition bc_low_, bc_high_;
    EdgeConfig low_, high_;
    std::vector<char> revealed_;
    std::vector<RevealedStep> history_;
};

// Adaptive order of revelation. next_edge sees only the revealed history and must return an
// unrevealed edge.
class DecisionTree {
public:
    virtual ~DecisionTree() = default;
    virtual std::string name() const = 0;
    virtual void reset() = 0;
    virtual int next_edge(const CouplingState& state) = 0;
};

using TreePtr = std::unique_ptr<DecisionTree>;

// Fixed order; throws unless `order` is a permutation of the edge indices.
TreePtr deterministic_tree(const Domain& d, std::vector<int> order);
TreePtr deterministic_tree(const Domain& d);
// Grows the set of vertices joined to the boundary in omega' and reveals every unrevealed edge
// touching it, lowest index first; once no such edge is left, the lowest unrevealed edge.
TreePtr boundary_cluster_tree(const Domain& d);
// Same on the dual: grows the set of faces joined to the outer faces through edges closed in
// omega.
TreePtr dual_cluster_tree(const Domain& d);

using StopRule = std::function<bool(const CouplingState&)>;

// The induced boundary conditions agree on the unexplored graph.
StopRule stop_when_coincide();
// No unrevealed edge touches a vertex joined to the boundary by revealed edges open in omega'.
StopRule stop_when_boundary_cluster_explored();
// Dual mirror, judged on omega.
StopRule stop_when_dual_cluster_explored();

struct CouplingResult {
    EdgeConfig omega;
    EdgeConfig omega_prime;
    // History at the stopping time (the full history when the rule never fires).
    std::optional<CouplingState> at_stop;
    int stop_time = -1;
    std::vector<int> order;
    // Number of steps after which omega <= omega' failed (0 in a correct run).
    int monotonicity_violations = 0;
};

// Pair of measures phi^{bc_low}_{p_low} <= phi^{bc_high}_{p_high} driven by one uniform per edge.
class ExactCoupler {
public:
    ExactCoupler(DomainPtr d, BoundaryCondition bc_low, BoundaryCondition bc_high, double p_low, double p_high,
                 double q, exact::EnumerationOptions opt = {});

    const Domain& domain() const { return *domain_; }
    const exact::ExactMeasure& low_measure() const { return low_measure_; }
    const exact::ExactMeasure& high_measure() const { return high_measure_; }

    CouplingResult run(DecisionTree& tree, std::uint64_t seed, const StopRule& stop = nullptr) const;

private:
    DomainPtr domain_;
    BoundaryCondition bc_low_, bc_high_;
    exact::ExactMeasure low_measure_, high_measure_;
    ConditionalTable low_, high_;
};

CouplingResult run_coupling(DecisionTree& tree, DomainPtr d, const BoundaryCondition& bc_low,
                            const BoundaryCondition& bc_high, double p_low, double p_high, double q,
                            std::uint64_t seed, const StopRule& stop = nullptr);

// Grand coupling of two heat-bath chains sharing their uniforms, for domains beyond
// enumeration. Low starts all closed, high all open; order is preserved at every update.
struct DynamicsResult {
    EdgeConfig omega;
    EdgeConfig omega_prime;
    // First sweep after which the two chains agree; -1 if they never did.
    std::int64_t coalescence = -1;
    std::int64_t differing_edges = 0;
    int monotonicity_violations = 0;
};

DynamicsResult dynamics_coupling(DomainPtr d, const BoundaryCondition& bc_low, const BoundaryCondition& bc_high,
                                 double p_low, double p_high, double q, std::uint64_t seed, std::int64_t sweeps);

}  // namespace rcm::coupling
