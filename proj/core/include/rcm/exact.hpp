#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rcm/events.hpp"
#include "rcm/lattice.hpp"
#include "rcm/model.hpp"

namespace rcm::exact {

struct EnumerationOptions {
    // Maximal number of enumerated edges, ghost edges included.
    int cap = 24;
};

class CapExceeded : public std::length_error {
public:
    using std::length_error::length_error;
};

// Full table of configuration probabilities. Configuration masks carry primal edges in
// bits 0..|E|-1 and, when h > 0, the ghost edge of vertex v in bit |E|+v.
class ExactMeasure {
public:
    ExactMeasure(DomainPtr d, BoundaryCondition bc, ModelParams params, EnumerationOptions opt = {});

    const Domain& domain() const { return *domain_; }
    const DomainPtr& domain_ptr() const { return domain_; }
    const BoundaryCondition& bc() const { return bc_; }
    const ModelParams& params() const { return params_; }
    bool has_ghost() const { return ghost_; }
    int num_bits() const { return bits_; }
    std::uint64_t num_configs() const { return std::uint64_t{1} << bits_; }

    double log_partition_function() const { return log_z_; }
    double partition_function() const;
    const std::vector<double>& probabilities() const { return prob_; }
    double probability_of(std::uint64_t mask) const { return prob_[mask]; }

    EdgeConfig config_of(std::uint64_t mask) const;
    std::uint64_t mask_of(const EdgeConfig& cfg) const;

    double probability(const Event& event) const;
    double expectation(const Observable& f) const;
    double covariance(const Event& a, const Event& b) const;
    std::vector<double> edge_marginals() const;
    // Distribution of the primal edges alone (ghost edges summed out).
    std::vector<double> primal_distribution() const;

private:
    DomainPtr domain_;
    BoundaryCondition bc_;
    ModelParams params_;
    bool ghost_ = false;
    int bits_ = 0;
    double log_z_ = 0.0;
    std::vector<double> prob_;
};

double partition_function(const ModelParams& params, DomainPtr d, const BoundaryCondition& bc,
                          EnumerationOptions opt = {});
double event_probability(const ModelParams& params, DomainPtr d, const BoundaryCondition& bc, const Event& event,
                         EnumerationOptions opt = {});
double covariance(const ModelParams& params, DomainPtr d, const BoundaryCondition& bc, const Event& a,
                  const Event& b, EnumerationOptions opt = {});

// Heat-bath probability that an edge is open given whether its endpoints are already connected.
double conditional_edge_probability(const ModelParams& params, bool connected_off_e);

// lhs: crossing probability with (ab) and (cd) wired together; rhs: the formula in terms of the
// probability with (ab) and (cd) wired separately.
std::pair<double, double> boost_formula_check(const ModelParams& params, const Quad& quad,
                                              EnumerationOptions opt = {});

// phi^0_{D,p}[C(D)] and 1 - phi^1_{D*,p*}[C(D*)]; equal by duality.
std::pair<double, double> crossing_duality_check(const ModelParams& params, const Quad& quad,
                                                 EnumerationOptions opt = {});

// Largest deviation between conditional laws on F given the outside, and the measure on the
// subgraph spanned by F with the induced boundary condition. F must span a connected subgraph.
// With h > 0 the ghost edges of the spanned vertices belong to F.
double spatial_markov_deviation(const ExactMeasure& measure, const std::vector<int>& inner_edges);

}  // namespace rcm::exact
