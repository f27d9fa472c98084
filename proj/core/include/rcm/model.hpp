#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcm/lattice.hpp"

namespace rcm {

struct ModelParams {
    double p = 0.5;
    double q = 1.0;
    double h = 0.0;

    static double critical_p(double q);
    double critical() const { return critical_p(q); }
    // Throws std::invalid_argument unless p in (0,1), q >= 1, h >= 0.
    void validate() const;
    // q in [1,4], the range the exponent table and the identities are stated for.
    bool in_reference_range() const { return q >= 1.0 && q <= 4.0; }
    // Weight 1 - e^{-h} of a ghost edge in the Bernoulli parametrisation.
    double ghost_p() const;
};

// Open/closed state of every edge of a domain, plus optional ghost edges (one per vertex).
class EdgeConfig {
public:
    EdgeConfig() = default;
    explicit EdgeConfig(DomainPtr d, bool with_ghost = false);

    static EdgeConfig all_open(DomainPtr d, bool with_ghost = false);
    static EdgeConfig all_closed(DomainPtr d, bool with_ghost = false) { return EdgeConfig(std::move(d), with_ghost); }

    const Domain& domain() const { return *domain_; }
    const DomainPtr& domain_ptr() const { return domain_; }
    int num_edges() const { return static_cast<int>(bits_.size()); }
    bool has_ghost() const { return !ghost_.empty(); }

    bool open(int e) const { return bits_[e] != 0; }
    void set(int e, bool value) { bits_[e] = value ? 1 : 0; }
    bool ghost_open(int v) const { return ghost_[v] != 0; }
    void set_ghost(int v, bool value) { ghost_[v] = value ? 1 : 0; }

    int num_open() const;
    int num_ghost_open() const;

    const std::vector<std::uint8_t>& bits() const { return bits_; }
    std::vector<std::uint8_t>& bits() { return bits_; }
    const std::vector<std::uint8_t>& ghost_bits() const { return ghost_; }
    std::vector<std::uint8_t>& ghost_bits() { return ghost_; }

    // "0101..." over edge indices, then "|" and ghost bits when present.
    std::string to_string() const;

    // Bitwise partial order on primal and ghost edges.
    friend bool leq(const EdgeConfig& a, const EdgeConfig& b);
    friend bool operator==(const EdgeConfig& a, const EdgeConfig& b) {
        return a.bits_ == b.bits_ && a.ghost_ == b.ghost_;
    }

private:
    DomainPtr domain_;
    std::vector<std::uint8_t> bits_;
    std::vector<std::uint8_t> ghost_;
};

// k(omega^xi): clusters after identifying wired classes. The ghost counts as a vertex
// exactly when the configuration carries ghost edges.
int cluster_count(const EdgeConfig& cfg, const BoundaryCondition& bc);

// Smallest vertex index of each vertex's cluster; index num_vertices stands for the ghost
// and is appended when cfg carries ghost edges.
std::vector<int> cluster_labels(const EdgeConfig& cfg, const BoundaryCondition& bc);

// Connection in cfg alone (no wirings, no ghost).
bool connected(const EdgeConfig& cfg, int a, int b);

}  // namespace rcm
