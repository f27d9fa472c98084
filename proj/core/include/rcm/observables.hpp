#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcm/events.hpp"
#include "rcm/sampler.hpp"
#include "rcm/statistics.hpp"

namespace rcm::observables {

// Open circuit in Ann(n, 2n) separating the origin from infinity. Edges missing from the
// configuration's domain count as closed.
bool circuit_occurs(const EdgeConfig& cfg, int n);

// Arm types in counterclockwise order (1 = primal open, 0 = dual open) from the ring at
// distance r to the ring at distance R. The half-plane variant restricts to y >= 0 and
// indexes arms from the right-most one.
struct ArmSpec {
    std::vector<int> sigma;
    int r = 0;
    int R = 1;
    bool half_plane = false;

    // Throws std::invalid_argument for an empty or non-binary sigma, or unless 0 <= r < R.
    void validate() const;
};

// Arms are vertex-disjoint open paths or face-disjoint dual-open paths. Every arm lies in a
// single crossing cluster; crossing clusters are ordered along the outer ring and arms are
// matched to them greedily, with max-flow capacities computed only when a cluster must host
// several arms. The configuration's domain must contain the annulus.
bool arm_occurs(const EdgeConfig& cfg, const ArmSpec& spec);

// Left-right open crossing of Lambda_r inside Lambda_r.
bool box_crossing_occurs(const EdgeConfig& cfg, int r);

// Delta_p(R) (edge at the origin) and Delta_p(r, R) (crossing of Lambda_r), wired minus free on
// Lambda_R with common random numbers, plus the difference Delta_p(R) - Delta_p(r, R).
struct DeltaEstimates {
    Estimate delta_R;
    Estimate delta_rR;
    Estimate difference;
    Estimate wired_edge, free_edge, wired_crossing, free_crossing;
};

// Delta_p(R) alone; also defined for R = 1.
Estimate delta_edge(const ModelParams& params, int R, const sampler::RunOptions& options);

DeltaEstimates delta_hat(const ModelParams& params, int r, int R, const sampler::RunOptions& options);

// Algorithm used by the estimators: Chayes-Machta at h = 0, heat bath otherwise.
sampler::Algorithm default_algorithm(const ModelParams& params);

// Side of the free box standing in for infinite volume around an observable at scale R.
int proxy_box_radius(double q, int R);

// phi_p[C(Lambda_R)], sampled on the proxy box.
Estimate box_crossing(const ModelParams& params, int R, const sampler::RunOptions& options);

// phi_p[A_sigma(r, R)], sampled on the free proxy box of scale R.
Estimate arm_probability(const ModelParams& params, const ArmSpec& spec, const sampler::RunOptions& options);

struct LengthScanResult {
    double q = 1.0;
    double p = 0.5;
    double delta = 0.05;
    int R_cap = 0;
    std::optional<int> L_hat;  // empty: exceeds the cap
    std::vector<std::pair<int, Estimate>> curve;
    bool proxy = false;  // crossing probabilities taken on a finite box larger than Lambda_R

    std::string L_string() const;
};

// Smallest R whose crossing estimate leaves [delta, 1 - delta] by more than two standard errors:
// powers of two up to R_cap, then bisection.
LengthScanResult characteristic_length(double q, double p, double delta, int R_cap, const sampler::RunOptions& options);

struct ClusterStats {
    Estimate theta_proxy;     // cluster of the origin touches the domain boundary
    Estimate mean_size;       // E|C|
    Estimate second_moment;   // E|C|^2
    Estimate chi_proxy;       // E[|C| 1(C misses the boundary)]
    std::vector<Estimate> pi1;               // pi1[k] = phi[0 <-> ring k + 1], up to the largest ring
    std::vector<double> radius_distribution; // radius_distribution[k] = P[rad(C) = k]
    bool proxy = true;

    // min{r : r^2 pi_1(r) >= n} from the measured curve; nullopt beyond the largest ring.
    std::optional<int> phi(double n) const;
};

// The origin must be a vertex of d.
ClusterStats cluster_stats(const ModelParams& params, DomainPtr d, const BoundaryCondition& bc,
                           const sampler::RunOptions& options);

// phi_{p,h}[0 <-> ghost]; exactly 0 at h = 0.
Estimate ghost_magnetization(const ModelParams& params, DomainPtr d, const BoundaryCondition& bc,
                             const sampler::RunOptions& options);

struct CovarianceSum {
    Estimate total;               // sum_f Cov(w_e, w_f)
    std::vector<Estimate> shells; // shells[k]: edges f at sup-distance k from e (midpoints)
    std::string note;
};

// Sum of Cov(w_e, w_f) over edges f within sup-distance R_cap of e, from batch covariances.
CovarianceSum covariance_sum(const ModelParams& params, DomainPtr d, const BoundaryCondition& bc, int e, int R_cap,
                             const sampler::RunOptions& options);

// The same sum for the edge at the origin of a free box of side 4 R_cap.
CovarianceSum covariance_sum_f2(const ModelParams& params, int R_cap, const sampler::RunOptions& options);

}  // namespace rcm::observables
