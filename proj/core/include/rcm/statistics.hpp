#pragma once

#include <cstdint>
#include <vector>

#include "rcm/model.hpp"

namespace rcm {

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
    ModelParams params;
    int n_batches = 0;
    std::int64_t burn_in = 0;
};

// Fixed-size batch means over a stream of known length.
class BatchMeans {
public:
    BatchMeans(std::int64_t n_samples, int n_batches);
    void add(double x);
    bool full() const { return batch_ == n_batches_; }
    double mean() const;
    double std_error() const;
    int n_batches() const { return n_batches_; }
    std::int64_t used_samples() const { return batch_size_ * n_batches_; }
    const std::vector<double>& batch_means() const { return means_; }

private:
    std::int64_t batch_size_;
    int n_batches_;
    int batch_ = 0;
    std::int64_t filled_ = 0;
    double acc_ = 0.0;
    std::vector<double> means_;
};

// Mean and standard error of independent batch means.
void summarize(const std::vector<double>& batch_means, double& mean, double& std_error);

// Integrated autocorrelation time with Sokal's self-consistent window (c = 6).
double integrated_autocorrelation_time(const std::vector<double>& series);

// Pool several estimates of the same quantity; order-independent (sorted by seed).
Estimate merge_estimates(std::vector<Estimate> parts);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

// Pearson test of observed counts against expected probabilities; cells with expected count
// below min_expected are pooled into one cell.
ChiSquareResult chi_square_test(const std::vector<std::int64_t>& counts, const std::vector<double>& probabilities,
                                double min_expected = 5.0);

}  // namespace rcm
