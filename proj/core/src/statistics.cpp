#include "rcm/statistics.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rcm {

BatchMeans::BatchMeans(std::int64_t n_samples, int n_batches) : n_batches_(n_batches) {
    if (n_batches < 2) throw std::invalid_argument("need at least two batches");
    batch_size_ = n_samples / n_batches;
    if (batch_size_ < 1) throw std::invalid_argument("too few samples for the requested number of batches");
    means_.reserve(n_batches);
}

void BatchMeans::add(double x) {
    if (full()) return;
    acc_ += x;
    if (++filled_ == batch_size_) {
        means_.push_back(acc_ / static_cast<double>(batch_size_));
        acc_ = 0.0;
        filled_ = 0;
        ++batch_;
    }
}

double BatchMeans::mean() const {
    double m, s;
    summarize(means_, m, s);
    return m;
}

double BatchMeans::std_error() const {
    double m, s;
    summarize(means_, m, s);
    return s;
}

void summarize(const std::vector<double>& batch_means, double& mean, double& std_error) {
    const std::size_t b = batch_means.size();
    if (b == 0) {
        mean = std_error = 0.0;
        return;
    }
    mean = std::accumulate(batch_means.begin(), batch_means.end(), 0.0) / static_cast<double>(b);
    if (b < 2) {
        std_error = 0.0;
        return;
    }
    double ss = 0.0;
    for (double x : batch_means) ss += (x - mean) * (x - mean);
    std_error = std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
}

double integrated_autocorrelation_time(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 4) return 0.5;
    double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    double c0 = 0.0;
    for (double x : series) c0 += (x - mean) * (x - mean);
    c0 /= static_cast<double>(n);
    if (c0 <= 0.0) return 0.5;
    double tau = 0.5;
    for (std::size_t t = 1; t < n / 2; ++t) {
        double ct = 0.0;
        for (std::size_t i = 0; i + t < n; ++i) ct += (series[i] - mean) * (series[i + t] - mean);
        ct /= static_cast<double>(n);
        tau += ct / c0;
        if (static_cast<double>(t) >= 6.0 * tau) break;
    }
    return std::max(tau, 0.5);
}

Estimate merge_estimates(std::vector<Estimate> parts) {
    if (parts.empty()) throw std::invalid_argument("nothing to merge");
    std::sort(parts.begin(), parts.end(), [](const Estimate& a, const Estimate& b) { return a.seed < b.seed; });
    Estimate out = parts.front();
    std::int64_t total = 0;
    for (const auto& e : parts) total += e.n_samples;
    double mean = 0.0, var = 0.0;
    int batches = 0;
    for (const auto& e : parts) {
        double w = static_cast<double>(e.n_samples) / static_cast<double>(total);
        mean += w * e.mean;
        var += w * w * e.std_error * e.std_error;
        batches += e.n_batches;
    }
    out.mean = mean;
    out.std_error = std::sqrt(var);
    out.n_samples = total;
    out.n_batches = batches;
    return out;
}

ChiSquareResult chi_square_test(const std::vector<std::int64_t>& counts, const std::vector<double>& probabilities,
                                double min_expected) {
    if (counts.size() != probabilities.size()) throw std::invalid_argument("chi-square: size mismatch");
    std::int64_t n = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    if (n <= 0) throw std::invalid_argument("chi-square: no observations");
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (probabilities[i] <= 0.0 && counts[i] > 0) return {INFINITY, 0, 0.0};
    // Pool the smallest cells until the pooled cell reaches min_expected.
    std::vector<std::size_t> order(counts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return probabilities[a] < probabilities[b] || (probabilities[a] == probabilities[b] && a < b);
    });
    double stat = 0.0;
    int cells = 0;
    double pooled_expected = 0.0;
    std::int64_t pooled_count = 0;
    std::size_t i = 0;
    for (; i < order.size() && pooled_expected < min_expected; ++i) {
        pooled_expected += probabilities[order[i]] * static_cast<double>(n);
        pooled_count += counts[order[i]];
    }
    if (pooled_expected > 0.0) {
        double d = static_cast<double>(pooled_count) - pooled_expected;
        stat += d * d / pooled_expected;
        ++cells;
    }
    for (; i < order.size(); ++i) {
        double expected = probabilities[order[i]] * static_cast<double>(n);
        double d = static_cast<double>(counts[order[i]]) - expected;
        stat += d * d / expected;
        ++cells;
    }
    ChiSquareResult r;
    r.statistic = stat;
    r.dof = cells - 1;
    if (r.dof < 1) {
        r.p_value = 1.0;
        return r;
    }
    boost::math::chi_squared dist(r.dof);
    r.p_value = boost::math::cdf(boost::math::complement(dist, stat));
    return r;
}

}  // namespace rcm
