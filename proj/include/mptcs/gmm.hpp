#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mptcs {

// Diagonal-covariance Gaussian mixture fit by expectation-maximization.
// Everything is seeded and iteration-capped, so fits replay exactly.
class DiagonalGmm {
public:
    DiagonalGmm() = default;
    DiagonalGmm(std::vector<double> weights, std::vector<double> means, std::vector<double> vars,
                int dim);

    static DiagonalGmm fit(std::span<const double> data, int count, int dim, int k, int em_iters,
                           double var_floor, uint64_t seed);

    int components() const { return static_cast<int>(weights_.size()); }
    int dim() const { return dim_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& means() const { return means_; }
    const std::vector<double>& variances() const { return vars_; }

    double log_likelihood(std::span<const double> x) const;

private:
    std::vector<double> weights_;  // k
    std::vector<double> means_;    // k * dim
    std::vector<double> vars_;     // k * dim
    int dim_ = 0;
};

// Running density model over trajectory feature vectors. Samples accumulate
// in a buffer; the mixture refits every `refit_interval` additions. Before
// the first refit a single broad component keeps likelihoods finite.
class DensityModel {
public:
    DensityModel(int dim, int k = 5, int refit_interval = 500, int em_iters = 50,
                 double var_floor = 1e-4, uint64_t seed = 0);

    int dim() const { return dim_; }
    int fitted_sample_count() const { return fitted_count_; }
    const DiagonalGmm& mixture() const { return gmm_; }

    void add(std::span<const double> features);

    // Freshness signal: higher for feature vectors the model has not seen.
    double negative_log_likelihood(std::span<const double> x) const;

private:
    void refit();

    int dim_;
    int k_;
    int refit_interval_;
    int em_iters_;
    double var_floor_;
    uint64_t seed_;
    int since_refit_ = 0;
    int fitted_count_ = 0;
    int refit_count_ = 0;
    std::vector<double> buffer_;  // row-major samples
    DiagonalGmm gmm_;
};

}  // namespace mptcs
