#include "mptcs/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mptcs/rng.hpp"

namespace mptcs {

namespace {
constexpr double kLogTwoPi = 1.8378770664093453;

double component_log_density(std::span<const double> x, const double* mean, const double* var,
                             int dim) {
    double acc = 0.0;
    for (int d = 0; d < dim; ++d) {
        double diff = x[static_cast<size_t>(d)] - mean[d];
        acc += diff * diff / var[d] + std::log(var[d]);
    }
    return -0.5 * (acc + dim * kLogTwoPi);
}
}  // namespace

DiagonalGmm::DiagonalGmm(std::vector<double> weights, std::vector<double> means,
                         std::vector<double> vars, int dim)
    : weights_(std::move(weights)), means_(std::move(means)), vars_(std::move(vars)), dim_(dim) {
    if (means_.size() != weights_.size() * static_cast<size_t>(dim_) ||
        vars_.size() != means_.size())
        throw std::invalid_argument("gmm parameter shapes inconsistent");
    for (double v : vars_)
        if (!(v > 0.0)) throw std::invalid_argument("gmm variances must be positive");
}

double DiagonalGmm::log_likelihood(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("gmm dim mismatch");
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> logs(weights_.size());
    for (size_t k = 0; k < weights_.size(); ++k) {
        logs[k] = std::log(std::max(weights_[k], 1e-300)) +
                  component_log_density(x, means_.data() + k * dim_, vars_.data() + k * dim_, dim_);
        best = std::max(best, logs[k]);
    }
    double sum = 0.0;
    for (double l : logs) sum += std::exp(l - best);
    return best + std::log(sum);
}

DiagonalGmm DiagonalGmm::fit(std::span<const double> data, int count, int dim, int k, int em_iters,
                             double var_floor, uint64_t seed) {
    if (count < 1 || dim < 1) throw std::invalid_argument("gmm fit needs data");
    k = std::min(k, count);
    KeyedRng rng(seed, streams::kFuzzer);

    auto row = [&](int i) { return data.subspan(static_cast<size_t>(i) * dim, static_cast<size_t>(dim)); };

    // k-means++ style seeding: spread initial means over the data.
    std::vector<double> means(static_cast<size_t>(k) * dim);
    std::vector<int> chosen;
    chosen.push_back(rng.next_int(0, count - 1));
    std::vector<double> d2(static_cast<size_t>(count), 0.0);
    while (static_cast<int>(chosen.size()) < k) {
        double total = 0.0;
        for (int i = 0; i < count; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int c : chosen) {
                double acc = 0.0;
                auto a = row(i);
                auto b = row(c);
                for (int d = 0; d < dim; ++d) {
                    double diff = a[static_cast<size_t>(d)] - b[static_cast<size_t>(d)];
                    acc += diff * diff;
                }
                best = std::min(best, acc);
            }
            d2[static_cast<size_t>(i)] = best;
            total += best;
        }
        if (total <= 0.0) {
            chosen.push_back(rng.next_int(0, count - 1));
            continue;
        }
        double u = rng.next_unit() * total;
        int pick = count - 1;
        double acc = 0.0;
        for (int i = 0; i < count; ++i) {
            acc += d2[static_cast<size_t>(i)];
            if (u <= acc) {
                pick = i;
                break;
            }
        }
        chosen.push_back(pick);
    }
    for (int c = 0; c < k; ++c) {
        auto r = row(chosen[static_cast<size_t>(c)]);
        std::copy(r.begin(), r.end(), means.begin() + static_cast<size_t>(c) * dim);
    }

    // Global variance as the starting spread.
    std::vector<double> global_mean(static_cast<size_t>(dim), 0.0);
    for (int i = 0; i < count; ++i) {
        auto r = row(i);
        for (int d = 0; d < dim; ++d) global_mean[static_cast<size_t>(d)] += r[static_cast<size_t>(d)];
    }
    for (auto& v : global_mean) v /= count;
    std::vector<double> vars(static_cast<size_t>(k) * dim);
    for (int d = 0; d < dim; ++d) {
        double acc = 0.0;
        for (int i = 0; i < count; ++i) {
            double diff = row(i)[static_cast<size_t>(d)] - global_mean[static_cast<size_t>(d)];
            acc += diff * diff;
        }
        double v = std::max(acc / count, var_floor);
        for (int c = 0; c < k; ++c) vars[static_cast<size_t>(c) * dim + d] = v;
    }
    std::vector<double> weights(static_cast<size_t>(k), 1.0 / k);

    std::vector<double> resp(static_cast<size_t>(count) * k);
    std::vector<double> logs(static_cast<size_t>(k));
    for (int iter = 0; iter < em_iters; ++iter) {
        // E step
        for (int i = 0; i < count; ++i) {
            double best = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                logs[static_cast<size_t>(c)] =
                    std::log(std::max(weights[static_cast<size_t>(c)], 1e-300)) +
                    component_log_density(row(i), means.data() + static_cast<size_t>(c) * dim,
                                          vars.data() + static_cast<size_t>(c) * dim, dim);
                best = std::max(best, logs[static_cast<size_t>(c)]);
            }
            double sum = 0.0;
            for (int c = 0; c < k; ++c) {
                double e = std::exp(logs[static_cast<size_t>(c)] - best);
                resp[static_cast<size_t>(i) * k + c] = e;
                sum += e;
            }
            for (int c = 0; c < k; ++c) resp[static_cast<size_t>(i) * k + c] /= sum;
        }
        // M step
        for (int c = 0; c < k; ++c) {
            double nk = 0.0;
            for (int i = 0; i < count; ++i) nk += resp[static_cast<size_t>(i) * k + c];
            nk = std::max(nk, 1e-9);
            weights[static_cast<size_t>(c)] = nk / count;
            for (int d = 0; d < dim; ++d) {
                double mean_acc = 0.0;
                for (int i = 0; i < count; ++i)
                    mean_acc += resp[static_cast<size_t>(i) * k + c] * row(i)[static_cast<size_t>(d)];
                double mu = mean_acc / nk;
                means[static_cast<size_t>(c) * dim + d] = mu;
                double var_acc = 0.0;
                for (int i = 0; i < count; ++i) {
                    double diff = row(i)[static_cast<size_t>(d)] - mu;
                    var_acc += resp[static_cast<size_t>(i) * k + c] * diff * diff;
                }
                vars[static_cast<size_t>(c) * dim + d] = std::max(var_acc / nk, var_floor);
            }
        }
    }
    return DiagonalGmm(std::move(weights), std::move(means), std::move(vars), dim);
}

DensityModel::DensityModel(int dim, int k, int refit_interval, int em_iters, double var_floor,
                           uint64_t seed)
    : dim_(dim), k_(k), refit_interval_(refit_interval), em_iters_(em_iters),
      var_floor_(var_floor), seed_(seed) {
    if (dim_ < 1) throw std::invalid_argument("density model dim must be positive");
    // Broad prior component until real data arrives.
    gmm_ = DiagonalGmm({1.0}, std::vector<double>(static_cast<size_t>(dim_), 0.0),
                       std::vector<double>(static_cast<size_t>(dim_), 100.0), dim_);
}

void DensityModel::add(std::span<const double> features) {
    if (static_cast<int>(features.size()) != dim_)
        throw std::invalid_argument("density model feature dim mismatch");
    buffer_.insert(buffer_.end(), features.begin(), features.end());
    ++since_refit_;
    if (since_refit_ >= refit_interval_) refit();
}

void DensityModel::refit() {
    int count = static_cast<int>(buffer_.size()) / dim_;
    gmm_ = DiagonalGmm::fit(buffer_, count, dim_, k_, em_iters_, var_floor_,
                            derive_key(seed_, static_cast<uint64_t>(refit_count_)));
    fitted_count_ = count;
    ++refit_count_;
    since_refit_ = 0;
}

double DensityModel::negative_log_likelihood(std::span<const double> x) const {
    return -gmm_.log_likelihood(x);
}

}  // namespace mptcs
