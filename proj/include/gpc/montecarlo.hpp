#pragma once

#include "gpc/linalg.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string_view>
#include <vector>

namespace gpc {

struct MCConfig {
    std::uint64_t seed = 20240607;
    std::int64_t n_samples = 200000;
    std::int64_t batch_size = 16384;
    bool antithetic = true;

    /// Throws InvalidInput unless n_samples >= 1000 and batch_size >= 1.
    void validate() const;
    MCConfig with_samples(std::int64_t n) const;
    MCConfig with_seed(std::uint64_t s) const;
};

struct MCEstimate {
    double value = 0.0;
    double std_err = 0.0;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
};

/// Sample means of a vector-valued integrand together with the covariance
/// matrix of those means.
struct Moments {
    Vec mean;
    Eigen::MatrixXd cov;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;

    MCEstimate component(int k) const;
};

constexpr std::uint64_t stream_id(std::string_view name, std::uint64_t salt = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h ^ (salt * 0x9e3779b97f4a7c15ULL);
}

std::uint64_t splitmix64(std::uint64_t x);

/// Integrand evaluated at one standard Gaussian point y (length dim); writes
/// k outputs.
using Kernel = std::function<void(const double* y, double* out)>;

/// Batched Monte Carlo over standard dim-dimensional Gaussian points.
///
/// With antithetic pairing each unit is the pair (y, -y) and its value is
/// the pair average; n_samples counts integrand evaluations. Every batch has
/// its own generator seeded from (seed, stream, batch index) and batches are
/// merged in index order, so results do not depend on the number of worker
/// threads (env GPC_THREADS, default 1).
Moments integrate(const MCConfig& cfg, std::uint64_t stream, int dim, int k, const Kernel& f);

/// Visits, in order, the standard Gaussian points that integrate would use
/// for the same (cfg, stream); antithetic partners are adjacent.
void visit_gaussian_points(const MCConfig& cfg, std::uint64_t stream, int dim,
                           const std::function<void(const double*)>& fn);

}  // namespace gpc
