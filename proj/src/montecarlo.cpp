#include "gpc/montecarlo.hpp"

#include "gpc/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace gpc {
namespace {

struct BatchStats {
    std::int64_t units = 0;
    Vec mean;
    Eigen::MatrixXd comoment;  // Σ (x - mean)(x - mean)^T
};

std::int64_t unit_count(const MCConfig& cfg) {
    return cfg.antithetic ? cfg.n_samples / 2 : cfg.n_samples;
}

int worker_count() {
    if (const char* env = std::getenv("GPC_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return std::min(n, 256);
    }
    return 1;
}

std::uint64_t batch_seed(const MCConfig& cfg, std::uint64_t stream, std::int64_t batch) {
    return splitmix64(splitmix64(cfg.seed ^ stream) + static_cast<std::uint64_t>(batch));
}

// Fills one batch worth of Gaussian units. Antithetic units use a single draw.
template <class Fn>
void for_each_unit(const MCConfig& cfg, std::uint64_t stream, int dim, std::int64_t batch,
                   std::int64_t count, Fn&& fn) {
    std::mt19937_64 rng(batch_seed(cfg, stream, batch));
    std::normal_distribution<double> normal;
    std::vector<double> y(static_cast<size_t>(dim));
    for (std::int64_t u = 0; u < count; ++u) {
        for (double& v : y) v = normal(rng);
        fn(y.data());
    }
}

void merge(BatchStats& into, const BatchStats& from) {
    if (from.units == 0) return;
    if (into.units == 0) {
        into = from;
        return;
    }
    const double na = static_cast<double>(into.units);
    const double nb = static_cast<double>(from.units);
    const double n = na + nb;
    const Vec delta = from.mean - into.mean;
    into.mean += delta * (nb / n);
    into.comoment += from.comoment + delta * delta.transpose() * (na * nb / n);
    into.units += from.units;
}

}  // namespace

void MCConfig::validate() const {
    if (n_samples < 1000) fail(ErrorCode::InvalidInput, "mc.n_samples must be at least 1000");
    if (batch_size < 1) fail(ErrorCode::InvalidInput, "mc.batch_size must be positive");
}

MCConfig MCConfig::with_samples(std::int64_t n) const {
    MCConfig c = *this;
    c.n_samples = n;
    return c;
}

MCConfig MCConfig::with_seed(std::uint64_t s) const {
    MCConfig c = *this;
    c.seed = s;
    return c;
}

MCEstimate Moments::component(int k) const {
    return {mean[k], std::sqrt(std::max(0.0, cov(k, k))), n_samples, seed};
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Moments integrate(const MCConfig& cfg, std::uint64_t stream, int dim, int k, const Kernel& f) {
    cfg.validate();
    const std::int64_t units = unit_count(cfg);
    const std::int64_t batches = (units + cfg.batch_size - 1) / cfg.batch_size;
    std::vector<BatchStats> stats(static_cast<size_t>(batches));

    auto run_batch = [&](std::int64_t b) {
        BatchStats& s = stats[static_cast<size_t>(b)];
        s.mean = Vec::Zero(k);
        s.comoment = Eigen::MatrixXd::Zero(k, k);
        const std::int64_t count = std::min(cfg.batch_size, units - b * cfg.batch_size);
        std::vector<double> neg(static_cast<size_t>(dim));
        Vec x(k);
        Vec x2(k);
        Vec delta(k);
        for_each_unit(cfg, stream, dim, b, count, [&](const double* y) {
            f(y, x.data());
            if (cfg.antithetic) {
                for (int j = 0; j < dim; ++j) neg[static_cast<size_t>(j)] = -y[j];
                f(neg.data(), x2.data());
                for (int a = 0; a < k; ++a) x[a] = 0.5 * (x[a] + x2[a]);
            }
            ++s.units;
            const double inv = 1.0 / static_cast<double>(s.units);
            for (int a = 0; a < k; ++a) {
                delta[a] = x[a] - s.mean[a];
                s.mean[a] += delta[a] * inv;
            }
            for (int a = 0; a < k; ++a) {
                for (int c = 0; c < k; ++c) s.comoment(a, c) += delta[a] * (x[c] - s.mean[c]);
            }
        });
    };

    const int workers = static_cast<int>(std::min<std::int64_t>(worker_count(), batches));
    if (workers <= 1) {
        for (std::int64_t b = 0; b < batches; ++b) run_batch(b);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::int64_t b = w; b < batches; b += workers) run_batch(b);
            });
        }
        for (auto& t : pool) t.join();
    }

    BatchStats total;
    for (const auto& s : stats) merge(total, s);

    Moments m;
    m.mean = total.units > 0 ? total.mean : Vec::Zero(k);
    const double n = static_cast<double>(total.units);
    m.cov = total.units > 1 ? Eigen::MatrixXd(total.comoment / ((n - 1.0) * n)) : Eigen::MatrixXd::Zero(k, k);
    m.n_samples = cfg.antithetic ? 2 * units : units;
    m.seed = cfg.seed;
    return m;
}

void visit_gaussian_points(const MCConfig& cfg, std::uint64_t stream, int dim,
                           const std::function<void(const double*)>& fn) {
    cfg.validate();
    const std::int64_t units = unit_count(cfg);
    const std::int64_t batches = (units + cfg.batch_size - 1) / cfg.batch_size;
    std::vector<double> neg(static_cast<size_t>(dim));
    for (std::int64_t b = 0; b < batches; ++b) {
        const std::int64_t count = std::min(cfg.batch_size, units - b * cfg.batch_size);
        for_each_unit(cfg, stream, dim, b, count, [&](const double* y) {
            fn(y);
            if (cfg.antithetic) {
                for (int j = 0; j < dim; ++j) neg[static_cast<size_t>(j)] = -y[j];
                fn(neg.data());
            }
        });
    }
}

}  // namespace gpc
