#pragma once

#include "gpc/measures.hpp"

#include <optional>
#include <vector>

namespace gpc {

enum class ProblemKind { Surface, Log };
enum class SolveMethod { Gradient, FixedPoint };

struct SolveOptions {
    int max_iters = 300;
    double step_init = 1.0;   // initial inverse-Hessian scale in log coordinates
    double armijo_c = 1e-4;
    double damping = 0.5;     // fixed-point exponent β
    SolveMethod method = SolveMethod::Gradient;
    std::vector<std::int64_t> mc_schedule{100000, 1000000, 4000000};
    double tol_residual = 0.02;
    bool normalized = true;   // false: hard-fail weights the screen proves unattainable
    std::uint64_t seed = 1;
    MCConfig mc;              // batch size and antithetic flag; counts come from mc_schedule
    std::optional<std::vector<double>> initial_h;

    /// Throws InvalidInput on out-of-range fields or when tol_residual is
    /// below five times the final relative Monte Carlo error 1/√N.
    void validate() const;
};

struct TraceRow {
    int iteration = 0;
    int phase = 0;
    double objective = 0.0;
    double residual = 0.0;  // max relative residual under the current model
    double gamma = 0.0;
    double c = 0.0;
    double gamma_err = 0.0;
    double c_err = 0.0;     // c = Σ α_i h_i / γ, error carried from γ
};

struct SolveReport {
    ProblemKind kind = ProblemKind::Surface;
    SupportVector solution_h;        // effective support of the solution
    std::vector<double> residuals;   // independent final check
    double max_residual = 0.0;
    MCEstimate c_value;              // surface kind
    MCEstimate gamma;                // γⁿ(K)
    MCEstimate covolume;             // V_G(K)
    DiscreteMeasure surface;         // S_{γⁿ}(K, ·) from the final check
    std::vector<TraceRow> trace;
    bool converged = false;
    int iterations = 0;
    double wall_time = 0.0;          // seconds
    std::vector<std::string> warnings;
};

/// Normalized Gaussian Minkowski problem c·S_{γⁿ}(K, ·) = μ by ascent on
/// log γⁿ([h]) + log Σ α_i h_i.
SolveReport solve_gaussian_minkowski(const ConvexCone& cone, const DirectionSet& omega, const DiscreteMeasure& mu,
                                     const SolveOptions& opts);

/// Gaussian log-Minkowski problem C_{γⁿ}(K, ·)/γⁿ(K) = μ by ascent on
/// log γⁿ([h]) + Σ α_i log h_i.
SolveReport solve_log_minkowski(const ConvexCone& cone, const DirectionSet& omega, const DiscreteMeasure& mu,
                                const SolveOptions& opts);

inline constexpr double kResidualGuard = 1e-12;

/// Per-direction relative residuals |c S_i - α_i| / max(α_i, ε) (surface) or
/// |C_i / γⁿ - α_i| / max(α_i, ε) (log).
std::vector<double> residual(const WulffShape& k, const DiscreteMeasure& mu, ProblemKind kind, const MCConfig& mc);

struct FeasibilityEntry {
    double alpha = 0.0;
    double sup_weight = 0.0;  // sup_t S_{γⁿ}(H(t) + C, u_i)
    double sup_err = 0.0;
    double t_at_sup = 0.0;
    bool infeasible = false;  // α_i > sup + 3σ
};

struct FeasibilityReport {
    std::vector<FeasibilityEntry> entries;
    bool feasible = true;
};

/// Per-direction supremum of single-facet surface weights, for the
/// unnormalized reading of the surface problem.
FeasibilityReport feasibility_screen(const ConvexCone& cone, const DiscreteMeasure& mu, const MCConfig& mc);

}  // namespace gpc
