#pragma once

#include "gpc/measures.hpp"

#include <string>
#include <vector>

namespace gpc {

enum class CheckKind {
    Inequality,        // lhs >= rhs; passes when margin >= -3
    StrictInequality,  // lhs > rhs; passes when margin > 3
    Equality,          // passes when |margin| <= 3
    Derivative,        // passes when |lhs - rhs| <= max(1% |rhs|, 3σ)
    Tolerance,         // uniqueness: lhs = max relative gap, rhs = tolerance
};

/// One numerical check. margin is (lhs - rhs) / σ, where σ is the standard
/// error of the difference; for Tolerance checks it is (rhs - lhs) / rhs.
struct CheckReport {
    std::string name;
    CheckKind kind = CheckKind::Inequality;
    MCEstimate lhs;
    MCEstimate rhs;
    double sigma = 0.0;
    double margin = 0.0;
    bool passed = false;
    bool precondition = true;  // false: the hypothesis did not hold, nothing to check
    std::string digest;        // inputs
};

/// d/dt γⁿ([h̄ + t f]) at 0 by Richardson-extrapolated central differences
/// over `steps` (at least three), against -Σ f_i S_i.
/// Throws StepTooLarge if h̄ ± δ f loses positivity.
CheckReport check_variational_volume(const WulffShape& k, const std::vector<double>& f,
                                     const std::vector<double>& steps, const MCConfig& mc);

/// Three halving steps, the largest moving any support value by 5% of the
/// smallest h̄ (additive) or by a factor e^{±0.05} (multiplicative).
std::vector<double> default_steps(const WulffShape& k, const std::vector<double>& f, bool multiplicative);

/// Same for the multiplicative family h̄ e^{t f}, against -Σ f_i C_i.
CheckReport check_variational_log(const WulffShape& k, const std::vector<double>& f,
                                  const std::vector<double>& steps, const MCConfig& mc);

/// (1/γⁿ(K)) Σ (h̄_K - h̄_L) S_K ≥ log γⁿ(L) - log γⁿ(K).
CheckReport check_minkowski_inequality(const WulffShape& k, const WulffShape& l, const MCConfig& mc);

/// γ₁(K,K) - γ₁(K,L) ≥ γⁿ(K) log(γⁿ(L)/γⁿ(K)).
CheckReport check_mixed_minkowski(const WulffShape& k, const WulffShape& l, const MCConfig& mc);

struct EhrhardReport {
    CheckReport ehrhard;        // Φ⁻¹(γ(M)) ≥ (1-t)Φ⁻¹(γ(K)) + tΦ⁻¹(γ(L))
    CheckReport log_concavity;  // log γ(M) ≥ (1-t) log γ(K) + t log γ(L)
};

/// Both forms on the Wulff composite M = [(1-t) h̄_K + t h̄_L], t ∈ (0, 1).
EhrhardReport check_ehrhard_wulff(const WulffShape& k, const WulffShape& l, double t, const MCConfig& mc);

/// Σ_i γⁿ(sector_i) > (1/n) Σ_i h̄_i S_i over active facets.
CheckReport check_cone_volume_bound(const WulffShape& k, const MCConfig& mc);

/// V_G(K) > (1/n) γ₁(K, K), with V_G from acceptance sampling.
CheckReport check_mixed_volume_bound(const WulffShape& k, const MCConfig& mc);

enum class MeasureKind { Surface, Cone };

/// Single-facet profile: S_{γⁿ}([(C, {b}, t)], b) for Surface, t times that
/// for Cone. Exact for n <= 3.
MCEstimate scalar_profile(const ConvexCone& cone, const Vec& b, MeasureKind kind, double t, const MCConfig& mc);

struct NonUniquenessPair {
    MeasureKind kind = MeasureKind::Surface;
    double t1 = 0.0;
    double t2 = 0.0;
    double t_peak = 0.0;
    double peak_value = 0.0;
    double common_value = 0.0;  // profile level (1 - ρ) · peak
    WulffShape k;               // [(C, {b}, t1)]
    WulffShape l;               // [(C, {b}, t2)]
    MCEstimate measure_k;       // Monte Carlo weight at b
    MCEstimate measure_l;
    MCEstimate gamma_k;
    MCEstimate gamma_l;
    bool multimodal = false;    // coarse scan saw more than one local maximum
};

/// Two distinct single-facet shapes with the same measure at b.
/// Throws PeakNotFound or VerificationFailed.
NonUniquenessPair find_nonuniqueness(const ConvexCone& cone, const Vec& b, MeasureKind kind,
                                     const MCConfig& mc, double rho = 0.3);

/// If |γⁿ(K) - γⁿ(L)| ≤ vol_tol and S_L ≈ c S_K within 3σ, requires
/// max_i |h̄_K,i - h̄_L,i| / h̄_K,i ≤ sup_tol. precondition reports whether
/// the hypothesis held; when it did not the check passes vacuously.
CheckReport uniqueness_compare(const WulffShape& k, const WulffShape& l, double vol_tol, double sup_tol,
                               const MCConfig& mc);

std::string shape_digest(const WulffShape& k);

}  // namespace gpc
