#pragma once

#include "gpc/gaussian.hpp"

#include <optional>
#include <vector>

namespace gpc {

/// Nonnegative weights on the directions of ω. Estimated measures carry
/// per-weight standard errors; input data (μ) does not.
struct DiscreteMeasure {
    DirectionSet omega;
    std::vector<double> weights;
    std::optional<std::vector<double>> std_errs;

    /// Validates finiteness and nonnegativity; length must match ω.
    static DiscreteMeasure exact(const DirectionSet& omega, std::vector<double> weights);

    double total() const;
    int size() const { return static_cast<int>(weights.size()); }
    double std_err(int i) const { return std_errs ? (*std_errs)[static_cast<size_t>(i)] : 0.0; }
    /// Throws DegenerateMeasure unless some weight is strictly positive.
    void require_nonzero() const;
};

/// S_{γⁿ}(K, ·) on ω; weight i is facet_surface(K, i).
DiscreteMeasure surface_measure(const WulffShape& k, const MCConfig& mc);

/// C_{γⁿ}(K, ·) = h̄_K ⊙ S_{γⁿ}(K, ·), from the same surface estimates.
DiscreteMeasure cone_measure(const WulffShape& k, const MCConfig& mc);

/// γ₁(K, L) = Σ_i h̄_L(u_i) S_{γⁿ}(K, u_i).
MCEstimate mixed_volume(const WulffShape& k, const WulffShape& l, const MCConfig& mc);

/// I_μ(h) = γⁿ([h]) Σ α_i h_i.
MCEstimate functional_I(const DiscreteMeasure& mu, const SupportVector& h, const ConvexCone& cone, const MCConfig& mc);

/// L_μ(h) = γⁿ([h]) exp(Σ α_i log h_i).
MCEstimate functional_L(const DiscreteMeasure& mu, const SupportVector& h, const ConvexCone& cone, const MCConfig& mc);

/// c = Σ α_i h̄_K(u_i) / γⁿ(K). Throws ZeroVolume if γⁿ(K) is below five
/// standard errors.
MCEstimate normalization_c(const WulffShape& k, const DiscreteMeasure& mu, const MCConfig& mc);

}  // namespace gpc
