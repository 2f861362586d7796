#pragma once

#include "gpc/geometry.hpp"
#include "gpc/montecarlo.hpp"

#include <optional>

namespace gpc {

struct ConeVolume {
    MCEstimate estimate;            // Gaussian acceptance sampling
    std::optional<double> analytic; // angle / 2π in the plane, solid angle / 4π for n = 3
};

/// γⁿ(C).
ConeVolume gauss_volume_cone(const ConvexCone& cone, const MCConfig& mc);

/// Exact γⁿ(C) when available (n = 2, or n = 3).
std::optional<double> cone_volume_exact(const ConvexCone& cone);

/// γⁿ({x : <x, u> <= t}) by acceptance sampling; u must be a unit vector.
MCEstimate halfspace_volume(const Vec& u, double t, const MCConfig& mc);

/// γ^{n-1} of the boundary facet {x ∈ C : <x, w_j> = 0} of the cone itself.
MCEstimate cone_boundary_measure(const ConvexCone& cone, int facet, const MCConfig& mc);

/// V_G(K) = γⁿ(C \ K) by Gaussian acceptance sampling.
MCEstimate covolume(const WulffShape& k, const MCConfig& mc);

/// γⁿ(K) = γⁿ(C) - V_G(K). Uses the exact cone volume when it is known,
/// otherwise an independent cone estimate; errors add in quadrature.
MCEstimate gauss_volume(const WulffShape& k, const MCConfig& mc);

/// γⁿ(K) by direct acceptance sampling of K.
MCEstimate gauss_volume_direct(const WulffShape& k, const MCConfig& mc);

/// V_G(K) through the radial representation
/// (2π)^{-n/2} ∫_{Ω_C} radial_mass(ϱ_K(v), n) dv. Deterministic angular
/// quadrature for n = 2, spherical Monte Carlo otherwise.
MCEstimate covolume_radial(const WulffShape& k, const MCConfig& mc);

/// S_{γⁿ}(K, {u_i}) via the hyperplane factorization. Zero for inactive facets.
MCEstimate facet_surface(const WulffShape& k, int i, const MCConfig& mc);

/// S_{γⁿ}(K, {u_i}) through the radial representation.
MCEstimate surface_radial(const WulffShape& k, int i, const MCConfig& mc);

/// γⁿ of the union of segments [o, x] over the facet with normal u_i.
MCEstimate sector_cone_volume(const WulffShape& k, int i, const MCConfig& mc);

/// γ^{m}(P) for a bounded polytope P = {y ∈ R^m : A y <= c}, m ∈ {1, 2}, by
/// vertex enumeration and adaptive 1-D quadrature. The std_err field holds
/// the quadrature error estimate.
MCEstimate polytope_gauss_measure(const Eigen::MatrixXd& a, const Vec& c);

/// Deterministic S_{γⁿ}(K, {u_i}) for n <= 3 from the exact section measure.
MCEstimate facet_surface_exact(const WulffShape& k, int i);

/// Surface weight at u of the single-facet shape [(C, {u}, t)]: exact for
/// n <= 3, hyperplane Monte Carlo otherwise.
MCEstimate single_facet_surface(const ConvexCone& cone, const Vec& u, double t, const MCConfig& mc);

}  // namespace gpc
