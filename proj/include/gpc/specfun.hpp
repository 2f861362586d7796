#pragma once

namespace gpc {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

double phi_pdf(double t);
/// Standard normal CDF.
double phi_cdf(double t);
/// Inverse of phi_cdf on (0, 1).
double phi_inv(double p);

/// ∫_0^R e^{-r²/2} r^{n-1} dr.
double radial_mass(double r, int n);
/// ∫_R^∞ e^{-r²/2} r^{n-1} dr, accurate in the far tail.
double radial_tail(double r, int n);

// Chi distribution with n degrees of freedom: the law of |Y| for a standard
// n-Gaussian Y. chi_sf(R) = radial_tail(R) / radial_tail(0).
double chi_cdf(double r, int n);
double chi_sf(double r, int n);
double chi_pdf(double r, int n);

/// (n-1)-dimensional area of the unit sphere in R^n.
double sphere_area(int n);

}  // namespace gpc
