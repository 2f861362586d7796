#include "gpc/specfun.hpp"

#include "gpc/error.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>

namespace gpc {
namespace {

// T_n(R) = ∫_R^∞ e^{-r²/2} r^{n-1} dr via T_n = R^{n-2} e^{-R²/2} + (n-2) T_{n-2}.
// Every term is positive, so the recursion loses nothing in the tail.
double tail_recursive(double r, int n) {
    double t = (n % 2 == 1) ? std::sqrt(std::numbers::pi / 2.0) * std::erfc(r / std::numbers::sqrt2)
                            : std::exp(-0.5 * r * r);
    for (int k = (n % 2 == 1) ? 3 : 4; k <= n; k += 2) {
        t = std::pow(r, k - 2) * std::exp(-0.5 * r * r) + (k - 2) * t;
    }
    return t;
}

void require_dim(int n) {
    if (n < 1) fail(ErrorCode::InvalidInput, "dimension must be positive");
}

}  // namespace

double phi_pdf(double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }

double phi_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

double phi_inv(double p) {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidInput, "phi_inv needs p in (0, 1)");
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double radial_mass(double r, int n) {
    require_dim(n);
    if (!(r > 0.0)) return 0.0;
    const double a = 0.5 * n;
    return std::pow(2.0, a - 1.0) * std::tgamma(a) * boost::math::gamma_p(a, 0.5 * r * r);
}

double radial_tail(double r, int n) {
    require_dim(n);
    return tail_recursive(r < 0.0 ? 0.0 : r, n);
}

double chi_sf(double r, int n) {
    require_dim(n);
    if (!(r > 0.0)) return 1.0;
    return tail_recursive(r, n) / tail_recursive(0.0, n);
}

double chi_cdf(double r, int n) {
    require_dim(n);
    if (!(r > 0.0)) return 0.0;
    return boost::math::gamma_p(0.5 * n, 0.5 * r * r);
}

double chi_pdf(double r, int n) {
    require_dim(n);
    if (r < 0.0) return 0.0;
    return std::pow(r, n - 1) * std::exp(-0.5 * r * r) / tail_recursive(0.0, n);
}

double sphere_area(int n) {
    require_dim(n);
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace gpc
