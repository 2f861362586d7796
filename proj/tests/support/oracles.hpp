#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's estimators.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

inline double Phi(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Φ(t) by Simpson quadrature of the density on [-12, t].
inline double Phi_quadrature(double t) {
    return simpson([](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }, -12.0, t, 200000);
}

/// Root of f on [a, b] with a sign change.
inline double bisect(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
    double fa = f(a);
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if ((fm < 0) == (fa < 0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

// Quarter-cone closed forms for K_t = {x ∈ C : x₂ >= t}, b = -e₂.
inline double g_surface(double t) {
    return std::exp(-0.5 * t * t) * std::sqrt(2.0 * std::numbers::pi) * (2.0 * Phi(t) - 1.0);
}
inline double S_quarter(double t) { return g_surface(t) / (2.0 * std::numbers::pi); }
inline double C_quarter(double t) { return t * S_quarter(t); }
/// γ²(K_t) = ∫_t^∞ φ(s)(2Φ(s) - 1) ds = Φ(t)(1 - Φ(t)).
inline double gamma_quarter(double t) { return Phi(t) * (1.0 - Phi(t)); }

/// max <c, x> over {x : A x <= b} by enumerating every vertex (all n-subsets
/// of constraints). Only valid when the maximum is attained.
inline double vertex_enumeration_max(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
    const int n = static_cast<int>(a.cols());
    const int m = static_cast<int>(a.rows());
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> idx(static_cast<size_t>(n));
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == n) {
            Eigen::MatrixXd sys(n, n);
            Eigen::VectorXd rhs(n);
            for (int r = 0; r < n; ++r) {
                sys.row(r) = a.row(idx[static_cast<size_t>(r)]);
                rhs[r] = b[idx[static_cast<size_t>(r)]];
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
            if (lu.rank() < n) return;
            const Eigen::VectorXd x = lu.solve(rhs);
            if (((a * x) - b).maxCoeff() > 1e-9) return;
            best = std::max(best, c.dot(x));
            return;
        }
        for (int k = start; k < m; ++k) {
            idx[static_cast<size_t>(depth)] = k;
            rec(k + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace oracle
