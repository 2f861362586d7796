#include "gpc/gaussian.hpp"

#include "gpc/error.hpp"
#include "gpc/specfun.hpp"
#include "gpc/volume_model.hpp"
#include "shape_view.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gpc {
namespace {

using detail::ShapeView;
using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

constexpr double kQuadTol = 1e-12;
constexpr unsigned kQuadDepth = 15;

MCEstimate deterministic(double value, double err, const MCConfig& mc) {
    return {value, err, 0, mc.seed};
}

// Upper-tail-safe γ¹([lo, hi]).
double interval_measure(double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    if (lo > 0.0) return 0.5 * (std::erfc(lo / std::numbers::sqrt2) - std::erfc(hi / std::numbers::sqrt2));
    if (hi < 0.0) return 0.5 * (std::erfc(-hi / std::numbers::sqrt2) - std::erfc(-lo / std::numbers::sqrt2));
    return 1.0 - 0.5 * std::erfc(-lo / std::numbers::sqrt2) - 0.5 * std::erfc(hi / std::numbers::sqrt2);
}

// Feasible interval of {s : a s <= c} over all rows; empty if lo >= hi.
std::pair<double, double> feasible_interval(const Vec& a, const Vec& c) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < a.size(); ++r) {
        if (a[r] > 1e-14) {
            hi = std::min(hi, c[r] / a[r]);
        } else if (a[r] < -1e-14) {
            lo = std::max(lo, c[r] / a[r]);
        } else if (c[r] < -1e-12) {
            return {0.0, 0.0};
        }
    }
    return {lo, hi};
}

// Extreme rays of a pointed cone: generators tight on a rank n-1 set of normals.
std::vector<Vec> extreme_rays(const ConvexCone& cone) {
    const int n = cone.dim();
    std::vector<Vec> rays;
    for (Eigen::Index k = 0; k < cone.generators().rows(); ++k) {
        const Vec g = cone.generators().row(k).transpose();
        std::vector<Eigen::Index> tight;
        for (Eigen::Index j = 0; j < cone.normals().rows(); ++j) {
            if (std::abs(cone.normals().row(j).dot(g)) <= 1e-7) tight.push_back(j);
        }
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(tight.size()), n);
        for (size_t r = 0; r < tight.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = cone.normals().row(tight[r]);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
        lu.setThreshold(1e-9);
        if (sub.rows() == 0 || lu.rank() != n - 1) continue;
        const bool dup = std::any_of(rays.begin(), rays.end(), [&](const Vec& r) { return (r - g).norm() < 1e-9; });
        if (!dup) rays.push_back(g);
    }
    return rays;
}

double triangle_solid_angle(const Vec& a, const Vec& b, const Vec& c) {
    const Eigen::Vector3d a3 = a;
    const Eigen::Vector3d b3 = b;
    const Eigen::Vector3d c3 = c;
    const double num = std::abs(a3.dot(b3.cross(c3)));
    const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    return 2.0 * std::atan2(num, den);
}

}  // namespace

std::optional<double> cone_volume_exact(const ConvexCone& cone) {
    if (cone.dim() == 2) {
        const auto [lo, hi] = cone.angle_range_2d();
        return (hi - lo) / (2.0 * std::numbers::pi);
    }
    if (cone.dim() != 3) return std::nullopt;
    std::vector<Vec> rays = extreme_rays(cone);
    if (rays.size() < 3) return std::nullopt;
    const Eigen::MatrixXd basis = orthonormal_complement(cone.ref_dir());
    std::sort(rays.begin(), rays.end(), [&](const Vec& a, const Vec& b) {
        const Vec pa = basis.transpose() * a;
        const Vec pb = basis.transpose() * b;
        return std::atan2(pa[1], pa[0]) < std::atan2(pb[1], pb[0]);
    });
    double omega = 0.0;
    for (size_t k = 1; k + 1 < rays.size(); ++k) omega += triangle_solid_angle(rays[0], rays[k], rays[k + 1]);
    return omega / (4.0 * std::numbers::pi);
}

ConeVolume gauss_volume_cone(const ConvexCone& cone, const MCConfig& mc) {
    const ShapeView view(cone);
    const Moments mom = integrate(mc, stream_id("cone_volume"), cone.dim(), 1,
                                  [&](const double* y, double* out) { out[0] = view.in_cone(y) ? 1.0 : 0.0; });
    return {mom.component(0), cone_volume_exact(cone)};
}

MCEstimate halfspace_volume(const Vec& u, double t, const MCConfig& mc) {
    if (std::abs(u.norm() - 1.0) > kUnitTol) fail(ErrorCode::NotUnitVector, "halfspace normal must be a unit vector");
    const int n = static_cast<int>(u.size());
    const Moments mom = integrate(mc, stream_id("halfspace"), n, 1, [&](const double* y, double* out) {
        out[0] = ShapeView::dot(u.data(), y, n) <= t ? 1.0 : 0.0;
    });
    return mom.component(0);
}

MCEstimate cone_boundary_measure(const ConvexCone& cone, int facet, const MCConfig& mc) {
    const int n = cone.dim();
    if (facet < 0 || facet >= cone.normals().rows()) fail(ErrorCode::InvalidInput, "cone facet index out of range");
    const Eigen::MatrixXd basis = orthonormal_complement(cone.normals().row(facet).transpose());
    const ShapeView view(cone);
    const Moments mom = integrate(mc, stream_id("cone_boundary", static_cast<std::uint64_t>(facet)), n - 1, 1,
                                  [&](const double* y, double* out) {
                                      double x[8];
                                      for (int r = 0; r < n; ++r) {
                                          x[r] = 0.0;
                                          for (int c = 0; c < n - 1; ++c) x[r] += basis(r, c) * y[c];
                                      }
                                      out[0] = view.in_cone(x) ? 1.0 : 0.0;
                                  });
    return mom.component(0);
}

MCEstimate covolume(const WulffShape& k, const MCConfig& mc) {
    const ShapeView view(k);
    const Moments mom = integrate(mc, stream_id("covolume"), k.dim(), 1, [&](const double* y, double* out) {
        out[0] = (view.in_cone(y) && !view.in_shape(y)) ? 1.0 : 0.0;
    });
    return mom.component(0);
}

MCEstimate gauss_volume(const WulffShape& k, const MCConfig& mc) {
    const MCEstimate v = covolume(k, mc);
    if (const auto exact = cone_volume_exact(k.cone())) {
        return {*exact - v.value, v.std_err, v.n_samples, v.seed};
    }
    const MCEstimate c = gauss_volume_cone(k.cone(), mc).estimate;
    return {c.value - v.value, std::hypot(c.std_err, v.std_err), c.n_samples + v.n_samples, v.seed};
}

MCEstimate gauss_volume_direct(const WulffShape& k, const MCConfig& mc) {
    const ShapeView view(k);
    const Moments mom = integrate(mc, stream_id("gauss_volume_direct"), k.dim(), 1,
                                  [&](const double* y, double* out) { out[0] = view.in_shape(y) ? 1.0 : 0.0; });
    return mom.component(0);
}

namespace {

// Spherical Monte Carlo over Ω_C; the kernel sees the unit direction and its
// radial hit. The second output counts accepted directions.
template <class Fn>
Moments radial_integral(const WulffShape& k, const MCConfig& mc, std::uint64_t stream, Fn&& fn) {
    const ShapeView view(k);
    const int n = k.dim();
    Moments mom = integrate(mc, stream, n, 2, [&](const double* y, double* out) {
        out[0] = 0.0;
        out[1] = 0.0;
        if (!view.in_cone_strict(y)) return;
        double v[8];
        const double norm = std::sqrt(ShapeView::dot(y, y, n));
        for (int j = 0; j < n; ++j) v[j] = y[j] / norm;
        out[0] = fn(v, view.radial(v), view);
        out[1] = 1.0;
    });
    if (mom.mean[1] == 0.0) fail(ErrorCode::EmptyOmegaC, "no sampled direction fell inside the cone");
    return mom;
}

}  // namespace

MCEstimate covolume_radial(const WulffShape& k, const MCConfig& mc) {
    if (k.dim() == 2) {
        const auto pieces = QuadratureModel2D(k.cone(), k.omega()).integrate(k.defining_h().values());
        return deterministic(pieces.covolume, pieces.err, mc);
    }
    const int n = k.dim();
    return radial_integral(k, mc, stream_id("covolume_radial"), [n](const double*, RadialHit hit, const ShapeView&) {
               return chi_cdf(hit.rho, n);
           }).component(0);
}

MCEstimate facet_surface(const WulffShape& k, int i, const MCConfig& mc) {
    if (i < 0 || i >= k.facet_count()) fail(ErrorCode::InvalidInput, "facet index out of range");
    mc.validate();
    if (!k.facet_active(i)) return {0.0, 0.0, mc.n_samples, mc.seed};
    const int n = k.dim();
    const Vec u = k.omega()[i];
    const double hbar = k.effective_h()[i];
    const Eigen::MatrixXd basis = orthonormal_complement(u);
    const Vec foot = -hbar * u;
    const double scale = std::exp(-0.5 * hbar * hbar) * kInvSqrt2Pi;
    const ShapeView view(k);
    const Moments mom = integrate(mc, stream_id("facet_surface", static_cast<std::uint64_t>(i)), n - 1, 1,
                                  [&](const double* y, double* out) {
                                      double x[8];
                                      for (int r = 0; r < n; ++r) {
                                          x[r] = foot[r];
                                          for (int c = 0; c < n - 1; ++c) x[r] += basis(r, c) * y[c];
                                      }
                                      out[0] = view.in_shape(x, i) ? scale : 0.0;
                                  });
    return mom.component(0);
}

MCEstimate surface_radial(const WulffShape& k, int i, const MCConfig& mc) {
    if (i < 0 || i >= k.facet_count()) fail(ErrorCode::InvalidInput, "facet index out of range");
    if (k.dim() == 2) {
        const auto pieces = QuadratureModel2D(k.cone(), k.omega()).integrate(k.defining_h().values());
        return deterministic(pieces.surface[i], pieces.err, mc);
    }
    const int n = k.dim();
    return radial_integral(k, mc, stream_id("surface_radial", static_cast<std::uint64_t>(i)),
                           [n, i](const double* v, RadialHit hit, const ShapeView& view) {
                               if (hit.index != i) return 0.0;
                               const double proj = -ShapeView::dot(&view.dirs[static_cast<size_t>(i * n)], v, n);
                               return chi_pdf(hit.rho, n) / proj;
                           })
        .component(0);
}

MCEstimate sector_cone_volume(const WulffShape& k, int i, const MCConfig& mc) {
    if (i < 0 || i >= k.facet_count()) fail(ErrorCode::InvalidInput, "facet index out of range");
    if (k.dim() == 2) {
        const auto pieces = QuadratureModel2D(k.cone(), k.omega()).integrate(k.defining_h().values());
        return deterministic(pieces.sector[i], pieces.err, mc);
    }
    const int n = k.dim();
    return radial_integral(k, mc, stream_id("sector_cone_volume", static_cast<std::uint64_t>(i)),
                           [n, i](const double*, RadialHit hit, const ShapeView&) {
                               return hit.index == i ? chi_cdf(hit.rho, n) : 0.0;
                           })
        .component(0);
}

MCEstimate polytope_gauss_measure(const Eigen::MatrixXd& a, const Vec& c) {
    const int m = static_cast<int>(a.cols());
    if (m == 1) {
        const auto [lo, hi] = feasible_interval(a.col(0), c);
        return {interval_measure(lo, hi), 0.0, 0, 0};
    }
    if (m != 2) fail(ErrorCode::InvalidInput, "exact polytope measure supports dimensions 1 and 2 only");

    const double scale = 1.0 + c.cwiseAbs().maxCoeff();
    std::vector<double> xs;
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index s = r + 1; s < a.rows(); ++s) {
            Eigen::Matrix2d sys;
            sys << a(r, 0), a(r, 1), a(s, 0), a(s, 1);
            if (std::abs(sys.determinant()) < 1e-12) continue;
            const Eigen::Vector2d v = sys.partialPivLu().solve(Eigen::Vector2d(c[r], c[s]));
            if (((a * v) - c).maxCoeff() <= 1e-9 * scale) xs.push_back(v[0]);
        }
    }
    if (xs.empty()) return {0.0, 0.0, 0, 0};
    std::sort(xs.begin(), xs.end());

    double total = 0.0;
    double err = 0.0;
    for (size_t q = 0; q + 1 < xs.size(); ++q) {
        if (xs[q + 1] - xs[q] <= 1e-14 * (1.0 + std::abs(xs[q]))) continue;
        auto slice = [&](double y1) {
            const Vec rhs = c - a.col(0) * y1;
            const auto [lo, hi] = feasible_interval(a.col(1), rhs);
            return phi_pdf(y1) * interval_measure(lo, hi);
        };
        double e = 0.0;
        total += GK::integrate(slice, xs[q], xs[q + 1], kQuadDepth, kQuadTol, &e);
        err += e;
    }
    return {total, err, 0, 0};
}

namespace {

MCEstimate exact_section_surface(const ConvexCone& cone, const Mat& dirs, const std::vector<double>& h, int i,
                                 double hbar) {
    const int n = cone.dim();
    const Vec u = dirs.row(i).transpose();
    const Eigen::MatrixXd basis = orthonormal_complement(u);
    const Vec foot = -hbar * u;
    const Eigen::Index p = cone.normals().rows();
    const Eigen::Index others = dirs.rows() - 1;
    Eigen::MatrixXd a(p + others, n - 1);
    Vec c(p + others);
    for (Eigen::Index j = 0; j < p; ++j) {
        const Vec w = cone.normals().row(j).transpose();
        a.row(j) = (basis.transpose() * w).transpose();
        c[j] = -w.dot(foot);
    }
    Eigen::Index row = p;
    for (Eigen::Index k = 0; k < dirs.rows(); ++k) {
        if (k == i) continue;
        const Vec w = dirs.row(k).transpose();
        a.row(row) = (basis.transpose() * w).transpose();
        c[row] = -h[static_cast<size_t>(k)] - w.dot(foot);
        ++row;
    }
    const MCEstimate section = polytope_gauss_measure(a, c);
    const double scale = std::exp(-0.5 * hbar * hbar) * kInvSqrt2Pi;
    return {scale * section.value, scale * section.std_err, 0, 0};
}

}  // namespace

MCEstimate facet_surface_exact(const WulffShape& k, int i) {
    if (k.dim() > 3) fail(ErrorCode::InvalidInput, "exact facet surface needs n <= 3");
    if (i < 0 || i >= k.facet_count()) fail(ErrorCode::InvalidInput, "facet index out of range");
    if (!k.facet_active(i)) return {};
    return exact_section_surface(k.cone(), k.omega().matrix(), k.defining_h().values(), i, k.effective_h()[i]);
}

MCEstimate single_facet_surface(const ConvexCone& cone, const Vec& u, double t, const MCConfig& mc) {
    if (!(t > 0.0)) fail(ErrorCode::NonPositiveSupport, "support value must be positive");
    Mat dirs(1, cone.dim());
    dirs.row(0) = u.transpose();
    if (cone.dim() <= 3) {
        DirectionSet::create(cone, dirs);
        return exact_section_surface(cone, dirs, {t}, 0, t);
    }
    const WulffShape k = make_wulff(cone, DirectionSet::create(cone, dirs), SupportVector({t}));
    return facet_surface(k, 0, mc);
}

}  // namespace gpc
