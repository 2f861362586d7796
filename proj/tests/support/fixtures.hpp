#pragma once

#include "gpc/gaussian.hpp"
#include "gpc/geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace fixtures {

using gpc::Mat;
using gpc::Vec;

inline Mat rows(std::initializer_list<std::initializer_list<double>> list) {
    Mat m(static_cast<Eigen::Index>(list.size()), static_cast<Eigen::Index>(list.begin()->size()));
    Eigen::Index r = 0;
    for (const auto& row : list) {
        Eigen::Index c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

inline Vec vec(std::initializer_list<double> list) {
    Vec v(static_cast<Eigen::Index>(list.size()));
    Eigen::Index i = 0;
    for (double x : list) v[i++] = x;
    return v;
}

/// Planar cone {θ ∈ [π/4, 3π/4]}.
inline gpc::ConvexCone quarter_cone() {
    const double s = std::sqrt(0.5);
    return gpc::build_cone(rows({{s, s}, {-s, s}}), rows({{s, -s}, {-s, -s}}));
}

/// Planar cone between angles a < b (b - a < π).
inline gpc::ConvexCone planar_cone(double a, double b) {
    return gpc::cone_from_rays_2d(rows({{std::cos(a), std::sin(a)}, {std::cos(b), std::sin(b)}}));
}

inline gpc::ConvexCone octant() {
    return gpc::build_cone(Mat::Identity(3, 3), -Mat::Identity(3, 3));
}

/// Simplicial cone in R³ spanned by three unit generators (right-handed or not).
inline gpc::ConvexCone simplicial_cone(const Vec& g0, const Vec& g1, const Vec& g2) {
    Mat gens(3, 3);
    gens.row(0) = g0.normalized().transpose();
    gens.row(1) = g1.normalized().transpose();
    gens.row(2) = g2.normalized().transpose();
    Mat normals(3, 3);
    for (int k = 0; k < 3; ++k) {
        const Eigen::Vector3d a = gens.row((k + 1) % 3).transpose();
        const Eigen::Vector3d b = gens.row((k + 2) % 3).transpose();
        Vec w = a.cross(b).normalized();
        if (w.dot(gens.row(k).transpose()) > 0) w = -w;
        normals.row(k) = w.transpose();
    }
    return gpc::build_cone(gens, normals);
}

/// Symmetric 3-ray cone around e₃ with generators at polar angle `tilt`.
inline gpc::ConvexCone tripod(double tilt) {
    auto ray = [&](double phi) { return vec({std::sin(tilt) * std::cos(phi), std::sin(tilt) * std::sin(phi), std::cos(tilt)}); };
    const double step = 2.0 * std::numbers::pi / 3.0;
    return simplicial_cone(ray(0.0), ray(step), ray(2.0 * step));
}

/// Unit direction strictly inside the dual cone: a positive combination of
/// the facet normals with weights in [lo, 1].
inline Vec random_dual_direction(const gpc::ConvexCone& cone, std::mt19937_64& rng, double lo = 0.15) {
    std::uniform_real_distribution<double> w(lo, 1.0);
    for (;;) {
        Vec u = Vec::Zero(cone.dim());
        for (Eigen::Index j = 0; j < cone.normals().rows(); ++j) u += w(rng) * cone.normals().row(j).transpose();
        u.normalize();
        if ((cone.generators() * u).maxCoeff() < -0.05) return u;
    }
}

struct RandomShapeOptions {
    int min_dirs = 1;
    int max_dirs = 4;
    double h_lo = 0.3;
    double h_hi = 1.5;
    bool all_active = true;
    double min_share = 0.0;  // minimum share S_i / Σ S of every facet (exact measure, n <= 3)
};

/// Wulff shape with random directions and supports, redrawn until the
/// requested facet conditions hold.
inline gpc::WulffShape random_shape(const gpc::ConvexCone& cone, std::mt19937_64& rng,
                                    const RandomShapeOptions& opt = {}) {
    std::uniform_int_distribution<int> count(opt.min_dirs, opt.max_dirs);
    std::uniform_real_distribution<double> hdist(opt.h_lo, opt.h_hi);
    for (;;) {
        const int m = count(rng);
        Mat dirs(m, cone.dim());
        bool distinct = true;
        for (int i = 0; i < m; ++i) {
            dirs.row(i) = random_dual_direction(cone, rng).transpose();
            for (int j = 0; j < i; ++j) distinct = distinct && (dirs.row(i) - dirs.row(j)).norm() > 0.1;
        }
        if (!distinct) continue;
        std::vector<double> h(static_cast<size_t>(m));
        for (double& x : h) x = hdist(rng);
        const auto omega = gpc::DirectionSet::create(cone, dirs);
        auto k = gpc::make_wulff(cone, omega, gpc::SupportVector(h));
        bool ok = true;
        for (int i = 0; i < m && opt.all_active; ++i) ok = ok && k.facet_active(i);
        if (ok && opt.min_share > 0.0) {
            std::vector<double> s(static_cast<size_t>(m));
            double total = 0.0;
            for (int i = 0; i < m; ++i) total += s[static_cast<size_t>(i)] = gpc::facet_surface_exact(k, i).value;
            for (double x : s) ok = ok && x >= opt.min_share * total;
        }
        if (ok) return k;
    }
}

/// The single-direction shape K_t = {x ∈ C : <x, b> <= -t}.
inline gpc::WulffShape single_facet(const gpc::ConvexCone& cone, const Vec& b, double t) {
    Mat d(1, cone.dim());
    d.row(0) = b.transpose();
    return gpc::make_wulff(cone, gpc::DirectionSet::create(cone, d), gpc::SupportVector({t}));
}

}  // namespace fixtures
