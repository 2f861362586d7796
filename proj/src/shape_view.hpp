#pragma once

#include "gpc/geometry.hpp"

#include <vector>

namespace gpc::detail {

// Flat copies of the constraint data for tight sampling loops.
struct ShapeView {
    int n = 0;
    int p = 0;  // cone normals
    int m = 0;  // directions
    std::vector<double> normals;
    std::vector<double> dirs;
    std::vector<double> h;

    explicit ShapeView(const ConvexCone& cone) : n(cone.dim()), p(static_cast<int>(cone.normals().rows())) {
        normals.assign(cone.normals().data(), cone.normals().data() + cone.normals().size());
    }

    explicit ShapeView(const WulffShape& k) : ShapeView(k.cone()) {
        m = k.facet_count();
        const Mat& d = k.omega().matrix();
        dirs.assign(d.data(), d.data() + d.size());
        h = k.defining_h().values();
    }

    static double dot(const double* a, const double* b, int n) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += a[j] * b[j];
        return s;
    }

    bool in_cone(const double* x, double eps = kGeomEps) const {
        for (int j = 0; j < p; ++j) {
            if (dot(&normals[static_cast<size_t>(j * n)], x, n) > eps) return false;
        }
        return true;
    }

    bool in_cone_strict(const double* x) const {
        for (int j = 0; j < p; ++j) {
            if (dot(&normals[static_cast<size_t>(j * n)], x, n) >= 0.0) return false;
        }
        return true;
    }

    // Membership in [h] ignoring the constraint with index skip (if any).
    bool in_shape(const double* x, int skip = -1) const {
        if (!in_cone(x)) return false;
        for (int i = 0; i < m; ++i) {
            if (i == skip) continue;
            if (dot(&dirs[static_cast<size_t>(i * n)], x, n) > -h[static_cast<size_t>(i)] + kGeomEps) return false;
        }
        return true;
    }

    // Radial function along the unit direction v: (ϱ, argmax).
    RadialHit radial(const double* v) const {
        RadialHit hit{-1.0, 0};
        for (int i = 0; i < m; ++i) {
            const double rho = h[static_cast<size_t>(i)] / -dot(&dirs[static_cast<size_t>(i * n)], v, n);
            if (rho > hit.rho) {
                hit.rho = rho;
                hit.index = i;
            }
        }
        return hit;
    }
};

}  // namespace gpc::detail
