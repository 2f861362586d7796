#pragma once

#include "gpc/linalg.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace gpc {

// Membership slack, relative support-equality tolerance and the strict
// interiority margin for directions of the dual cone.
inline constexpr double kGeomEps = 1e-9;
inline constexpr double kSupportRelTol = 1e-7;
inline constexpr double kDirectionMargin = 1e-6;
inline constexpr double kUnitTol = 1e-9;
// Sampling kernels use fixed-size buffers; the library advertises n <= 4.
inline constexpr int kMaxDim = 8;

/// A pointed, full-dimensional polyhedral cone C given by both its
/// generators and its outward facet normals, C = {x : <x, w_j> <= 0}.
///
/// The dual cone C° is generated by the normals; its interior is
/// {u : <u, g> < 0 for every generator g}. The reference direction lies in
/// int C ∩ int(-C°).
class ConvexCone {
public:
    int dim() const { return static_cast<int>(ref_dir_.size()); }
    const Mat& generators() const { return generators_; }
    const Mat& normals() const { return normals_; }
    const Vec& ref_dir() const { return ref_dir_; }

    bool contains(const Vec& x) const;
    bool dual_contains(const Vec& u) const;
    /// Strict interior test: <v, w_j> < -margin for every facet normal.
    bool interior_contains(const Vec& v, double margin = 0.0) const;

    /// Planar cones only: the angular interval [lo, hi] covered by C,
    /// measured in radians with hi - lo < pi.
    std::pair<double, double> angle_range_2d() const;

    friend ConvexCone build_cone(const Mat&, const Mat&, const std::optional<Vec>&);

private:
    Mat generators_;
    Mat normals_;
    Vec ref_dir_;
};

/// Validates and assembles a cone. Without ref_dir the normalized mean of the
/// generators is used. Throws NotPointed, NotFullDimensional,
/// InconsistentDualData or BadReferenceDirection.
ConvexCone build_cone(const Mat& generators, const Mat& normals,
                      const std::optional<Vec>& ref_dir = std::nullopt);

/// Planar convenience constructor: keeps the two extreme rays (by angle) and
/// derives their outward normals.
ConvexCone cone_from_rays_2d(const Mat& rays);

bool cone_contains(const ConvexCone& cone, const Vec& x);
bool dual_contains(const ConvexCone& cone, const Vec& u);

/// Finite set of distinct unit directions, each strictly inside C°.
class DirectionSet {
public:
    static DirectionSet create(const ConvexCone& cone, const Mat& dirs);

    int size() const { return static_cast<int>(dirs_.rows()); }
    int dim() const { return static_cast<int>(dirs_.cols()); }
    Vec operator[](int i) const { return dirs_.row(i).transpose(); }
    const Mat& matrix() const { return dirs_; }

    bool operator==(const DirectionSet& other) const;

private:
    Mat dirs_;
};

/// Positive support values aligned with a DirectionSet.
class SupportVector {
public:
    SupportVector() = default;
    explicit SupportVector(std::vector<double> values);

    int size() const { return static_cast<int>(values_.size()); }
    double operator[](int i) const { return values_[static_cast<size_t>(i)]; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> values_;
};

struct RadialHit {
    double rho = 0.0;
    int index = 0;
};

/// The C-pseudo-cone [h] = C ∩ ⋂_i {x : <x, u_i> <= -h_i}.
class WulffShape {
public:
    const ConvexCone& cone() const { return cone_; }
    const DirectionSet& omega() const { return omega_; }
    const SupportVector& defining_h() const { return defining_; }
    const SupportVector& effective_h() const { return effective_; }
    bool facet_active(int i) const { return active_[static_cast<size_t>(i)]; }
    int dim() const { return cone_.dim(); }
    int facet_count() const { return omega_.size(); }

    /// ϱ and the maximizing index for a direction already known to lie in
    /// int C. Ties resolve to the lowest index.
    RadialHit radial_unchecked(const Vec& v) const;

    friend WulffShape make_wulff(const ConvexCone&, const DirectionSet&, const SupportVector&);

private:
    ConvexCone cone_;
    DirectionSet omega_;
    SupportVector defining_;
    SupportVector effective_;
    std::vector<bool> active_;
};

WulffShape make_wulff(const ConvexCone& cone, const DirectionSet& omega, const SupportVector& h);

/// h̄_i = -sup{<x, u_i> : x in [h]}, one LP per direction.
SupportVector effective_support(const ConvexCone& cone, const DirectionSet& omega,
                                const SupportVector& h);
inline const SupportVector& effective_support(const WulffShape& k) { return k.effective_h(); }

/// Radial function ϱ_K(v) = max_i h_i / |<v, u_i>| and the facet attaining it.
/// Throws DirectionOutsideCone unless v lies in int C.
RadialHit radial(const WulffShape& k, const Vec& v);

bool contains(const WulffShape& k, const Vec& x);

/// (1 - t) h̄_K + t h̄_L on the shared direction set.
SupportVector combine_support(const WulffShape& k, const WulffShape& l, double t);

/// λK, built from the scaled defining support values.
WulffShape scaled(const WulffShape& k, double lambda);

/// Same cone and directions, new support values.
WulffShape with_support(const WulffShape& k, const SupportVector& h);

void require_same_frame(const WulffShape& k, const WulffShape& l);

}  // namespace gpc
