#include "gpc/geometry.hpp"

#include "gpc/error.hpp"
#include "gpc/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gpc {
namespace {

constexpr double kRankTol = 1e-9;
constexpr double kTightTol = 1e-7;

int rank_of(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) return 0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    lu.setThreshold(kRankTol);
    return static_cast<int>(lu.rank());
}

void require_unit_rows(const Mat& rows, const char* what) {
    for (Eigen::Index k = 0; k < rows.rows(); ++k) {
        const double norm = rows.row(k).norm();
        if (!std::isfinite(norm) || std::abs(norm - 1.0) > kUnitTol) {
            std::ostringstream os;
            os << what << " " << k << " has norm " << norm << "; expected a unit vector";
            fail(ErrorCode::NotUnitVector, os.str());
        }
    }
}

// Pointed iff some y makes every generator strictly positive:
// max s  s.t.  s - <g_k, y> <= 0,  -1 <= y_j <= 1,  s <= 1.
bool generators_pointed(const Mat& gens) {
    const int n = static_cast<int>(gens.cols());
    const int k = static_cast<int>(gens.rows());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k + 2 * n + 1, n + 1);
    Vec b = Vec::Zero(k + 2 * n + 1);
    for (int r = 0; r < k; ++r) {
        a.block(r, 0, 1, n) = -gens.row(r);
        a(r, n) = 1.0;
    }
    for (int j = 0; j < n; ++j) {
        a(k + 2 * j, j) = 1.0;
        b[k + 2 * j] = 1.0;
        a(k + 2 * j + 1, j) = -1.0;
        b[k + 2 * j + 1] = 1.0;
    }
    a(k + 2 * n, n) = 1.0;
    b[k + 2 * n] = 1.0;
    Vec c = Vec::Zero(n + 1);
    c[n] = 1.0;
    const auto res = lp::maximize(a, b, c);
    return res.status == lp::Status::Optimal && res.value > kRankTol;
}

// Visits every subset of {0..count-1} of the given size.
template <class Fn>
void for_each_subset(int count, int size, Fn&& fn) {
    std::vector<int> idx(static_cast<size_t>(size));
    for (int i = 0; i < size; ++i) idx[static_cast<size_t>(i)] = i;
    if (size > count) return;
    while (true) {
        fn(idx);
        int pos = size - 1;
        while (pos >= 0 && idx[static_cast<size_t>(pos)] == count - size + pos) --pos;
        if (pos < 0) return;
        ++idx[static_cast<size_t>(pos)];
        for (int j = pos + 1; j < size; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
}

void check_dual_consistency(const Mat& gens, const Mat& normals) {
    const int n = static_cast<int>(gens.cols());
    const Eigen::MatrixXd gram = gens * normals.transpose();  // <g_k, w_j>
    if (gram.maxCoeff() > kGeomEps) {
        fail(ErrorCode::InconsistentDualData, "a generator violates a facet inequality <g, w> <= 0");
    }

    // Each normal must support a genuine facet of cone(generators).
    for (Eigen::Index j = 0; j < normals.rows(); ++j) {
        std::vector<Eigen::Index> tight;
        for (Eigen::Index k = 0; k < gens.rows(); ++k) {
            if (std::abs(gram(k, j)) <= kTightTol) tight.push_back(k);
        }
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(tight.size()), n);
        for (size_t r = 0; r < tight.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = gens.row(tight[r]);
        if (rank_of(sub) != n - 1) {
            std::ostringstream os;
            os << "normal " << j << " does not define a facet of the cone spanned by the generators";
            fail(ErrorCode::InconsistentDualData, os.str());
        }
    }

    // Every extreme ray of the halfspace description must be a generator.
    const int p = static_cast<int>(normals.rows());
    for_each_subset(p, n - 1, [&](const std::vector<int>& idx) {
        Eigen::MatrixXd sub(n - 1, n);
        for (int r = 0; r < n - 1; ++r) sub.row(r) = normals.row(idx[static_cast<size_t>(r)]);
        if (rank_of(sub) != n - 1) return;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
        lu.setThreshold(kRankTol);
        Vec ray = lu.kernel().col(0).normalized();
        for (double sign : {1.0, -1.0}) {
            const Vec r = sign * ray;
            if ((normals * r).maxCoeff() > kTightTol) continue;
            const double best = (gens * r).maxCoeff();
            if (best < 1.0 - kTightTol) {
                fail(ErrorCode::InconsistentDualData,
                     "the facet normals admit an extreme ray that is not among the generators");
            }
        }
    });
}

}  // namespace

bool ConvexCone::contains(const Vec& x) const {
    return (normals_ * x).maxCoeff() <= kGeomEps;
}

bool ConvexCone::dual_contains(const Vec& u) const {
    return (generators_ * u).maxCoeff() <= kGeomEps;
}

bool ConvexCone::interior_contains(const Vec& v, double margin) const {
    return (normals_ * v).maxCoeff() < -margin;
}

std::pair<double, double> ConvexCone::angle_range_2d() const {
    if (dim() != 2) fail(ErrorCode::DimensionMismatch, "angle_range_2d requires a planar cone");
    const double base = std::atan2(ref_dir_[1], ref_dir_[0]);
    double lo = 0.0;
    double hi = 0.0;
    for (Eigen::Index k = 0; k < generators_.rows(); ++k) {
        const double cross = ref_dir_[0] * generators_(k, 1) - ref_dir_[1] * generators_(k, 0);
        const double dot = ref_dir_[0] * generators_(k, 0) + ref_dir_[1] * generators_(k, 1);
        const double rel = std::atan2(cross, dot);
        lo = std::min(lo, rel);
        hi = std::max(hi, rel);
    }
    return {base + lo, base + hi};
}

ConvexCone build_cone(const Mat& generators, const Mat& normals, const std::optional<Vec>& ref_dir) {
    const int n = static_cast<int>(generators.cols());
    if (n < 2) fail(ErrorCode::InvalidInput, "cone dimension must be at least 2");
    if (n > kMaxDim) fail(ErrorCode::InvalidInput, "cone dimension exceeds the supported maximum");
    if (normals.cols() != n) fail(ErrorCode::DimensionMismatch, "normals and generators differ in dimension");
    if (generators.rows() < n) {
        fail(ErrorCode::NotFullDimensional, "a full-dimensional cone needs at least n generators");
    }
    if (normals.rows() < n) {
        fail(ErrorCode::InconsistentDualData, "a pointed cone needs at least n facet normals");
    }
    require_unit_rows(generators, "generator");
    require_unit_rows(normals, "normal");

    if (rank_of(generators) < n) fail(ErrorCode::NotFullDimensional, "generators do not span the space");
    if (!generators_pointed(generators)) fail(ErrorCode::NotPointed, "the generators contain a line");
    check_dual_consistency(generators, normals);

    ConvexCone cone;
    cone.generators_ = generators;
    cone.normals_ = normals;
    if (ref_dir) {
        if (ref_dir->size() != n) fail(ErrorCode::DimensionMismatch, "ref_dir has the wrong dimension");
        if (std::abs(ref_dir->norm() - 1.0) > kUnitTol) {
            fail(ErrorCode::NotUnitVector, "ref_dir must be a unit vector");
        }
        cone.ref_dir_ = *ref_dir;
    } else {
        cone.ref_dir_ = generators.colwise().sum().transpose().normalized();
    }
    const Vec& v = cone.ref_dir_;
    if ((normals * v).maxCoeff() >= -kDirectionMargin) {
        fail(ErrorCode::BadReferenceDirection, "reference direction is not interior to C");
    }
    if ((generators * v).minCoeff() <= kDirectionMargin) {
        fail(ErrorCode::BadReferenceDirection, "reference direction is not interior to -C°");
    }
    return cone;
}

ConvexCone cone_from_rays_2d(const Mat& rays) {
    if (rays.cols() != 2) fail(ErrorCode::DimensionMismatch, "cone_from_rays_2d expects planar rays");
    if (rays.rows() < 2) fail(ErrorCode::NotFullDimensional, "need at least two rays");
    Mat unit = rays;
    for (Eigen::Index k = 0; k < unit.rows(); ++k) {
        const double norm = unit.row(k).norm();
        if (!(norm > 0.0)) fail(ErrorCode::InvalidInput, "zero ray");
        unit.row(k) /= norm;
    }
    const Vec mean = unit.colwise().sum().transpose();
    if (mean.norm() < kRankTol) fail(ErrorCode::NotPointed, "rays contain a line");
    const double base = std::atan2(mean[1], mean[0]);
    double lo = 0.0;
    double hi = 0.0;
    for (Eigen::Index k = 0; k < unit.rows(); ++k) {
        double rel = std::atan2(unit(k, 1), unit(k, 0)) - base;
        rel = std::remainder(rel, 2.0 * std::numbers::pi);
        lo = std::min(lo, rel);
        hi = std::max(hi, rel);
    }
    if (hi - lo >= std::numbers::pi - kRankTol) fail(ErrorCode::NotPointed, "rays span a half-plane or more");
    if (hi - lo <= kRankTol) fail(ErrorCode::NotFullDimensional, "rays are collinear");
    const double a = base + lo;
    const double b = base + hi;
    Mat gens(2, 2);
    gens << std::cos(a), std::sin(a), std::cos(b), std::sin(b);
    Mat normals(2, 2);
    normals << std::sin(a), -std::cos(a), -std::sin(b), std::cos(b);
    return build_cone(gens, normals);
}

bool cone_contains(const ConvexCone& cone, const Vec& x) {
    if (x.size() != cone.dim()) fail(ErrorCode::DimensionMismatch, "point dimension does not match cone");
    return cone.contains(x);
}

bool dual_contains(const ConvexCone& cone, const Vec& u) {
    if (u.size() != cone.dim()) fail(ErrorCode::DimensionMismatch, "vector dimension does not match cone");
    return cone.dual_contains(u);
}

DirectionSet DirectionSet::create(const ConvexCone& cone, const Mat& dirs) {
    if (dirs.rows() < 1) fail(ErrorCode::InvalidInput, "direction set must be nonempty");
    if (dirs.cols() != cone.dim()) fail(ErrorCode::DimensionMismatch, "direction dimension does not match cone");
    require_unit_rows(dirs, "direction");
    for (Eigen::Index i = 0; i < dirs.rows(); ++i) {
        const double worst = (cone.generators() * dirs.row(i).transpose()).maxCoeff();
        if (worst >= -kDirectionMargin) {
            std::ostringstream os;
            os << "direction " << i << " is not strictly interior to the dual cone (max <u, g> = " << worst << ")";
            fail(ErrorCode::DirectionNotInterior, os.str());
        }
        for (Eigen::Index j = 0; j < i; ++j) {
            if ((dirs.row(i) - dirs.row(j)).norm() <= kRankTol) {
                fail(ErrorCode::InvalidInput, "directions must be distinct");
            }
        }
    }
    DirectionSet set;
    set.dirs_ = dirs;
    return set;
}

bool DirectionSet::operator==(const DirectionSet& other) const {
    return dirs_.rows() == other.dirs_.rows() && dirs_.cols() == other.dirs_.cols() && dirs_ == other.dirs_;
}

SupportVector::SupportVector(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
        if (!std::isfinite(v) || v <= 0.0) {
            fail(ErrorCode::NonPositiveSupport, "support values must be positive and finite");
        }
    }
}

RadialHit WulffShape::radial_unchecked(const Vec& v) const {
    RadialHit hit{-1.0, 0};
    const Mat& u = omega_.matrix();
    for (int i = 0; i < omega_.size(); ++i) {
        const double proj = -u.row(i).dot(v);
        const double rho = defining_[i] / proj;
        if (rho > hit.rho) {
            hit.rho = rho;
            hit.index = i;
        }
    }
    return hit;
}

SupportVector effective_support(const ConvexCone& cone, const DirectionSet& omega, const SupportVector& h) {
    const int n = cone.dim();
    const int p = static_cast<int>(cone.normals().rows());
    const int m = omega.size();
    if (h.size() != m) fail(ErrorCode::DimensionMismatch, "support vector length differs from direction count");

    Eigen::MatrixXd a(p + m, n);
    Vec b(p + m);
    a.topRows(p) = cone.normals();
    b.head(p).setZero();
    a.bottomRows(m) = omega.matrix();
    for (int i = 0; i < m; ++i) b[p + i] = -h[i];

    std::vector<double> out(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        const auto res = lp::maximize(a, b, omega[i]);
        if (res.status == lp::Status::Unbounded) {
            fail(ErrorCode::LPUnbounded, "support LP unbounded: direction not interior to the dual cone");
        }
        if (res.status == lp::Status::Infeasible) {
            fail(ErrorCode::LPInfeasible, "support LP infeasible: empty Wulff shape");
        }
        double value = -res.value;
        if (value <= h[i] * (1.0 + kSupportRelTol)) value = h[i];
        out[static_cast<size_t>(i)] = value;
    }
    return SupportVector(std::move(out));
}

WulffShape make_wulff(const ConvexCone& cone, const DirectionSet& omega, const SupportVector& h) {
    if (omega.dim() != cone.dim()) fail(ErrorCode::DimensionMismatch, "direction set dimension differs from cone");
    WulffShape k;
    k.cone_ = cone;
    k.omega_ = omega;
    k.defining_ = h;
    k.effective_ = effective_support(cone, omega, h);
    k.active_.resize(static_cast<size_t>(omega.size()));
    for (int i = 0; i < omega.size(); ++i) {
        k.active_[static_cast<size_t>(i)] = k.effective_[i] == h[i];
    }
    return k;
}

RadialHit radial(const WulffShape& k, const Vec& v) {
    if (v.size() != k.dim()) fail(ErrorCode::DimensionMismatch, "direction dimension does not match shape");
    if (!k.cone().interior_contains(v)) fail(ErrorCode::DirectionOutsideCone, "direction is not interior to C");
    return k.radial_unchecked(v);
}

bool contains(const WulffShape& k, const Vec& x) {
    if (x.size() != k.dim()) fail(ErrorCode::DimensionMismatch, "point dimension does not match shape");
    if (!k.cone().contains(x)) return false;
    const Mat& u = k.omega().matrix();
    for (int i = 0; i < k.facet_count(); ++i) {
        if (u.row(i).dot(x) > -k.defining_h()[i] + kGeomEps) return false;
    }
    return true;
}

void require_same_frame(const WulffShape& k, const WulffShape& l) {
    const bool same_cone = k.cone().generators().rows() == l.cone().generators().rows() &&
                           k.cone().normals().rows() == l.cone().normals().rows() &&
                           k.dim() == l.dim() && k.cone().generators() == l.cone().generators() &&
                           k.cone().normals() == l.cone().normals();
    if (!same_cone || !(k.omega() == l.omega())) {
        fail(ErrorCode::MismatchedOmega, "shapes do not share the same cone and direction set");
    }
}

SupportVector combine_support(const WulffShape& k, const WulffShape& l, double t) {
    require_same_frame(k, l);
    if (!(t >= 0.0 && t <= 1.0)) fail(ErrorCode::InvalidInput, "combination parameter must lie in [0, 1]");
    std::vector<double> out(static_cast<size_t>(k.facet_count()));
    for (int i = 0; i < k.facet_count(); ++i) {
        out[static_cast<size_t>(i)] = (1.0 - t) * k.effective_h()[i] + t * l.effective_h()[i];
    }
    return SupportVector(std::move(out));
}

WulffShape scaled(const WulffShape& k, double lambda) {
    if (!(lambda > 0.0)) fail(ErrorCode::InvalidInput, "scale factor must be positive");
    std::vector<double> h = k.defining_h().values();
    for (double& x : h) x *= lambda;
    return make_wulff(k.cone(), k.omega(), SupportVector(std::move(h)));
}

WulffShape with_support(const WulffShape& k, const SupportVector& h) {
    return make_wulff(k.cone(), k.omega(), h);
}

}  // namespace gpc
