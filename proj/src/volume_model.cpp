#include "gpc/volume_model.hpp"

#include "gpc/error.hpp"
#include "gpc/specfun.hpp"
#include "shape_view.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gpc {
namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Standard error of the mean of per-unit values, where only `values.size()`
// of the `units` units are nonzero.
double mean_err(const std::vector<double>& values, std::int64_t units) {
    if (units < 2) return 0.0;
    double s = 0.0;
    double s2 = 0.0;
    for (double d : values) {
        s += d;
        s2 += d * d;
    }
    const double u = static_cast<double>(units);
    return std::sqrt(std::max(0.0, (s2 - s * s / u) / (u * (u - 1.0))));
}

}  // namespace

QuadratureModel2D::QuadratureModel2D(const ConvexCone& cone, const DirectionSet& omega)
    : dirs_(omega.matrix()) {
    if (cone.dim() != 2) fail(ErrorCode::DimensionMismatch, "quadrature model is planar only");
    std::tie(lo_, hi_) = cone.angle_range_2d();
}

QuadratureModel2D::Pieces QuadratureModel2D::integrate(const std::vector<double>& h) const {
    const int m = static_cast<int>(dirs_.rows());
    if (static_cast<int>(h.size()) != m) fail(ErrorCode::DimensionMismatch, "support vector length mismatch");

    // Angles where two facets tie for the radial maximum:
    // <v, h_j u_i - h_i u_j> = 0.
    std::vector<double> cuts{lo_, hi_};
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const Eigen::RowVector2d d = h[static_cast<size_t>(j)] * dirs_.row(i) - h[static_cast<size_t>(i)] * dirs_.row(j);
            if (d.norm() < 1e-15) continue;
            const double base = std::atan2(d[1], d[0]) + 0.5 * std::numbers::pi;
            for (double cand : {base, base + std::numbers::pi}) {
                const double a = lo_ + std::fmod(std::fmod(cand - lo_, kTwoPi) + kTwoPi, kTwoPi);
                if (a > lo_ && a < hi_) cuts.push_back(a);
            }
        }
    }
    std::sort(cuts.begin(), cuts.end());

    Pieces out;
    out.surface = Vec::Zero(m);
    out.sector = Vec::Zero(m);
    auto radial_at = [&](double theta, int i) {
        const double proj = -(std::cos(theta) * dirs_(i, 0) + std::sin(theta) * dirs_(i, 1));
        return h[static_cast<size_t>(i)] / proj;
    };
    for (size_t q = 0; q + 1 < cuts.size(); ++q) {
        const double a = cuts[q];
        const double b = cuts[q + 1];
        if (b - a <= 1e-15) continue;
        const double mid = 0.5 * (a + b);
        int idx = 0;
        double best = -1.0;
        for (int i = 0; i < m; ++i) {
            const double rho = radial_at(mid, i);
            if (rho > best) {
                best = rho;
                idx = i;
            }
        }
        double e1 = 0.0;
        double e2 = 0.0;
        const double cov = GK::integrate(
            [&](double t) {
                const double r = radial_at(t, idx);
                return -std::expm1(-0.5 * r * r);
            },
            a, b, 15, 1e-12, &e1);
        const double surf = GK::integrate(
            [&](double t) {
                const double r = radial_at(t, idx);
                return std::exp(-0.5 * r * r) * r * r / h[static_cast<size_t>(idx)];
            },
            a, b, 15, 1e-12, &e2);
        out.covolume += cov / kTwoPi;
        out.sector[idx] += cov / kTwoPi;
        out.surface[idx] += surf / kTwoPi;
        out.err += (e1 + e2) / kTwoPi;
    }
    return out;
}

ModelValue QuadratureModel2D::evaluate(const std::vector<double>& h, bool) const {
    const Pieces p = integrate(h);
    ModelValue v;
    v.gamma = cone_volume() - p.covolume;
    v.surface = p.surface;
    v.gamma_err = p.err;
    return v;
}

double QuadratureModel2D::combination_err(const std::vector<const ModelValue*>& values,
                                          const std::vector<double>& coef) const {
    double e = 0.0;
    for (size_t j = 0; j < values.size(); ++j) e += std::abs(coef[j]) * values[j]->gamma_err;
    return e;
}

double QuadratureModel2D::cone_volume() const { return (hi_ - lo_) / kTwoPi; }

RadialSampleModel::RadialSampleModel(const ConvexCone& cone, const DirectionSet& omega, const MCConfig& mc,
                                     std::uint64_t stream)
    : dim_(cone.dim()), antithetic_(mc.antithetic) {
    const detail::ShapeView view(cone);
    const Mat& dirs = omega.matrix();
    const Eigen::Index m = dirs.rows();
    std::vector<double> flat;
    visit_gaussian_points(mc, stream, dim_, [&](const double* y) {
        ++total_;
        if (!view.in_cone_strict(y)) return;
        const double norm = std::sqrt(detail::ShapeView::dot(y, y, dim_));
        for (Eigen::Index i = 0; i < m; ++i) {
            flat.push_back(norm / -detail::ShapeView::dot(dirs.row(i).data(), y, dim_));
        }
    });
    const auto kept = static_cast<Eigen::Index>(flat.size()) / m;
    inv_proj_ = Eigen::Map<const Mat>(flat.data(), kept, m);
    if (kept == 0) fail(ErrorCode::EmptyOmegaC, "no sampled direction fell inside the cone");
}

ModelValue RadialSampleModel::evaluate(const std::vector<double>& h, bool keep_samples) const {
    const Eigen::Index m = inv_proj_.cols();
    if (static_cast<Eigen::Index>(h.size()) != m) fail(ErrorCode::DimensionMismatch, "support vector length mismatch");
    const double t0 = radial_tail(0.0, dim_);
    ModelValue out;
    out.surface = Vec::Zero(m);
    if (keep_samples) out.per_sample.resize(static_cast<size_t>(inv_proj_.rows()));
    double gamma = 0.0;
    double comp = 0.0;  // Kahan
    for (Eigen::Index s = 0; s < inv_proj_.rows(); ++s) {
        const double* a = inv_proj_.row(s).data();
        double rho = -1.0;
        Eigen::Index idx = 0;
        for (Eigen::Index i = 0; i < m; ++i) {
            const double r = h[static_cast<size_t>(i)] * a[i];
            if (r > rho) {
                rho = r;
                idx = i;
            }
        }
        const double q = radial_tail(rho, dim_) / t0;
        const double y = q - comp;
        const double t = gamma + y;
        comp = (t - gamma) - y;
        gamma = t;
        out.surface[idx] += std::pow(rho, dim_ - 1) * std::exp(-0.5 * rho * rho) / t0 * a[idx];
        if (keep_samples) out.per_sample[static_cast<size_t>(s)] = q;
    }
    const double n = static_cast<double>(total_);
    out.gamma = gamma / n;
    out.surface /= n;
    if (keep_samples) out.gamma_err = combination_err({&out}, {1.0});
    return out;
}

double RadialSampleModel::combination_err(const std::vector<const ModelValue*>& values,
                                          const std::vector<double>& coef) const {
    // At most one member of an antithetic pair lies in a pointed cone, so each
    // accepted sample is its own unit with weight 1/2.
    const double unit_scale = antithetic_ ? 0.5 : 1.0;
    const std::int64_t units = antithetic_ ? total_ / 2 : total_;
    std::vector<double> combined(static_cast<size_t>(inv_proj_.rows()), 0.0);
    for (size_t j = 0; j < values.size(); ++j) {
        if (values[j]->per_sample.size() != combined.size()) return 0.0;
        for (size_t k = 0; k < combined.size(); ++k) combined[k] += unit_scale * coef[j] * values[j]->per_sample[k];
    }
    return mean_err(combined, units);
}

double RadialSampleModel::cone_volume() const {
    return static_cast<double>(inv_proj_.rows()) / static_cast<double>(total_);
}

std::unique_ptr<VolumeModel> make_volume_model(const ConvexCone& cone, const DirectionSet& omega,
                                               const MCConfig& mc, std::uint64_t stream) {
    if (cone.dim() == 2) return std::make_unique<QuadratureModel2D>(cone, omega);
    return std::make_unique<RadialSampleModel>(cone, omega, mc, stream);
}

}  // namespace gpc
