#pragma once

#include "gpc/geometry.hpp"
#include "gpc/montecarlo.hpp"

#include <memory>
#include <vector>

namespace gpc {

/// γⁿ([h]) and its gradient -S_i([h]) on a fixed integration rule. The same
/// rule is reused for every h, so differences between nearby h carry no
/// fresh sampling noise (common random numbers).
struct ModelValue {
    double gamma = 0.0;
    Vec surface;              // S_i; ∂γ/∂h_i = -S_i
    double gamma_err = 0.0;   // sampling or quadrature error of gamma
    std::vector<double> per_sample;  // per-unit contributions (sample models only)
};

class VolumeModel {
public:
    virtual ~VolumeModel() = default;
    virtual ModelValue evaluate(const std::vector<double>& h, bool keep_samples = false) const = 0;
    /// Standard error of Σ_j coef_j γ(h_j) over evaluations made with
    /// keep_samples = true; samples are shared, so correlations count.
    virtual double combination_err(const std::vector<const ModelValue*>& values,
                                   const std::vector<double>& coef) const = 0;
    double difference_err(const ModelValue& a, const ModelValue& b) const {
        return combination_err({&a, &b}, {1.0, -1.0});
    }
    virtual double cone_volume() const = 0;
};

/// n = 2: adaptive Gauss-Kronrod quadrature over the angle, split where the
/// facet attaining the radial maximum changes.
class QuadratureModel2D final : public VolumeModel {
public:
    QuadratureModel2D(const ConvexCone& cone, const DirectionSet& omega);
    ModelValue evaluate(const std::vector<double>& h, bool keep_samples = false) const override;
    double combination_err(const std::vector<const ModelValue*>& values,
                           const std::vector<double>& coef) const override;
    double cone_volume() const override;

    /// V_G, per-facet surface and per-facet sector volume in one pass.
    struct Pieces {
        double covolume = 0.0;
        Vec surface;
        Vec sector;
        double err = 0.0;
    };
    Pieces integrate(const std::vector<double>& h) const;

private:
    Mat dirs_;
    double lo_ = 0.0;
    double hi_ = 0.0;
};

/// n >= 3: fixed sample of Gaussian directions inside C. With ϱ_k the radial
/// function at sample k, γ = (1/N) Σ chi_sf(ϱ_k) and
/// S_i = (1/N) Σ_{argmax = i} chi_pdf(ϱ_k) / |<v_k, u_i>|.
class RadialSampleModel final : public VolumeModel {
public:
    RadialSampleModel(const ConvexCone& cone, const DirectionSet& omega, const MCConfig& mc,
                      std::uint64_t stream);
    ModelValue evaluate(const std::vector<double>& h, bool keep_samples = false) const override;
    double combination_err(const std::vector<const ModelValue*>& values,
                           const std::vector<double>& coef) const override;
    double cone_volume() const override;

    std::int64_t draws() const { return total_; }
    std::int64_t accepted() const { return static_cast<std::int64_t>(inv_proj_.rows()); }

private:
    int dim_ = 0;
    Mat inv_proj_;  // 1 / |<v_k, u_i>| for accepted samples
    std::int64_t total_ = 0;
    bool antithetic_ = true;
};

std::unique_ptr<VolumeModel> make_volume_model(const ConvexCone& cone, const DirectionSet& omega,
                                               const MCConfig& mc, std::uint64_t stream);

}  // namespace gpc
