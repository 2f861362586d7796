#include "gpc/measures.hpp"

#include "gpc/error.hpp"

#include <cmath>

namespace gpc {
namespace {

void require_aligned(const DiscreteMeasure& mu, const DirectionSet& omega) {
    if (!(mu.omega == omega)) fail(ErrorCode::MismatchedOmega, "measure and shape use different direction sets");
}

}  // namespace

DiscreteMeasure DiscreteMeasure::exact(const DirectionSet& omega, std::vector<double> weights) {
    if (static_cast<int>(weights.size()) != omega.size()) {
        fail(ErrorCode::DimensionMismatch, "weight count differs from direction count");
    }
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) fail(ErrorCode::InvalidInput, "measure weights must be finite and nonnegative");
    }
    return {omega, std::move(weights), std::nullopt};
}

double DiscreteMeasure::total() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

void DiscreteMeasure::require_nonzero() const {
    for (double w : weights) {
        if (w > 0.0) return;
    }
    fail(ErrorCode::DegenerateMeasure, "measure has no positive weight");
}

DiscreteMeasure surface_measure(const WulffShape& k, const MCConfig& mc) {
    DiscreteMeasure out{k.omega(), {}, std::vector<double>{}};
    for (int i = 0; i < k.facet_count(); ++i) {
        const MCEstimate s = facet_surface(k, i, mc);
        out.weights.push_back(s.value);
        out.std_errs->push_back(s.std_err);
    }
    return out;
}

DiscreteMeasure cone_measure(const WulffShape& k, const MCConfig& mc) {
    DiscreteMeasure out = surface_measure(k, mc);
    for (int i = 0; i < k.facet_count(); ++i) {
        out.weights[static_cast<size_t>(i)] *= k.effective_h()[i];
        (*out.std_errs)[static_cast<size_t>(i)] *= k.effective_h()[i];
    }
    return out;
}

MCEstimate mixed_volume(const WulffShape& k, const WulffShape& l, const MCConfig& mc) {
    require_same_frame(k, l);
    const DiscreteMeasure s = surface_measure(k, mc);
    MCEstimate out{0.0, 0.0, 0, mc.seed};
    double var = 0.0;
    for (int i = 0; i < k.facet_count(); ++i) {
        const double hl = l.effective_h()[i];
        out.value += hl * s.weights[static_cast<size_t>(i)];
        var += hl * hl * s.std_err(i) * s.std_err(i);
    }
    out.std_err = std::sqrt(var);
    out.n_samples = mc.n_samples * k.facet_count();
    return out;
}

MCEstimate functional_I(const DiscreteMeasure& mu, const SupportVector& h, const ConvexCone& cone, const MCConfig& mc) {
    mu.require_nonzero();
    const WulffShape k = make_wulff(cone, mu.omega, h);
    const MCEstimate g = gauss_volume(k, mc);
    double pairing = 0.0;
    for (int i = 0; i < mu.size(); ++i) pairing += mu.weights[static_cast<size_t>(i)] * h[i];
    return {g.value * pairing, g.std_err * pairing, g.n_samples, g.seed};
}

MCEstimate functional_L(const DiscreteMeasure& mu, const SupportVector& h, const ConvexCone& cone, const MCConfig& mc) {
    mu.require_nonzero();
    const WulffShape k = make_wulff(cone, mu.omega, h);
    const MCEstimate g = gauss_volume(k, mc);
    double log_pairing = 0.0;
    for (int i = 0; i < mu.size(); ++i) log_pairing += mu.weights[static_cast<size_t>(i)] * std::log(h[i]);
    const double factor = std::exp(log_pairing);
    return {g.value * factor, g.std_err * factor, g.n_samples, g.seed};
}

MCEstimate normalization_c(const WulffShape& k, const DiscreteMeasure& mu, const MCConfig& mc) {
    require_aligned(mu, k.omega());
    const MCEstimate g = gauss_volume(k, mc);
    if (!(g.value > 5.0 * g.std_err) || g.value <= 0.0) {
        fail(ErrorCode::ZeroVolume, "Gaussian volume is indistinguishable from zero");
    }
    double pairing = 0.0;
    for (int i = 0; i < mu.size(); ++i) pairing += mu.weights[static_cast<size_t>(i)] * k.effective_h()[i];
    const double c = pairing / g.value;
    return {c, c * g.std_err / g.value, g.n_samples, g.seed};
}

}  // namespace gpc
