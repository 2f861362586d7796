#include "gpc/analysis.hpp"

#include "gpc/digest.hpp"
#include "gpc/error.hpp"
#include "gpc/specfun.hpp"
#include "gpc/volume_model.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gpc {
namespace {

CheckReport finish(std::string name, CheckKind kind, MCEstimate lhs, MCEstimate rhs, double sigma,
                   std::string digest) {
    CheckReport r;
    r.name = std::move(name);
    r.kind = kind;
    r.lhs = lhs;
    r.rhs = rhs;
    r.digest = std::move(digest);
    // Identical inputs can leave rounding-level differences with zero
    // sampling error; keep the margin finite there.
    r.sigma = std::max(sigma, 1e-14 * (1.0 + std::abs(lhs.value) + std::abs(rhs.value)));
    const double diff = lhs.value - rhs.value;
    r.margin = diff / r.sigma;
    switch (kind) {
        case CheckKind::Inequality: r.passed = r.margin >= -3.0; break;
        case CheckKind::StrictInequality: r.passed = r.margin > 3.0; break;
        case CheckKind::Equality: r.passed = std::abs(r.margin) <= 3.0; break;
        case CheckKind::Derivative:
            r.passed = std::abs(diff) <= std::max(0.01 * std::abs(rhs.value), 3.0 * r.sigma);
            break;
        case CheckKind::Tolerance: r.passed = true; break;
    }
    return r;
}

MCEstimate estimate(double value, double err, const MCConfig& mc) {
    return {value, err, mc.n_samples, mc.seed};
}

Digest frame_digest(const WulffShape& k) {
    Digest d;
    d.add(k.cone().generators()).add(k.cone().normals()).add(Mat(k.cone().ref_dir().transpose()));
    d.add(k.omega().matrix()).add(k.defining_h().values());
    return d;
}

std::string finish_digest(Digest d, const MCConfig& mc) {
    d.add(mc.seed).add(mc.n_samples).add(mc.batch_size).add(static_cast<int>(mc.antithetic));
    return d.hex();
}

// Weights w with Σ w_j D(δ_j) equal to the Richardson limit in δ², for
// steps sorted from largest to smallest. `previous` receives the weights of
// the next-lower order, whose gap to the final value estimates truncation.
std::vector<double> richardson_weights(const std::vector<double>& steps, std::vector<double>& previous) {
    const int j_count = static_cast<int>(steps.size());
    std::vector<std::vector<Vec>> table(static_cast<size_t>(j_count));
    for (int j = 0; j < j_count; ++j) {
        table[static_cast<size_t>(j)].push_back(Vec::Unit(j_count, j));
        for (int l = 1; l <= j; ++l) {
            const double ratio = steps[static_cast<size_t>(j - l)] / steps[static_cast<size_t>(j)];
            const Vec& a = table[static_cast<size_t>(j)][static_cast<size_t>(l - 1)];
            const Vec& b = table[static_cast<size_t>(j - 1)][static_cast<size_t>(l - 1)];
            table[static_cast<size_t>(j)].push_back(a + (a - b) / (ratio * ratio - 1.0));
        }
    }
    const auto& last = table.back();
    previous = to_std(last[last.size() - 2]);
    return to_std(last.back());
}

CheckReport derivative_check(const std::string& name, const WulffShape& k, const std::vector<double>& f,
                             std::vector<double> steps, const MCConfig& mc, bool log_family) {
    const int m = k.facet_count();
    if (static_cast<int>(f.size()) != m) fail(ErrorCode::DimensionMismatch, "perturbation length differs from direction count");
    if (steps.size() < 3) fail(ErrorCode::InvalidInput, "at least three step sizes are needed");
    for (double v : f) {
        if (!std::isfinite(v)) fail(ErrorCode::InvalidInput, "perturbation values must be finite");
    }
    std::sort(steps.begin(), steps.end(), std::greater<>());
    if (!(steps.back() > 0.0) || std::adjacent_find(steps.begin(), steps.end()) != steps.end()) {
        fail(ErrorCode::InvalidInput, "step sizes must be positive and distinct");
    }

    const std::vector<double>& hbar = k.effective_h().values();
    auto family = [&](double t) {
        std::vector<double> h(static_cast<size_t>(m));
        for (int i = 0; i < m; ++i) {
            const size_t s = static_cast<size_t>(i);
            h[s] = log_family ? hbar[s] * std::exp(t * f[s]) : hbar[s] + t * f[s];
            if (!(h[s] > 0.0) || !std::isfinite(h[s])) {
                fail(ErrorCode::StepTooLarge, "perturbed support loses positivity at step " + std::to_string(std::abs(t)));
            }
        }
        return h;
    };

    const auto model = make_volume_model(k.cone(), k.omega(), mc, stream_id("variational"));
    std::vector<ModelValue> values;
    values.reserve(2 * steps.size());
    std::vector<double> diffs;
    for (double d : steps) {
        values.push_back(model->evaluate(family(d), true));
        values.push_back(model->evaluate(family(-d), true));
        diffs.push_back((values[values.size() - 2].gamma - values.back().gamma) / (2.0 * d));
    }

    std::vector<double> lower;
    const std::vector<double> w = richardson_weights(steps, lower);
    double value = 0.0;
    double value_lower = 0.0;
    std::vector<const ModelValue*> refs;
    std::vector<double> coef;
    for (size_t j = 0; j < steps.size(); ++j) {
        value += w[j] * diffs[j];
        value_lower += lower[j] * diffs[j];
        refs.push_back(&values[2 * j]);
        refs.push_back(&values[2 * j + 1]);
        coef.push_back(w[j] / (2.0 * steps[j]));
        coef.push_back(-w[j] / (2.0 * steps[j]));
    }
    const double lhs_err = std::hypot(model->combination_err(refs, coef), value - value_lower);

    const DiscreteMeasure s = surface_measure(k, mc);
    double pairing = 0.0;
    double var = 0.0;
    for (int i = 0; i < m; ++i) {
        const double weight = log_family ? f[static_cast<size_t>(i)] * hbar[static_cast<size_t>(i)] : f[static_cast<size_t>(i)];
        pairing += weight * s.weights[static_cast<size_t>(i)];
        var += weight * weight * s.std_err(i) * s.std_err(i);
    }
    const MCEstimate lhs = estimate(value, lhs_err, mc);
    const MCEstimate rhs = estimate(-pairing, std::sqrt(var), mc);

    Digest d = frame_digest(k);
    d.add(name).add(f).add(steps);
    return finish(name, CheckKind::Derivative, lhs, rhs, std::hypot(lhs.std_err, rhs.std_err), finish_digest(d, mc));
}

struct PairVolumes {
    ModelValue k;
    ModelValue l;
    double err_k = 0.0;
    double err_log_ratio = 0.0;  // σ of log γ(L) - log γ(K)
};

}  // namespace

std::string shape_digest(const WulffShape& k) { return frame_digest(k).hex(); }

std::vector<double> default_steps(const WulffShape& k, const std::vector<double>& f, bool multiplicative) {
    double fmax = 0.0;
    for (double v : f) fmax = std::max(fmax, std::abs(v));
    if (fmax == 0.0) fmax = 1.0;
    const auto& h = k.effective_h().values();
    const double scale = multiplicative ? 1.0 : *std::min_element(h.begin(), h.end());
    const double d0 = 0.05 * scale / fmax;
    return {d0, 0.5 * d0, 0.25 * d0};
}

CheckReport check_variational_volume(const WulffShape& k, const std::vector<double>& f,
                                     const std::vector<double>& steps, const MCConfig& mc) {
    return derivative_check("variational_volume", k, f, steps, mc, false);
}

CheckReport check_variational_log(const WulffShape& k, const std::vector<double>& f,
                                  const std::vector<double>& steps, const MCConfig& mc) {
    return derivative_check("variational_log", k, f, steps, mc, true);
}

namespace {

PairVolumes pair_volumes(const WulffShape& k, const WulffShape& l, const MCConfig& mc) {
    require_same_frame(k, l);
    const auto model = make_volume_model(k.cone(), k.omega(), mc, stream_id("pair_volumes"));
    PairVolumes out;
    out.k = model->evaluate(k.effective_h().values(), true);
    out.l = model->evaluate(l.effective_h().values(), true);
    if (!(out.k.gamma > 0.0) || !(out.l.gamma > 0.0)) fail(ErrorCode::ZeroVolume, "shape has zero Gaussian volume");
    out.err_k = model->combination_err({&out.k}, {1.0});
    out.err_log_ratio = model->combination_err({&out.k, &out.l}, {-1.0 / out.k.gamma, 1.0 / out.l.gamma});
    return out;
}

// Σ (h̄_K - h̄_L) S_K and its standard error.
std::pair<double, double> support_gap_pairing(const WulffShape& k, const WulffShape& l, const MCConfig& mc) {
    const DiscreteMeasure s = surface_measure(k, mc);
    double value = 0.0;
    double var = 0.0;
    for (int i = 0; i < k.facet_count(); ++i) {
        const double gap = k.effective_h()[i] - l.effective_h()[i];
        value += gap * s.weights[static_cast<size_t>(i)];
        var += gap * gap * s.std_err(i) * s.std_err(i);
    }
    return {value, std::sqrt(var)};
}

Digest pair_digest(const std::string& name, const WulffShape& k, const WulffShape& l) {
    Digest d = frame_digest(k);
    d.add(name).add(l.defining_h().values());
    return d;
}

}  // namespace

CheckReport check_minkowski_inequality(const WulffShape& k, const WulffShape& l, const MCConfig& mc) {
    const PairVolumes v = pair_volumes(k, l, mc);
    const auto [pairing, pairing_err] = support_gap_pairing(k, l, mc);
    const double lhs_value = pairing / v.k.gamma;
    const double lhs_err = std::hypot(pairing_err / v.k.gamma, lhs_value * v.err_k / v.k.gamma);
    const MCEstimate lhs = estimate(lhs_value, lhs_err, mc);
    const MCEstimate rhs = estimate(std::log(v.l.gamma) - std::log(v.k.gamma), v.err_log_ratio, mc);
    return finish("minkowski_inequality", CheckKind::Inequality, lhs, rhs, std::hypot(lhs.std_err, rhs.std_err),
                  finish_digest(pair_digest("minkowski_inequality", k, l), mc));
}

CheckReport check_mixed_minkowski(const WulffShape& k, const WulffShape& l, const MCConfig& mc) {
    const PairVolumes v = pair_volumes(k, l, mc);
    const auto [pairing, pairing_err] = support_gap_pairing(k, l, mc);
    const double log_ratio = std::log(v.l.gamma) - std::log(v.k.gamma);
    const double rhs_value = v.k.gamma * log_ratio;
    const double rhs_err = std::hypot(v.k.gamma * v.err_log_ratio, log_ratio * v.err_k);
    const MCEstimate lhs = estimate(pairing, pairing_err, mc);
    const MCEstimate rhs = estimate(rhs_value, rhs_err, mc);
    return finish("mixed_minkowski", CheckKind::Inequality, lhs, rhs, std::hypot(lhs.std_err, rhs.std_err),
                  finish_digest(pair_digest("mixed_minkowski", k, l), mc));
}

EhrhardReport check_ehrhard_wulff(const WulffShape& k, const WulffShape& l, double t, const MCConfig& mc) {
    if (!(t > 0.0 && t < 1.0)) fail(ErrorCode::InvalidInput, "interpolation parameter must lie in (0, 1)");
    require_same_frame(k, l);
    const WulffShape mid = with_support(k, combine_support(k, l, t));
    const auto model = make_volume_model(k.cone(), k.omega(), mc, stream_id("ehrhard"));
    const ModelValue vk = model->evaluate(k.effective_h().values(), true);
    const ModelValue vl = model->evaluate(l.effective_h().values(), true);
    const ModelValue vm = model->evaluate(mid.effective_h().values(), true);
    for (const ModelValue* v : {&vk, &vl, &vm}) {
        if (!(v->gamma > 0.0 && v->gamma < 1.0)) fail(ErrorCode::ZeroVolume, "Gaussian volume outside (0, 1)");
    }

    Digest d = pair_digest("ehrhard", k, l);
    d.add(t);
    const std::string digest = finish_digest(d, mc);

    EhrhardReport out;
    {
        const double zk = phi_inv(vk.gamma);
        const double zl = phi_inv(vl.gamma);
        const double zm = phi_inv(vm.gamma);
        // Delta method: dΦ⁻¹(p)/dp = 1/φ(Φ⁻¹(p)).
        const double ck = (1.0 - t) / phi_pdf(zk);
        const double cl = t / phi_pdf(zl);
        const double cm = 1.0 / phi_pdf(zm);
        const MCEstimate lhs = estimate(zm, cm * model->combination_err({&vm}, {1.0}), mc);
        const MCEstimate rhs = estimate((1.0 - t) * zk + t * zl, model->combination_err({&vk, &vl}, {ck, cl}), mc);
        const double sigma = model->combination_err({&vm, &vk, &vl}, {cm, -ck, -cl});
        out.ehrhard = finish("ehrhard_wulff", CheckKind::Inequality, lhs, rhs, sigma, digest);
    }
    {
        const double ck = (1.0 - t) / vk.gamma;
        const double cl = t / vl.gamma;
        const double cm = 1.0 / vm.gamma;
        const MCEstimate lhs = estimate(std::log(vm.gamma), cm * model->combination_err({&vm}, {1.0}), mc);
        const MCEstimate rhs = estimate((1.0 - t) * std::log(vk.gamma) + t * std::log(vl.gamma),
                                        model->combination_err({&vk, &vl}, {ck, cl}), mc);
        const double sigma = model->combination_err({&vm, &vk, &vl}, {cm, -ck, -cl});
        out.log_concavity = finish("log_concavity", CheckKind::Inequality, lhs, rhs, sigma, digest);
    }
    return out;
}

CheckReport check_cone_volume_bound(const WulffShape& k, const MCConfig& mc) {
    const int n = k.dim();
    const DiscreteMeasure s = surface_measure(k, mc);
    double sectors = 0.0;
    double sectors_var = 0.0;
    double cone = 0.0;
    double cone_var = 0.0;
    for (int i = 0; i < k.facet_count(); ++i) {
        if (!k.facet_active(i)) continue;
        const MCEstimate sec = sector_cone_volume(k, i, mc);
        sectors += sec.value;
        sectors_var += sec.std_err * sec.std_err;
        const double h = k.effective_h()[i] / n;
        cone += h * s.weights[static_cast<size_t>(i)];
        cone_var += h * h * s.std_err(i) * s.std_err(i);
    }
    const MCEstimate lhs = estimate(sectors, std::sqrt(sectors_var), mc);
    const MCEstimate rhs = estimate(cone, std::sqrt(cone_var), mc);
    Digest d = frame_digest(k);
    d.add(std::string_view("cone_volume_bound"));
    return finish("cone_volume_bound", CheckKind::StrictInequality, lhs, rhs, std::hypot(lhs.std_err, rhs.std_err),
                  finish_digest(d, mc));
}

CheckReport check_mixed_volume_bound(const WulffShape& k, const MCConfig& mc) {
    const MCEstimate vg = covolume(k, mc);
    const MCEstimate mixed = mixed_volume(k, k, mc);
    const double n = k.dim();
    const MCEstimate rhs = estimate(mixed.value / n, mixed.std_err / n, mc);
    Digest d = frame_digest(k);
    d.add(std::string_view("mixed_volume_bound"));
    return finish("mixed_volume_bound", CheckKind::StrictInequality, vg, rhs, std::hypot(vg.std_err, rhs.std_err),
                  finish_digest(d, mc));
}

MCEstimate scalar_profile(const ConvexCone& cone, const Vec& b, MeasureKind kind, double t, const MCConfig& mc) {
    MCEstimate s = single_facet_surface(cone, b, t, mc);
    if (kind == MeasureKind::Cone) {
        s.value *= t;
        s.std_err *= t;
    }
    return s;
}

NonUniquenessPair find_nonuniqueness(const ConvexCone& cone, const Vec& b, MeasureKind kind, const MCConfig& mc,
                                     double rho) {
    if (!(rho > 0.0 && rho < 1.0)) fail(ErrorCode::InvalidInput, "level offset must lie in (0, 1)");
    Mat row(1, cone.dim());
    row.row(0) = b.transpose();
    const DirectionSet omega = DirectionSet::create(cone, row);

    auto profile = [&](double t) { return scalar_profile(cone, b, kind, t, mc).value; };

    constexpr int kCoarse = 200;
    constexpr int kDense = 2000;
    const double lo = std::log(1e-3);
    const double hi = std::log(20.0);
    auto scan = [&](int count, std::vector<double>& ts, std::vector<double>& vs) {
        ts.resize(static_cast<size_t>(count));
        vs.resize(static_cast<size_t>(count));
        for (int q = 0; q < count; ++q) {
            ts[static_cast<size_t>(q)] = std::exp(lo + (hi - lo) * q / (count - 1));
            vs[static_cast<size_t>(q)] = profile(ts[static_cast<size_t>(q)]);
        }
    };
    std::vector<double> ts;
    std::vector<double> vs;
    scan(kCoarse, ts, vs);

    int local_max = 0;
    for (int q = 1; q + 1 < kCoarse; ++q) {
        const size_t s = static_cast<size_t>(q);
        if (vs[s] > vs[s - 1] && vs[s] >= vs[s + 1]) ++local_max;
    }
    NonUniquenessPair out;
    out.kind = kind;
    out.multimodal = local_max > 1;
    // A second hump is not excluded by theory; fall back to a finer scan and
    // take the global maximum.
    if (out.multimodal) scan(kDense, ts, vs);

    const int count = static_cast<int>(ts.size());
    const int best = static_cast<int>(std::max_element(vs.begin(), vs.end()) - vs.begin());
    if (best == 0 || best == count - 1 || !(vs[static_cast<size_t>(best)] > 0.0)) {
        fail(ErrorCode::PeakNotFound, "profile has no interior maximum on [1e-3, 20]");
    }
    const auto peak = boost::math::tools::brent_find_minima([&](double t) { return -profile(t); },
                                                            ts[static_cast<size_t>(best - 1)],
                                                            ts[static_cast<size_t>(best + 1)], 40);
    out.t_peak = peak.first;
    out.peak_value = std::max(-peak.second, vs[static_cast<size_t>(best)]);
    out.common_value = (1.0 - rho) * out.peak_value;

    // First grid point below the level on each side of the peak; its inner
    // neighbour is at or above the level, so the pair brackets a root.
    auto crossing = [&](int step) {
        for (int q = best + step; q >= 0 && q < count; q += step) {
            if (vs[static_cast<size_t>(q)] >= out.common_value) continue;
            const double a = ts[static_cast<size_t>(std::min(q, q - step))];
            const double c = ts[static_cast<size_t>(std::max(q, q - step))];
            std::uintmax_t iters = 200;
            const auto root = boost::math::tools::toms748_solve(
                [&](double t) { return profile(t) - out.common_value; }, a, c,
                boost::math::tools::eps_tolerance<double>(50), iters);
            return 0.5 * (root.first + root.second);
        }
        fail(ErrorCode::PeakNotFound, "profile never falls below the target level");
    };
    out.t1 = crossing(-1);
    out.t2 = crossing(1);

    const double v1 = profile(out.t1);
    const double v2 = profile(out.t2);
    if (std::abs(v1 - v2) > 1e-6 * out.common_value) {
        fail(ErrorCode::VerificationFailed, "level-set roots disagree beyond 1e-6 relative");
    }
    if (!(out.t2 - out.t1 > 0.1 * out.t_peak)) {
        fail(ErrorCode::VerificationFailed, "the two roots are too close to separate the shapes");
    }

    out.k = make_wulff(cone, omega, SupportVector({out.t1}));
    out.l = make_wulff(cone, omega, SupportVector({out.t2}));
    auto weight = [&](const WulffShape& s, double t) {
        MCEstimate e = facet_surface(s, 0, mc);
        if (kind == MeasureKind::Cone) {
            e.value *= t;
            e.std_err *= t;
        }
        return e;
    };
    out.measure_k = weight(out.k, out.t1);
    out.measure_l = weight(out.l, out.t2);
    if (std::abs(out.measure_k.value - out.measure_l.value) >
        3.0 * std::hypot(out.measure_k.std_err, out.measure_l.std_err)) {
        fail(ErrorCode::VerificationFailed, "Monte Carlo weights of the pair differ beyond 3 sigma");
    }
    out.gamma_k = gauss_volume(out.k, mc);
    out.gamma_l = gauss_volume(out.l, mc);
    return out;
}

CheckReport uniqueness_compare(const WulffShape& k, const WulffShape& l, double vol_tol, double sup_tol,
                               const MCConfig& mc) {
    require_same_frame(k, l);
    const MCEstimate gk = gauss_volume(k, mc);
    const MCEstimate gl = gauss_volume(l, mc);
    const bool same_volume = std::abs(gk.value - gl.value) <= vol_tol;

    const DiscreteMeasure sk = surface_measure(k, mc);
    const DiscreteMeasure sl = surface_measure(l, mc);
    bool proportional = sk.total() > 0.0;
    if (proportional) {
        const double c = sl.total() / sk.total();
        for (int i = 0; i < sk.size(); ++i) {
            const double gap = sl.weights[static_cast<size_t>(i)] - c * sk.weights[static_cast<size_t>(i)];
            proportional = proportional && std::abs(gap) <= 3.0 * std::hypot(sl.std_err(i), c * sk.std_err(i)) + 1e-15;
        }
    }

    double dev = 0.0;
    for (int i = 0; i < k.facet_count(); ++i) {
        dev = std::max(dev, std::abs(k.effective_h()[i] - l.effective_h()[i]) / k.effective_h()[i]);
    }
    Digest d = pair_digest("uniqueness", k, l);
    d.add(vol_tol).add(sup_tol);
    CheckReport r = finish("uniqueness", CheckKind::Tolerance, estimate(dev, 0.0, mc), estimate(sup_tol, 0.0, mc), 0.0,
                           finish_digest(d, mc));
    r.sigma = 0.0;
    r.margin = (sup_tol - dev) / sup_tol;
    r.precondition = same_volume && proportional;
    r.passed = !r.precondition || dev <= sup_tol;
    return r;
}

}  // namespace gpc
