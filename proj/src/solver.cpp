#include "gpc/solver.hpp"

#include "gpc/error.hpp"
#include "gpc/volume_model.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace gpc {
namespace {

constexpr double kArmijoSlackSigma = 1.0;
constexpr double kMaxLogStep = 1.0;
constexpr int kMaxBacktracks = 40;

struct State {
    std::vector<double> h;
    ModelValue model;
    double objective = -std::numeric_limits<double>::infinity();
    Vec grad;
    double residual = std::numeric_limits<double>::infinity();
    double c = 1.0;
    bool valid = false;
};

class Ascent {
public:
    Ascent(ProblemKind kind, const ConvexCone& cone, const DirectionSet& omega, const std::vector<double>& alpha)
        : kind_(kind), cone_(cone), omega_(omega), alpha_(alpha) {
        alpha_floor_ = 1e-3 * *std::max_element(alpha_.begin(), alpha_.end());
    }

    std::vector<double> project(const std::vector<double>& h) const {
        return effective_support(cone_, omega_, SupportVector(h)).values();
    }

    State evaluate(const VolumeModel& model, std::vector<double> h) const {
        State s;
        s.h = std::move(h);
        s.model = model.evaluate(s.h, true);
        const double g = s.model.gamma;
        const int m = static_cast<int>(s.h.size());
        s.grad = Vec::Zero(m);
        if (!(g > 0.0)) return s;
        s.valid = true;
        double pairing = 0.0;
        double log_pairing = 0.0;
        for (int i = 0; i < m; ++i) {
            pairing += alpha_[static_cast<size_t>(i)] * s.h[static_cast<size_t>(i)];
            log_pairing += alpha_[static_cast<size_t>(i)] * std::log(s.h[static_cast<size_t>(i)]);
        }
        s.residual = 0.0;
        if (kind_ == ProblemKind::Surface) {
            s.objective = std::log(g) + std::log(pairing);
            s.c = pairing / g;
            for (int i = 0; i < m; ++i) {
                const double hi = s.h[static_cast<size_t>(i)];
                const double a = alpha_[static_cast<size_t>(i)];
                s.grad[i] = hi * (-s.model.surface[i] / g + a / pairing);
                s.residual = std::max(s.residual, std::abs(s.c * s.model.surface[i] - a) / std::max(a, alpha_floor_));
            }
        } else {
            s.objective = std::log(g) + log_pairing;
            s.c = 1.0;
            for (int i = 0; i < m; ++i) {
                const double hi = s.h[static_cast<size_t>(i)];
                const double a = alpha_[static_cast<size_t>(i)];
                const double ci = hi * s.model.surface[i] / g;
                s.grad[i] = -ci + a;
                s.residual = std::max(s.residual, std::abs(ci - a) / std::max(a, alpha_floor_));
            }
        }
        return s;
    }

    // Damped multiplicative update toward the stationarity equations.
    std::vector<double> fixed_point(const State& s, double beta) const {
        std::vector<double> out = s.h;
        for (size_t i = 0; i < out.size(); ++i) {
            const double a = alpha_[i];
            const double si = s.model.surface[static_cast<Eigen::Index>(i)];
            const double target = kind_ == ProblemKind::Surface ? s.c * si : s.h[i] * si / s.model.gamma;
            double ratio;
            if (target <= 0.0) {
                ratio = a > 0.0 ? 2.0 : 1.0;
            } else if (a <= 0.0) {
                ratio = 0.5;  // unwanted facet: pull its plane in until it is slack
            } else {
                ratio = std::clamp(target / std::max(a, 0.0), 0.5, 2.0);
                if (kind_ == ProblemKind::Log) ratio = 1.0 / ratio;
            }
            // Surface: a facet carrying too much weight (target > α) moves
            // outward; log: h_i ← h_i (α_i γ / (h_i S_i))^β.
            out[i] *= std::pow(ratio, beta);
        }
        return out;
    }

private:
    ProblemKind kind_;
    const ConvexCone& cone_;
    const DirectionSet& omega_;
    std::vector<double> alpha_;
    double alpha_floor_ = 0.0;
};

std::vector<double> exp_of(const Vec& xi) {
    std::vector<double> h(static_cast<size_t>(xi.size()));
    for (Eigen::Index i = 0; i < xi.size(); ++i) h[static_cast<size_t>(i)] = std::exp(xi[i]);
    return h;
}

Vec log_of(const std::vector<double>& h) {
    Vec xi(static_cast<Eigen::Index>(h.size()));
    for (size_t i = 0; i < h.size(); ++i) xi[static_cast<Eigen::Index>(i)] = std::log(h[i]);
    return xi;
}

std::vector<double> residuals_from(const WulffShape& k, const DiscreteMeasure& mu, ProblemKind kind,
                                   const DiscreteMeasure& surface, double gamma) {
    std::vector<double> r(static_cast<size_t>(k.facet_count()));
    double pairing = 0.0;
    for (int i = 0; i < k.facet_count(); ++i) pairing += mu.weights[static_cast<size_t>(i)] * k.effective_h()[i];
    const double c = pairing / gamma;
    for (int i = 0; i < k.facet_count(); ++i) {
        const double a = mu.weights[static_cast<size_t>(i)];
        const double s = surface.weights[static_cast<size_t>(i)];
        const double model = kind == ProblemKind::Surface ? c * s : k.effective_h()[i] * s / gamma;
        r[static_cast<size_t>(i)] = std::abs(model - a) / std::max(a, kResidualGuard);
    }
    return r;
}

MCConfig phase_config(const SolveOptions& opts, std::int64_t n, std::uint64_t salt) {
    MCConfig c = opts.mc;
    c.n_samples = n;
    c.seed = splitmix64(opts.seed ^ salt);
    return c;
}

SolveReport solve(ProblemKind kind, const ConvexCone& cone, const DirectionSet& omega, const DiscreteMeasure& mu,
                  const SolveOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    opts.validate();
    if (!(mu.omega == omega)) fail(ErrorCode::MismatchedOmega, "measure is not defined on the given directions");
    mu.require_nonzero();
    if (mu.std_errs) {
        // Estimated measures are accepted as data; only their values are used.
    }

    SolveReport report;
    report.kind = kind;

    if (kind == ProblemKind::Surface) {
        const FeasibilityReport screen = feasibility_screen(cone, mu, phase_config(opts, opts.mc_schedule.front(), stream_id("screen")));
        if (!screen.feasible) {
            if (!opts.normalized) {
                fail(ErrorCode::InfeasibleWeight, "a weight exceeds every single-facet surface weight in its direction");
            }
            report.warnings.emplace_back(
                "some weight exceeds the single-facet surface supremum; only the normalized problem is solved");
        }
    }

    const Ascent ascent(kind, cone, omega, mu.weights);
    const int m = omega.size();
    std::vector<double> h = opts.initial_h ? *opts.initial_h : std::vector<double>(static_cast<size_t>(m), 1.0);
    if (static_cast<int>(h.size()) != m) fail(ErrorCode::DimensionMismatch, "initial_h length differs from direction count");
    h = ascent.project(h);

    const int phases = cone.dim() == 2 ? 1 : static_cast<int>(opts.mc_schedule.size());
    int iter = 0;
    for (int phase = 0; phase < phases; ++phase) {
        const bool last = phase + 1 == phases;
        const auto model = make_volume_model(
            cone, omega, phase_config(opts, opts.mc_schedule[static_cast<size_t>(cone.dim() == 2 ? opts.mc_schedule.size() - 1 : phase)], stream_id("phase", static_cast<std::uint64_t>(phase))),
            stream_id("solver_model", static_cast<std::uint64_t>(phase)));
        const double tol_phase = last ? 0.25 * opts.tol_residual : opts.tol_residual;

        State cur = ascent.evaluate(*model, h);
        if (!cur.valid) fail(ErrorCode::ZeroVolume, "starting shape has zero Gaussian volume");
        Eigen::MatrixXd inv_h = opts.step_init * Eigen::MatrixXd::Identity(m, m);
        bool fresh_h = true;
        double beta = opts.damping;

        while (iter < opts.max_iters) {
            report.trace.push_back({iter, phase, cur.objective, cur.residual, cur.model.gamma, cur.c,
                                    cur.model.gamma_err, cur.c * cur.model.gamma_err / cur.model.gamma});
            if (cur.residual <= tol_phase) break;
            ++iter;

            State next;
            bool accepted = false;
            if (opts.method == SolveMethod::FixedPoint) {
                for (int bt = 0; bt < kMaxBacktracks && !accepted; ++bt) {
                    next = ascent.evaluate(*model, ascent.project(ascent.fixed_point(cur, beta)));
                    const double slack = kArmijoSlackSigma * model->difference_err(cur.model, next.model) / cur.model.gamma;
                    accepted = next.valid && next.objective >= cur.objective - slack;
                    if (!accepted) beta *= 0.5;
                }
                if (!accepted) break;
                beta = std::min(opts.damping, 2.0 * beta);
                cur = std::move(next);
                continue;
            }

            const Vec xi = log_of(cur.h);
            for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
                Vec dir = inv_h * cur.grad;
                double slope = cur.grad.dot(dir);
                if (!(slope > 0.0)) {
                    inv_h = opts.step_init * Eigen::MatrixXd::Identity(m, m);
                    fresh_h = true;
                    dir = inv_h * cur.grad;
                    slope = cur.grad.dot(dir);
                }
                const double cap = dir.cwiseAbs().maxCoeff();
                double t = cap > kMaxLogStep ? kMaxLogStep / cap : 1.0;
                for (int bt = 0; bt < kMaxBacktracks; ++bt, t *= 0.5) {
                    next = ascent.evaluate(*model, ascent.project(exp_of(xi + t * dir)));
                    if (!next.valid) continue;
                    const double slack = kArmijoSlackSigma * model->difference_err(cur.model, next.model) / cur.model.gamma;
                    if (next.objective >= cur.objective + opts.armijo_c * t * slope - slack) {
                        accepted = true;
                        break;
                    }
                }
                if (!accepted) {
                    if (fresh_h) break;
                    inv_h = opts.step_init * Eigen::MatrixXd::Identity(m, m);
                    fresh_h = true;
                }
            }
            if (!accepted) break;

            // BFGS update of the inverse negative Hessian in log coordinates.
            const Vec s = log_of(next.h) - xi;
            const Vec y = cur.grad - next.grad;
            const double sy = s.dot(y);
            if (sy > 1e-12 * s.norm() * y.norm()) {
                if (fresh_h) {
                    inv_h = (sy / y.squaredNorm()) * Eigen::MatrixXd::Identity(m, m);
                    fresh_h = false;
                }
                const double rho = 1.0 / sy;
                const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m, m);
                inv_h = (eye - rho * s * y.transpose()) * inv_h * (eye - rho * y * s.transpose()) + rho * s * s.transpose();
            }
            cur = std::move(next);
        }
        h = cur.h;
    }
    report.iterations = iter;

    // Independent check at the last budget with a fresh seed.
    const MCConfig final_mc = phase_config(opts, opts.mc_schedule.back(), stream_id("final_check"));
    const WulffShape k = make_wulff(cone, omega, SupportVector(h));
    report.solution_h = k.effective_h();
    report.surface = surface_measure(k, final_mc);
    report.gamma = gauss_volume(k, final_mc);
    report.covolume = covolume(k, final_mc);
    if (!(report.gamma.value > 0.0)) fail(ErrorCode::ZeroVolume, "solution has zero Gaussian volume");
    report.residuals = residuals_from(k, mu, kind, report.surface, report.gamma.value);
    report.max_residual = *std::max_element(report.residuals.begin(), report.residuals.end());
    double pairing = 0.0;
    double log_pairing = 0.0;
    for (int i = 0; i < m; ++i) {
        pairing += mu.weights[static_cast<size_t>(i)] * k.effective_h()[i];
        log_pairing += mu.weights[static_cast<size_t>(i)] * std::log(k.effective_h()[i]);
    }
    const double g = report.gamma.value;
    if (kind == ProblemKind::Surface) {
        report.c_value = {pairing / g, pairing / g * report.gamma.std_err / g, report.gamma.n_samples, report.gamma.seed};
    } else {
        report.c_value = {1.0, 0.0, report.gamma.n_samples, report.gamma.seed};
    }
    const double objective = std::log(g) + (kind == ProblemKind::Surface ? std::log(pairing) : log_pairing);
    report.trace.push_back({iter, phases, objective, report.max_residual, g, report.c_value.value,
                            report.gamma.std_err, report.c_value.std_err});
    report.converged = report.max_residual <= opts.tol_residual;
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace

void SolveOptions::validate() const {
    if (max_iters < 1) fail(ErrorCode::InvalidInput, "solver.max_iters must be positive");
    if (!(step_init > 0.0)) fail(ErrorCode::InvalidInput, "solver.step_init must be positive");
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) fail(ErrorCode::InvalidInput, "solver.armijo_c must lie in (0, 1)");
    if (!(damping > 0.0 && damping <= 1.0)) fail(ErrorCode::InvalidInput, "solver.damping must lie in (0, 1]");
    if (mc_schedule.empty()) fail(ErrorCode::InvalidInput, "solver.mc_schedule must be nonempty");
    for (auto n : mc_schedule) {
        if (n < 1000) fail(ErrorCode::InvalidInput, "solver.mc_schedule entries must be at least 1000");
    }
    if (!(tol_residual > 0.0)) fail(ErrorCode::InvalidInput, "solver.tol_residual must be positive");
    const double expected = 1.0 / std::sqrt(static_cast<double>(mc_schedule.back()));
    if (tol_residual < 5.0 * expected) {
        std::ostringstream os;
        os << "solver.tol_residual " << tol_residual << " is below 5x the final Monte Carlo error " << expected
           << "; raise the last mc_schedule entry";
        fail(ErrorCode::InvalidInput, os.str());
    }
    if (initial_h) {
        for (double v : *initial_h) {
            if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::NonPositiveSupport, "solver.initial_h must be positive");
        }
    }
}

SolveReport solve_gaussian_minkowski(const ConvexCone& cone, const DirectionSet& omega, const DiscreteMeasure& mu,
                                     const SolveOptions& opts) {
    return solve(ProblemKind::Surface, cone, omega, mu, opts);
}

SolveReport solve_log_minkowski(const ConvexCone& cone, const DirectionSet& omega, const DiscreteMeasure& mu,
                                const SolveOptions& opts) {
    return solve(ProblemKind::Log, cone, omega, mu, opts);
}

std::vector<double> residual(const WulffShape& k, const DiscreteMeasure& mu, ProblemKind kind, const MCConfig& mc) {
    if (!(mu.omega == k.omega())) fail(ErrorCode::MismatchedOmega, "measure is not defined on the shape's directions");
    const DiscreteMeasure s = surface_measure(k, mc);
    const MCEstimate g = gauss_volume(k, mc);
    if (!(g.value > 0.0)) fail(ErrorCode::ZeroVolume, "Gaussian volume estimate is not positive");
    return residuals_from(k, mu, kind, s, g.value);
}

FeasibilityReport feasibility_screen(const ConvexCone& cone, const DiscreteMeasure& mu, const MCConfig& mc) {
    FeasibilityReport out;
    constexpr int kGrid = 160;
    const double lo = std::log(1e-3);
    const double hi = std::log(20.0);
    for (int i = 0; i < mu.size(); ++i) {
        const Vec u = mu.omega[i];
        auto weight = [&](double t) { return single_facet_surface(cone, u, t, mc); };
        int best = 0;
        double best_val = -1.0;
        std::vector<double> grid(kGrid);
        for (int q = 0; q < kGrid; ++q) {
            grid[static_cast<size_t>(q)] = std::exp(lo + (hi - lo) * q / (kGrid - 1));
            const double v = weight(grid[static_cast<size_t>(q)]).value;
            if (v > best_val) {
                best_val = v;
                best = q;
            }
        }
        const double a = grid[static_cast<size_t>(std::max(0, best - 1))];
        const double b = grid[static_cast<size_t>(std::min(kGrid - 1, best + 1))];
        const auto peak = boost::math::tools::brent_find_minima([&](double t) { return -weight(t).value; }, a, b, 40);
        FeasibilityEntry e;
        e.alpha = mu.weights[static_cast<size_t>(i)];
        e.t_at_sup = peak.first;
        const MCEstimate at = weight(peak.first);
        e.sup_weight = std::max(at.value, best_val);
        e.sup_err = at.std_err;
        e.infeasible = e.alpha > e.sup_weight + 3.0 * e.sup_err;
        out.feasible = out.feasible && !e.infeasible;
        out.entries.push_back(e);
    }
    return out;
}

}  // namespace gpc
