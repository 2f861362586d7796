#include "gpc/error.hpp"
#include "gpc/solver.hpp"

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace gpc;
using fixtures::vec;

namespace {

const Vec kDown = vec({0.0, -1.0});

DirectionSet down_only(const ConvexCone& cone) {
    Mat d(1, 2);
    d.row(0) = kDown.transpose();
    return DirectionSet::create(cone, d);
}

// μ := S(K₀, ·) or C(K₀, ·)/γ(K₀) from high-accuracy estimates.
DiscreteMeasure target(const WulffShape& k0, ProblemKind kind) {
    const MCConfig mc = MCConfig{}.with_samples(4000000).with_seed(404);
    DiscreteMeasure mu = kind == ProblemKind::Surface ? surface_measure(k0, mc) : cone_measure(k0, mc);
    if (kind == ProblemKind::Log) {
        const double g = gauss_volume(k0, mc).value;
        for (double& w : mu.weights) w /= g;
    }
    mu.std_errs.reset();
    return mu;
}

SolveReport run(ProblemKind kind, const ConvexCone& cone, const DirectionSet& omega, const DiscreteMeasure& mu,
                const SolveOptions& opts = {}) {
    return kind == ProblemKind::Surface ? solve_gaussian_minkowski(cone, omega, mu, opts)
                                        : solve_log_minkowski(cone, omega, mu, opts);
}

double max_relative_gap(const SupportVector& a, const SupportVector& b) {
    double gap = 0.0;
    for (int i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] / b[i] - 1.0));
    return gap;
}

}  // namespace

TEST(SolveOptionsTest, Validation) {
    SolveOptions o;
    EXPECT_NO_THROW(o.validate());
    o.tol_residual = 1e-3;  // below 5/sqrt(4e6)
    EXPECT_THROW(o.validate(), Error);
    o = {};
    o.mc_schedule.clear();
    EXPECT_THROW(o.validate(), Error);
    o = {};
    o.damping = 0.0;
    EXPECT_THROW(o.validate(), Error);
    o = {};
    o.initial_h = std::vector<double>{1.0, -1.0};
    try {
        o.validate();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonPositiveSupport);
    }
}

TEST(SolverTest, ZeroMeasureIsDegenerate) {
    const auto cone = fixtures::quarter_cone();
    const auto omega = down_only(cone);
    const auto mu = DiscreteMeasure::exact(omega, {0.0});
    for (auto kind : {ProblemKind::Surface, ProblemKind::Log}) {
        try {
            run(kind, cone, omega, mu);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::DegenerateMeasure);
        }
    }
}

// Single direction: the surface problem is stationary where t S(t) = γ(t)
// for any weight, the log problem where t S(t) / γ(t) = μ.
TEST(ScalarOracleTest, QuarterConeSurfaceStationaryPoint) {
    const auto cone = fixtures::quarter_cone();
    const auto omega = down_only(cone);
    const double t_star = oracle::bisect(
        [](double t) { return t * oracle::S_quarter(t) - oracle::gamma_quarter(t); }, 0.05, 6.0);
    const auto rep = solve_gaussian_minkowski(cone, omega, DiscreteMeasure::exact(omega, {0.1}), {});
    EXPECT_TRUE(rep.converged);
    EXPECT_NEAR(rep.solution_h[0], t_star, 0.01 * t_star);
}

TEST(ScalarOracleTest, QuarterConeLogStationaryPoint) {
    const auto cone = fixtures::quarter_cone();
    const auto omega = down_only(cone);
    const double mu = 0.2;
    const double t_star = oracle::bisect(
        [mu](double t) { return t * oracle::S_quarter(t) / oracle::gamma_quarter(t) - mu; }, 0.05, 6.0);
    const auto rep = solve_log_minkowski(cone, omega, DiscreteMeasure::exact(omega, {mu}), {});
    EXPECT_TRUE(rep.converged);
    EXPECT_NEAR(rep.solution_h[0], t_star, 0.01 * t_star);
    EXPECT_DOUBLE_EQ(rep.c_value.value, 1.0);
}

TEST(ScalarOracleTest, LargeWeightStillSolvesNormalizedProblem) {
    // μ(b) = 1 exceeds every single-facet weight; c absorbs it.
    const auto cone = fixtures::quarter_cone();
    const auto omega = down_only(cone);
    const auto rep = solve_gaussian_minkowski(cone, omega, DiscreteMeasure::exact(omega, {1.0}), {});
    EXPECT_TRUE(rep.converged);
    EXPECT_FALSE(rep.warnings.empty());

    SolveOptions strict;
    strict.normalized = false;
    try {
        solve_gaussian_minkowski(cone, omega, DiscreteMeasure::exact(omega, {1.0}), strict);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InfeasibleWeight);
    }
}

TEST(FeasibilityTest, QuarterConeSupremum) {
    const auto cone = fixtures::quarter_cone();
    const auto omega = down_only(cone);
    const MCConfig mc;
    const auto probe = feasibility_screen(cone, DiscreteMeasure::exact(omega, {0.0}), mc);
    const double sup = probe.entries[0].sup_weight;
    EXPECT_LE(sup, 1.0 / std::sqrt(2.0 * std::numbers::pi) + 1e-12);
    double grid_max = 0.0;
    for (double t = 0.01; t < 6.0; t += 1e-3) grid_max = std::max(grid_max, oracle::S_quarter(t));
    EXPECT_NEAR(sup, grid_max, 1e-6);

    EXPECT_TRUE(feasibility_screen(cone, DiscreteMeasure::exact(omega, {0.5 * sup}), mc).feasible);
    const auto bad = feasibility_screen(cone, DiscreteMeasure::exact(omega, {2.0 * sup}), mc);
    EXPECT_FALSE(bad.feasible);
    EXPECT_TRUE(bad.entries[0].infeasible);
}

class RoundTrip2D : public ::testing::TestWithParam<std::tuple<ProblemKind, int>> {};

TEST_P(RoundTrip2D, RecoversMeasure) {
    const auto [kind, seed] = GetParam();
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    const auto cone = fixtures::planar_cone(0.3, 2.2);
    const auto k0 = fixtures::random_shape(cone, rng, {.min_dirs = 2, .max_dirs = 5, .min_share = 0.05});
    const auto rep = run(kind, cone, k0.omega(), target(k0, kind));
    EXPECT_TRUE(rep.converged);
    EXPECT_LE(rep.max_residual, 0.02);
    if (kind == ProblemKind::Log) EXPECT_LE(max_relative_gap(rep.solution_h, k0.effective_h()), 0.02);
}

INSTANTIATE_TEST_SUITE_P(Kinds, RoundTrip2D,
                         ::testing::Combine(::testing::Values(ProblemKind::Surface, ProblemKind::Log),
                                            ::testing::Values(3, 4)));

TEST(RoundTrip3D, LogRecoversShape) {
    std::mt19937_64 rng(31);
    const auto cone = fixtures::octant();
    const auto k0 = fixtures::random_shape(cone, rng, {.min_dirs = 2, .max_dirs = 4, .min_share = 0.05});
    const auto rep = solve_log_minkowski(cone, k0.omega(), target(k0, ProblemKind::Log), {});
    EXPECT_TRUE(rep.converged);
    EXPECT_LE(rep.max_residual, 0.02);
    EXPECT_LE(max_relative_gap(rep.solution_h, k0.effective_h()), 0.02);
}

TEST(RoundTrip3D, SurfaceResidual) {
    std::mt19937_64 rng(32);
    const auto cone = fixtures::octant();
    const auto k0 = fixtures::random_shape(cone, rng, {.min_dirs = 2, .max_dirs = 3, .min_share = 0.05});
    const auto rep = solve_gaussian_minkowski(cone, k0.omega(), target(k0, ProblemKind::Surface), {});
    EXPECT_TRUE(rep.converged);
    EXPECT_LE(rep.max_residual, 0.02);
}

TEST(SymmetryTest, TripodEqualWeightsGiveEqualSupports) {
    const auto cone = fixtures::tripod(0.6);
    Mat dirs(3, 3);
    for (int k = 0; k < 3; ++k) {
        const Vec u = (cone.normals().row(k).transpose() - vec({0.0, 0.0, 1.0})).normalized();
        dirs.row(k) = u.transpose();
    }
    const auto omega = DirectionSet::create(cone, dirs);
    const auto rep = solve_log_minkowski(cone, omega, DiscreteMeasure::exact(omega, {0.2, 0.2, 0.2}), {});
    ASSERT_TRUE(rep.converged);
    const double mean = (rep.solution_h[0] + rep.solution_h[1] + rep.solution_h[2]) / 3.0;
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(rep.solution_h[k], mean, 0.02 * mean);
}

TEST(TraceTest, ResidualShrinksAndFixedPointAgrees) {
    std::mt19937_64 rng(5);
    const auto cone = fixtures::planar_cone(0.4, 2.0);
    const auto k0 = fixtures::random_shape(cone, rng, {.min_dirs = 3, .max_dirs = 3, .min_share = 0.05});
    const auto mu = target(k0, ProblemKind::Log);
    const auto grad = solve_log_minkowski(cone, k0.omega(), mu, {});
    ASSERT_GE(grad.trace.size(), 2u);
    EXPECT_LT(grad.trace.back().residual, grad.trace.front().residual);

    SolveOptions fp;
    fp.method = SolveMethod::FixedPoint;
    const auto fixed = solve_log_minkowski(cone, k0.omega(), mu, fp);
    EXPECT_TRUE(fixed.converged);
    EXPECT_LE(max_relative_gap(fixed.solution_h, grad.solution_h), 0.02);
}

TEST(DeterminismTest, SameSeedSameReport) {
    const auto cone = fixtures::quarter_cone();
    const auto omega = down_only(cone);
    const auto mu = DiscreteMeasure::exact(omega, {0.2});
    const auto a = solve_log_minkowski(cone, omega, mu, {});
    const auto b = solve_log_minkowski(cone, omega, mu, {});
    EXPECT_EQ(a.solution_h.values(), b.solution_h.values());
    EXPECT_EQ(a.residuals, b.residuals);
    EXPECT_EQ(a.trace.size(), b.trace.size());
}
