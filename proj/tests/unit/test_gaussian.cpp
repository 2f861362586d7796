#include "gpc/error.hpp"
#include "gpc/gaussian.hpp"
#include "gpc/specfun.hpp"
#include "gpc/volume_model.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>

using namespace gpc;
using fixtures::rows;
using fixtures::vec;

namespace {

MCConfig mc(std::int64_t n, std::uint64_t seed = 7) {
    MCConfig c;
    c.n_samples = n;
    c.seed = seed;
    return c;
}

::testing::AssertionResult within_sigma(const MCEstimate& a, double expected, double k = 3.0) {
    const double dev = std::abs(a.value - expected);
    if (dev <= k * a.std_err) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "value " << a.value << " vs " << expected << " (" << dev / a.std_err
                                         << " sigma)";
}

::testing::AssertionResult agree(const MCEstimate& a, const MCEstimate& b, double k = 3.0) {
    const double s = std::hypot(a.std_err, b.std_err);
    const double dev = std::abs(a.value - b.value);
    if (dev <= k * s + 1e-12) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << a.value << " vs " << b.value << " (" << dev / s << " sigma)";
}

}  // namespace

TEST(SpecialFunctions, PhiCdf) {
    EXPECT_DOUBLE_EQ(phi_cdf(0.0), 0.5);
    EXPECT_GT(phi_cdf(8.0), 1.0 - 1e-14);
    EXPECT_NEAR(phi_cdf(1.0), oracle::Phi_quadrature(1.0), 1e-12);
    for (double t : {-6.0, -2.5, -0.3, 0.7, 1.9, 4.2}) EXPECT_NEAR(phi_cdf(t), oracle::Phi_quadrature(t), 1e-12) << t;
}

TEST(SpecialFunctions, PhiInverse) {
    for (double p : {1e-10, 0.01, 0.3, 0.5, 0.77, 0.999}) EXPECT_NEAR(phi_cdf(phi_inv(p)), p, 1e-14 + 1e-12 * p);
    EXPECT_THROW(phi_inv(0.0), Error);
}

TEST(SpecialFunctions, RadialMass) {
    EXPECT_EQ(radial_mass(0.0, 3), 0.0);
    EXPECT_NEAR(radial_mass(1.0, 1), std::sqrt(2 * std::numbers::pi) * (oracle::Phi_quadrature(1.0) - 0.5), 1e-12);
    EXPECT_NEAR(radial_mass(40.0, 2), 1.0, 1e-15);
    for (int n = 1; n <= 5; ++n) {
        for (double r : {0.1, 0.8, 1.5, 3.0, 6.0}) {
            const double ref = oracle::simpson([n](double x) { return std::exp(-0.5 * x * x) * std::pow(x, n - 1); }, 0.0, r);
            EXPECT_NEAR(radial_mass(r, n), ref, 1e-10 * ref) << n << " " << r;
            const double total = radial_mass(r, n) + radial_tail(r, n);
            EXPECT_NEAR(total, radial_tail(0.0, n), 1e-12 * total);
        }
    }
}

TEST(SpecialFunctions, ChiDistribution) {
    for (int n = 1; n <= 4; ++n) {
        for (double r : {0.2, 1.0, 2.5}) {
            EXPECT_NEAR(chi_cdf(r, n) + chi_sf(r, n), 1.0, 1e-14);
            const double h = 1e-5;
            EXPECT_NEAR((chi_cdf(r + h, n) - chi_cdf(r - h, n)) / (2 * h), chi_pdf(r, n), 1e-8);
        }
    }
    EXPECT_NEAR(sphere_area(3), 4 * std::numbers::pi, 1e-14);
}

TEST(MonteCarlo, DeterministicAndThreadIndependent) {
    const auto k = fixtures::single_facet(fixtures::tripod(0.6), vec({0, 0, -1}), 0.8);
    const auto a = covolume(k, mc(50000, 3));
    const auto b = covolume(k, mc(50000, 3));
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.std_err, b.std_err);
    setenv("GPC_THREADS", "3", 1);
    const auto c = covolume(k, mc(50000, 3));
    unsetenv("GPC_THREADS");
    EXPECT_EQ(a.value, c.value);
    EXPECT_EQ(a.std_err, c.std_err);
    EXPECT_NE(a.value, covolume(k, mc(50000, 4)).value);
    EXPECT_THROW(covolume(k, mc(999)), Error);
}

TEST(ConeVolume, Fixtures) {
    const auto q = gauss_volume_cone(fixtures::quarter_cone(), mc(400000));
    EXPECT_NEAR(*q.analytic, 0.25, 1e-15);
    EXPECT_TRUE(within_sigma(q.estimate, 0.25));
    const auto o = gauss_volume_cone(fixtures::octant(), mc(400000));
    EXPECT_NEAR(*o.analytic, 0.125, 1e-14);
    EXPECT_TRUE(within_sigma(o.estimate, 0.125));
    const auto r = gauss_volume_cone(fixtures::planar_cone(0.2, 1.2), mc(400000));
    EXPECT_NEAR(*r.analytic, 1.0 / (2 * std::numbers::pi), 1e-14);
    EXPECT_TRUE(within_sigma(r.estimate, 1.0 / (2 * std::numbers::pi)));
    const auto t = gauss_volume_cone(fixtures::tripod(0.5), mc(400000));
    EXPECT_TRUE(within_sigma(t.estimate, *t.analytic));
}

TEST(ConeVolume, BoundaryRaysIntegrateToOne) {
    for (auto cone : {fixtures::quarter_cone(), fixtures::planar_cone(-0.4, 2.1)}) {
        const auto a = cone_boundary_measure(cone, 0, mc(200000));
        const auto b = cone_boundary_measure(cone, 1, mc(200000, 8));
        EXPECT_TRUE(within_sigma(a, 0.5));
        MCEstimate sum{a.value + b.value, std::hypot(a.std_err, b.std_err), 0, 0};
        EXPECT_TRUE(within_sigma(sum, 1.0));
    }
}

TEST(Halfspace, Calibration) {
    for (int n : {2, 3}) {
        Vec u = Vec::Ones(n).normalized();
        for (double t : {0.0, 0.5, 1.0, 2.0}) EXPECT_TRUE(within_sigma(halfspace_volume(u, t, mc(200000)), phi_cdf(t)));
    }
}

TEST(Covolume, QuarterConeClosedForm) {
    const auto cone = fixtures::quarter_cone();
    for (double t : {0.5, 1.0, 2.0}) {
        const auto k = fixtures::single_facet(cone, vec({0, -1}), t);
        const double gk = oracle::gamma_quarter(t);
        const auto vg = covolume(k, mc(400000));
        EXPECT_TRUE(within_sigma(vg, 0.25 - gk));
        EXPECT_NEAR(covolume_radial(k, mc(1000)).value, 0.25 - gk, 1e-10);
        const auto direct = gauss_volume_direct(k, mc(400000));
        const auto identity = gauss_volume(k, mc(400000));
        EXPECT_TRUE(agree(direct, identity));
        EXPECT_TRUE(within_sigma(identity, gk));
        EXPECT_LT(identity.value, 0.5);
    }
}

TEST(Covolume, Limits) {
    const auto cone = fixtures::tripod(0.5);
    const auto k = fixtures::single_facet(cone, vec({0, 0, -1}), 1e-3);
    const auto small = covolume(k, mc(100000));
    EXPECT_LT(small.value, 3 * small.std_err + 1e-12);
    EXPECT_NEAR(covolume_radial(fixtures::single_facet(fixtures::quarter_cone(), vec({0, -1}), 1e-6), mc(1000)).value, 0.0, 1e-12);
    const auto big = fixtures::single_facet(cone, vec({0, 0, -1}), 10.0);
    EXPECT_TRUE(within_sigma(covolume(big, mc(100000)), *cone_volume_exact(cone)));
}

TEST(Covolume, OctantRadialAgreement) {
    const auto c = fixtures::octant();
    const double s = 1.0 / std::sqrt(3.0);
    const auto k = make_wulff(c, DirectionSet::create(c, rows({{-s, -s, -s}})), SupportVector({1.0}));
    EXPECT_TRUE(agree(covolume(k, mc(400000)), covolume_radial(k, mc(400000))));
}

TEST(Covolume, MonotoneInSupport) {
    std::mt19937_64 rng(5);
    const auto cone = fixtures::tripod(0.6);
    const auto k = fixtures::random_shape(cone, rng);
    std::vector<double> h = k.defining_h().values();
    for (double& x : h) x *= 1.1;
    const auto k2 = with_support(k, SupportVector(h));
    const auto a = covolume(k, mc(200000));
    const auto b = covolume(k2, mc(200000));
    EXPECT_GE(b.value - a.value, -3 * std::hypot(a.std_err, b.std_err));
    EXPECT_GT(covolume_radial(k2, mc(200000)).value, covolume_radial(k, mc(200000)).value);
}

TEST(Surface, QuarterConeClosedForm) {
    const auto cone = fixtures::quarter_cone();
    for (double t : {0.5, 1.0, 2.0}) {
        const auto k = fixtures::single_facet(cone, vec({0, -1}), t);
        EXPECT_TRUE(within_sigma(facet_surface(k, 0, mc(400000)), oracle::S_quarter(t)));
        EXPECT_NEAR(surface_radial(k, 0, mc(1000)).value, oracle::S_quarter(t), 1e-10);
        EXPECT_NEAR(facet_surface_exact(k, 0).value, oracle::S_quarter(t), 1e-12);
    }
}

TEST(Surface, InactiveFacetIsZero) {
    const auto c = fixtures::quarter_cone();
    const auto omega = DirectionSet::create(c, rows({{0, -1}, {-std::sin(0.1), -std::cos(0.1)}}));
    const auto k = make_wulff(c, omega, SupportVector({1.0, 0.5}));
    EXPECT_EQ(facet_surface(k, 1, mc(10000)).value, 0.0);
    EXPECT_EQ(surface_radial(k, 1, mc(10000)).value, 0.0);
    EXPECT_EQ(sector_cone_volume(k, 1, mc(10000)).value, 0.0);
}

TEST(Surface, ExactSectionMatchesMonteCarlo) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const auto cone = trial % 2 ? fixtures::planar_cone(0.1, 1.7) : fixtures::tripod(0.55);
        const auto k = fixtures::random_shape(cone, rng);
        for (int i = 0; i < k.facet_count(); ++i) {
            const auto exact = facet_surface_exact(k, i);
            EXPECT_TRUE(within_sigma(facet_surface(k, i, mc(200000)), exact.value)) << trial << " " << i;
        }
    }
}

class DualOracle : public ::testing::TestWithParam<int> {};

TEST_P(DualOracle, SurfaceAndCovolumeAgree) {
    std::mt19937_64 rng(100 + GetParam());
    const auto cone = GetParam() % 2 ? fixtures::planar_cone(0.2, 1.5) : fixtures::tripod(0.6);
    fixtures::RandomShapeOptions opt;
    opt.all_active = false;
    const auto k = fixtures::random_shape(cone, rng, opt);
    const auto cfg = mc(200000, 50 + GetParam());
    EXPECT_TRUE(agree(covolume(k, cfg), covolume_radial(k, cfg)));
    for (int i = 0; i < k.facet_count(); ++i) {
        EXPECT_TRUE(agree(facet_surface(k, i, cfg), surface_radial(k, i, cfg))) << "facet " << i;
    }
}

INSTANTIATE_TEST_SUITE_P(Shapes, DualOracle, ::testing::Range(0, 20));

TEST(Sector, SingleFacetEqualsCovolume) {
    const auto k = fixtures::single_facet(fixtures::quarter_cone(), vec({0, -1}), 1.0);
    EXPECT_NEAR(sector_cone_volume(k, 0, mc(1000)).value, covolume_radial(k, mc(1000)).value, 1e-12);
    const auto k3 = fixtures::single_facet(fixtures::tripod(0.5), vec({0, 0, -1}), 1.0);
    EXPECT_TRUE(agree(sector_cone_volume(k3, 0, mc(200000)), covolume(k3, mc(200000))));
}

TEST(Sector, ConeVolumeBoundIsStrict) {
    for (auto cone : {fixtures::quarter_cone(), fixtures::tripod(0.6)}) {
        const int n = cone.dim();
        Vec b = -cone.ref_dir();
        const auto k = fixtures::single_facet(cone, b, 0.9);
        const auto s = facet_surface(k, 0, mc(400000));
        const auto sector = sector_cone_volume(k, 0, mc(400000));
        const double lhs = 0.9 * s.value / n;
        EXPECT_GT(sector.value - lhs, 3 * std::hypot(0.9 * s.std_err / n, sector.std_err));
    }
}

TEST(Surface, SingleFacetMeasureHelper) {
    const auto cone = fixtures::quarter_cone();
    for (double t : {0.1, 1.0, 3.0}) {
        EXPECT_NEAR(single_facet_surface(cone, vec({0, -1}), t, mc(1000)).value, oracle::S_quarter(t), 1e-12);
    }
    const auto tri = fixtures::tripod(0.5);
    const auto k = fixtures::single_facet(tri, vec({0, 0, -1}), 0.7);
    EXPECT_TRUE(within_sigma(facet_surface(k, 0, mc(200000)), single_facet_surface(tri, vec({0, 0, -1}), 0.7, mc(1000)).value));
}

TEST(VolumeModel, QuadratureGradient) {
    std::mt19937_64 rng(21);
    const auto cone = fixtures::planar_cone(0.3, 2.0);
    const auto k = fixtures::random_shape(cone, rng, {.min_dirs = 3, .max_dirs = 3});
    const QuadratureModel2D model(cone, k.omega());
    const auto h = k.defining_h().values();
    const auto v = model.evaluate(h);
    EXPECT_NEAR(v.gamma, *cone_volume_exact(cone) - covolume_radial(k, mc(1000)).value, 1e-12);
    for (int i = 0; i < 3; ++i) {
        auto hp = h;
        auto hm = h;
        hp[static_cast<size_t>(i)] += 1e-5;
        hm[static_cast<size_t>(i)] -= 1e-5;
        const double fd = (model.evaluate(hp).gamma - model.evaluate(hm).gamma) / 2e-5;
        EXPECT_NEAR(-fd, v.surface[i], 1e-7);
        EXPECT_NEAR(v.surface[i], facet_surface_exact(k, i).value, 1e-10);
    }
}

TEST(VolumeModel, RadialSampleConsistency) {
    std::mt19937_64 rng(22);
    const auto cone = fixtures::tripod(0.6);
    const auto k = fixtures::random_shape(cone, rng, {.min_dirs = 3, .max_dirs = 3, .min_share = 0.1});
    const RadialSampleModel model(cone, k.omega(), mc(1000000), 99);
    const auto h = k.defining_h().values();
    const auto v = model.evaluate(h, true);
    EXPECT_GT(v.gamma_err, 0.0);
    EXPECT_TRUE(agree({v.gamma, v.gamma_err, 0, 0}, gauss_volume(k, mc(400000))));
    for (int i = 0; i < 3; ++i) {
        auto hp = h;
        auto hm = h;
        hp[static_cast<size_t>(i)] += 1e-6;
        hm[static_cast<size_t>(i)] -= 1e-6;
        const double fd = (model.evaluate(hp).gamma - model.evaluate(hm).gamma) / 2e-6;
        EXPECT_NEAR(-fd, v.surface[i], 2e-3 * v.surface[i]);
        EXPECT_NEAR(v.surface[i], facet_surface_exact(k, i).value, 0.03 * v.surface[i]);
    }
}
