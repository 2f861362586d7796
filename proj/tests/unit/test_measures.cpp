#include "gpc/error.hpp"
#include "gpc/measures.hpp"

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace gpc;
using fixtures::vec;

namespace {

const Vec kDown = vec({0.0, -1.0});

MCConfig config(std::int64_t n = 400000) { return MCConfig{}.with_samples(n); }

}  // namespace

TEST(DiscreteMeasureTest, RejectsNegativeAndMismatchedWeights) {
    const auto k = fixtures::single_facet(fixtures::quarter_cone(), kDown, 1.0);
    EXPECT_THROW(DiscreteMeasure::exact(k.omega(), {-0.1}), Error);
    try {
        DiscreteMeasure::exact(k.omega(), {0.1, 0.2});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
    const auto zero = DiscreteMeasure::exact(k.omega(), {0.0});
    try {
        zero.require_nonzero();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateMeasure);
    }
}

TEST(SurfaceMeasureTest, QuarterConeClosedForm) {
    for (double t : {0.5, 1.0, 2.0}) {
        const auto k = fixtures::single_facet(fixtures::quarter_cone(), kDown, t);
        const auto s = surface_measure(k, config());
        const auto c = cone_measure(k, config());
        EXPECT_NEAR(s.weights[0], oracle::S_quarter(t), 3.0 * s.std_err(0) + 1e-12) << t;
        EXPECT_NEAR(c.weights[0], oracle::C_quarter(t), 3.0 * c.std_err(0) + 1e-12) << t;
    }
}

TEST(SurfaceMeasureTest, ConeMeasureIsSupportWeightedSurface) {
    std::mt19937_64 rng(11);
    for (const auto& cone : {fixtures::planar_cone(0.3, 2.0), fixtures::octant()}) {
        const auto k = fixtures::random_shape(cone, rng);
        const auto s = surface_measure(k, config(50000));
        const auto c = cone_measure(k, config(50000));
        for (int i = 0; i < k.facet_count(); ++i) {
            EXPECT_DOUBLE_EQ(c.weights[static_cast<size_t>(i)], k.effective_h()[i] * s.weights[static_cast<size_t>(i)]);
        }
    }
}

TEST(MixedVolumeTest, SelfPairingAndLinearityInSecondArgument) {
    std::mt19937_64 rng(12);
    const auto k = fixtures::random_shape(fixtures::planar_cone(0.2, 1.9), rng, {.min_dirs = 2, .max_dirs = 3});
    const auto s = surface_measure(k, config());
    double self = 0.0;
    for (int i = 0; i < k.facet_count(); ++i) self += k.effective_h()[i] * s.weights[static_cast<size_t>(i)];
    const MCEstimate kk = mixed_volume(k, k, config());
    EXPECT_DOUBLE_EQ(kk.value, self);
    const MCEstimate k2 = mixed_volume(k, scaled(k, 2.0), config());
    EXPECT_NEAR(k2.value, 2.0 * kk.value, 1e-12 * kk.value);
}

TEST(MixedVolumeTest, DifferentFramesRejected) {
    const auto k = fixtures::single_facet(fixtures::quarter_cone(), kDown, 1.0);
    const auto l = fixtures::single_facet(fixtures::quarter_cone(), vec({0.1, -1.0}).normalized(), 1.0);
    try {
        mixed_volume(k, l, config(10000));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MismatchedOmega);
    }
}

TEST(FunctionalTest, QuarterConeSingleDirection) {
    const auto cone = fixtures::quarter_cone();
    const auto k = fixtures::single_facet(cone, kDown, 1.0);
    const auto mu = DiscreteMeasure::exact(k.omega(), {0.3});
    const double t = 0.8;
    const MCEstimate i_val = functional_I(mu, SupportVector({t}), cone, config());
    const MCEstimate l_val = functional_L(mu, SupportVector({t}), cone, config());
    EXPECT_NEAR(i_val.value, oracle::gamma_quarter(t) * 0.3 * t, 3.0 * i_val.std_err + 1e-9);
    EXPECT_NEAR(l_val.value, oracle::gamma_quarter(t) * std::pow(t, 0.3), 3.0 * l_val.std_err + 1e-9);
}

TEST(FunctionalTest, VanishesAtBothEnds) {
    const auto cone = fixtures::quarter_cone();
    const auto k = fixtures::single_facet(cone, kDown, 1.0);
    const auto mu = DiscreteMeasure::exact(k.omega(), {1.0});
    const double mid = functional_I(mu, SupportVector({1.0}), cone, config()).value;
    EXPECT_LT(functional_I(mu, SupportVector({1e-3}), cone, config()).value, 1e-2 * mid);
    EXPECT_LT(functional_I(mu, SupportVector({8.0}), cone, config()).value, 1e-2 * mid);
}

TEST(FunctionalTest, EffectiveSupportNeverLowersI) {
    // Raising an inactive support value to h̄ leaves [h] unchanged and can
    // only increase Σ α_i h_i.
    const auto cone = fixtures::quarter_cone();
    Mat dirs(2, 2);
    dirs.row(0) = kDown.transpose();
    dirs.row(1) = vec({0.3, -1.0}).normalized().transpose();
    const auto omega = DirectionSet::create(cone, dirs);
    const SupportVector h({1.0, 0.2});
    const auto k = make_wulff(cone, omega, h);
    ASSERT_FALSE(k.facet_active(1));
    const auto mu = DiscreteMeasure::exact(omega, {0.5, 0.5});
    const double raw = functional_I(mu, h, cone, config()).value;
    const double lifted = functional_I(mu, k.effective_h(), cone, config()).value;
    EXPECT_GT(lifted, raw);
}

TEST(NormalizationTest, DoublingMeasureDoublesC) {
    const auto k = fixtures::single_facet(fixtures::quarter_cone(), kDown, 1.0);
    const auto mu = DiscreteMeasure::exact(k.omega(), {0.2});
    const auto mu2 = DiscreteMeasure::exact(k.omega(), {0.4});
    const MCEstimate c1 = normalization_c(k, mu, config());
    const MCEstimate c2 = normalization_c(k, mu2, config());
    EXPECT_NEAR(c2.value, 2.0 * c1.value, 1e-12);
    EXPECT_NEAR(c1.value, 0.2 / oracle::gamma_quarter(1.0), 3.0 * c1.std_err + 1e-9);
}

TEST(NormalizationTest, NegligibleVolumeIsRejected) {
    const auto k = fixtures::single_facet(fixtures::octant(), vec({-1.0, -1.0, -1.0}).normalized(), 12.0);
    const auto mu = DiscreteMeasure::exact(k.omega(), {1.0});
    try {
        normalization_c(k, mu, config(20000));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroVolume);
    }
}
