#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>

#include "xyloops/bessel.hpp"
#include "xyloops/bkt.hpp"

using namespace xyl;

namespace {

ChainSpec make_spec(std::uint64_t seed, long burn, long samples) {
    ChainSpec s;
    s.seed = seed;
    s.burn_in = burn;
    s.samples = samples;
    return s;
}

}  // namespace

TEST(DecayFit, PicksExponentialForExponentialData) {
    std::vector<double> r, c;
    for (int i = 1; i <= 8; ++i) {
        r.push_back(i);
        c.push_back(0.9 * std::exp(-0.7 * i));
    }
    DecayFit f = decay_fit(r, c);
    EXPECT_EQ(f.model, DecayModel::Exponential);
    EXPECT_NEAR(f.exp_rate, 0.7, 1e-12);
    EXPECT_NEAR(f.exp_residual, 0.0, 1e-12);
    EXPECT_TRUE(f.floor_margin.empty());
}

TEST(DecayFit, PicksPowerForPowerData) {
    std::vector<double> r, c;
    for (int i = 1; i <= 8; ++i) {
        r.push_back(i);
        c.push_back(0.8 * std::pow(i, -0.25));
    }
    DecayFit f = decay_fit(r, c);
    EXPECT_EQ(f.model, DecayModel::Power);
    EXPECT_NEAR(f.power_exponent, 0.25, 1e-12);
    EXPECT_EQ(f.floor_margin.size(), 8u);
    EXPECT_EQ(to_string(f.model), "power");
}

TEST(DecayFit, DropsNonpositiveAndNeedsFourPoints) {
    DecayFit f = decay_fit({1, 2, 3, 4, 5}, {0.5, 0.3, -0.01, 0.1, 0.05});
    ASSERT_EQ(f.excluded.size(), 1u);
    EXPECT_EQ(f.excluded[0], 2);
    EXPECT_ANY_THROW(decay_fit({1, 2, 3}, {0.5, 0.3, 0.1}));
}

TEST(Thresholds, TriangulationCondition) {
    double thr = triangulation_threshold();
    double q = boost::math::cyl_bessel_i(1, thr / 2) / boost::math::cyl_bessel_i(0, thr / 2);
    EXPECT_NEAR(q * q, 0.5, 1e-12);
    EXPECT_NEAR(thr, 4.1164307918167093, 1e-10);
    EXPECT_LT(lammers_condition_triangulation(thr - 0.01), 0.0);
    EXPECT_GT(lammers_condition_triangulation(thr + 0.01), 0.0);
}

TEST(Phi, ExactAgreesWithChainOnSmallBox) {
    PlanarGraph box = box_lattice(2, 2);
    ExactValue exact = phi_exact(box, 1.0);
    Estimate est = phi_estimate(box, 1.0, make_spec(4, 500, 30000));
    EXPECT_LE(std::abs(est.mean - exact.value), 4 * est.std_error + exact.error);
    // eight boundary neighbors of the center, each correlator in (0, 1)
    EXPECT_GT(exact.value, 0.0);
    EXPECT_LT(exact.value, 8.0);
}

TEST(Phi, IncreasesWithBeta) {
    PlanarGraph box = box_lattice(2, 2);
    double prev = 0;
    for (double beta : {0.25, 0.5, 1.0, 2.0}) {
        double v = phi_exact(box, beta).value;
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(ChiCut, ExactAndEstimateAgree) {
    PlanarGraph box = box_lattice(2, 2);
    CutPath cut = box_cut(box);
    ChiCut exact = chi_cut_exact(box, 1.0, 0.5, cut);
    ChiCut est = chi_cut(box, 1.0, 0.5, cut, make_spec(6, 500, 30000));
    EXPECT_EQ(exact.pairs, est.pairs);
    EXPECT_GT(exact.pairs, 0);
    EXPECT_LE(std::abs(exact.value - est.value), 4 * est.std_error + 1e-9);
}

TEST(ChiCut, DegenerateExponent) {
    PlanarGraph box = box_lattice(2, 2);
    ChiCut c = chi_cut_exact(box, 1.0, 2.0, box_cut(box));
    EXPECT_TRUE(c.degenerate);
}

TEST(AxisCorrelator, DecreasesWithDistance) {
    PlanarGraph box = box_lattice(7, 7);
    auto pts = axis_correlator(box, 0.5, make_spec(3, 300, 5000), 4);
    ASSERT_EQ(pts.size(), 4u);
    for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(pts[i].r, int(i) + 1);
    EXPECT_GT(pts[0].corr.mean, pts[3].corr.mean);
    // nearest neighbor correlator at high temperature is close to I_1/I_0
    double q = bessel_i_scaled(1, 0.5) / bessel_i_scaled(0, 0.5);
    EXPECT_NEAR(pts[0].corr.mean, q, 0.05);
}

TEST(Bracket, OrdersBetaGrid) {
    BetaBracket b = bracket_beta_c({3}, {0.2, 3.0}, make_spec(7, 300, 5000));
    EXPECT_EQ(b.rows.size(), 2u);
    EXPECT_TRUE(b.lo_found);
    EXPECT_TRUE(b.hi_found);
    EXPECT_LE(b.beta_lo, b.beta_hi);
}

TEST(AbsHeight, GrowsWithBetaOnSmallBox) {
    PlanarGraph box = box_lattice(3, 3);
    int f = box_center_face(box);
    Estimate lo = abs_height_estimate(box, 0.5, make_spec(1, 200, 5000), f);
    Estimate hi = abs_height_estimate(box, 3.0, make_spec(1, 200, 5000), f);
    EXPECT_GT(hi.mean, lo.mean);
}
