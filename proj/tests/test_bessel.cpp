#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>

#include "xyloops/bessel.hpp"
#include "xyloops/bkt.hpp"
#include "xyloops/rng.hpp"
#include "xyloops/stats.hpp"

using namespace xyl;

namespace {

// Independent oracle: Boost's I_nu times exp(-beta).
double boost_scaled(int k, double beta) { return boost::math::cyl_bessel_i(double(std::abs(k)), beta) * std::exp(-beta); }

// Defining power series in long double, for the relative-error contract.
long double series_scaled(int k, long double beta) {
    k = std::abs(k);
    long double h = beta / 2, term = std::pow(h, k) / std::tgamma((long double)(k + 1)), sum = 0;
    for (int i = 0; i < 400; ++i) {
        sum += term;
        term *= h * h / ((i + 1.0L) * (i + 1.0L + k));
        if (term < 1e-30L * sum) break;
    }
    return sum * std::exp(-beta);
}

// Frozen by bisection on Boost's Bessel ratio (tests/acceptance recompute it).
constexpr double kLammersThreshold = 1.1593199207501383;
constexpr double kTriangulationThreshold = 4.1164307918167093;

}  // namespace

TEST(Bessel, TrivialValues) {
    EXPECT_EQ(bessel_i_scaled(0, 0.0), 1.0);
    EXPECT_EQ(bessel_i_scaled(3, 0.0), 0.0);
    EXPECT_EQ(bessel_i_scaled(-3, 0.0), 0.0);
}

TEST(Bessel, MatchesBoostAndSeries) {
    for (double beta : {0.01, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0, 30.0})
        for (int k = 0; k <= 40; ++k) {
            double v = bessel_i_scaled(k, beta);
            double s = double(series_scaled(k, beta));
            if (s < 1e-280) continue;
            EXPECT_LE(std::abs(v - s) / s, 1e-13) << "k=" << k << " beta=" << beta;
            EXPECT_LE(std::abs(v - boost_scaled(k, beta)) / boost_scaled(k, beta), 1e-12) << "k=" << k << " beta=" << beta;
        }
}

TEST(Bessel, FrozenValueAtOne) {
    // e^{-1} I_1(1), from the Boost oracle
    EXPECT_NEAR(bessel_i_scaled(1, 1.0), 0.20791041534970847, 1e-15);
    EXPECT_NEAR(bessel_i_scaled(1, 1.0), boost_scaled(1, 1.0), 1e-15);
}

TEST(Bessel, SymmetricAndMonotoneInOrder) {
    for (double beta : {0.3, 1.0, 5.0})
        for (int k = 0; k < 30; ++k) {
            EXPECT_EQ(bessel_i_scaled(k, beta), bessel_i_scaled(-k, beta));
            EXPECT_GE(bessel_i_scaled(k, beta), bessel_i_scaled(k + 1, beta));
            EXPECT_GT(bessel_i_scaled(k, beta), 0.0);
            EXPECT_LE(bessel_i_scaled(k, beta), 1.0);
        }
}

TEST(Bessel, LargeArgumentIsFinite) {
    for (double beta : {700.0, 1e4, 1e6})
        for (int k : {0, 1, 5}) {
            double v = bessel_i_scaled(k, beta);
            // leading asymptotic term (1 - (4k^2 - 1)/(8 beta)) / sqrt(2 pi beta)
            double asym = (1 - (4.0 * k * k - 1) / (8 * beta)) / std::sqrt(2 * M_PI * beta);
            EXPECT_NEAR(v, asym, 1e-3 * asym) << k << " " << beta;
        }
    EXPECT_NEAR(bessel_i_scaled(1, 1e4) / bessel_i_scaled(0, 1e4), 1 - 0.5 / 1e4, 1e-8);
}

TEST(Bessel, LogMatchesValue) {
    for (double beta : {0.5, 2.0, 50.0})
        for (int k : {0, 1, 7})
            EXPECT_NEAR(bessel_i_log(k, beta), std::log(boost::math::cyl_bessel_i(double(k), beta)), 1e-12);
}

TEST(Potential, ConvexAndSymmetric) {
    for (double K : {0.5, 1.0, 2.0, 4.0})
        for (int k = -20; k <= 20; ++k) {
            EXPECT_EQ(potential(k, K), potential(-k, K));
            EXPECT_GE(potential(k - 1, K) - 2 * potential(k, K) + potential(k + 1, K), -1e-12);
        }
    EXPECT_EQ(potential(0, 1.0) - potential(0, 1.0), 0.0);
    EXPECT_NEAR(potential(1, 2.0) - potential(0, 2.0), 0.35985906793679651, 1e-13);
}

TEST(Turan, NonnegativeOnGrid) {
    for (double beta : {0.25, 1.0, 2.0, 4.0})
        for (int k = 0; k <= 50; ++k) EXPECT_GE(turan_margin(k, beta), -1e-15) << k << " " << beta;
    EXPECT_GT(turan_margin(0, 1.0), 0.0);
    EXPECT_NEAR(turan_margin(5, 3.0), 3.1137193196497986e-06, 1e-18);
}

TEST(Turan, VanishesMonotonicallyAsBetaShrinks) {
    // the scaled margin peaks near beta = 1.3 for k = 1; below 1 it shrinks to 0
    for (int k = 1; k <= 4; ++k) {
        double prev = turan_margin(k, 1.0);
        for (double beta = 0.8; beta > 0.01; beta *= 0.8) {
            double cur = turan_margin(k, beta);
            EXPECT_LT(cur, prev);
            prev = cur;
        }
        EXPECT_LT(prev, 1e-3);
    }
}

TEST(Convolution, GridWithinTolerance) {
    for (int k = -5; k <= 5; ++k)
        for (int l = -5; l <= 5; ++l)
            for (double b1 : {0.25, 1.0, 2.0, 4.0})
                for (double b2 : {0.25, 1.0, 2.0, 4.0}) {
                    auto r = convolution_residual(k, l, b1, b2, 40);
                    EXPECT_LE(r.residual + r.tail_bound, 1e-10);
                    EXPECT_TRUE(r.certified);
                }
    EXPECT_LE(convolution_residual(0, 0, 0.5, 0.5, 40).residual, 1e-12);
    EXPECT_LE(convolution_residual(2, 0, 1.0, 2.0, 40).residual, 1e-10);
}

TEST(Convolution, SmallCutoffIsFlagged) {
    auto r = convolution_residual(0, 0, 4.0, 4.0, 2);
    EXPECT_FALSE(r.certified);
    EXPECT_GT(r.tail_bound, 1e-10);
}

TEST(Lammers, MarginLimitsAndThreshold) {
    EXPECT_NEAR(lammers_margin(1e-9), -0.5, 1e-9);
    EXPECT_NEAR(lammers_margin(1e4), 0.5, 1e-4);
    double thr = lammers_threshold();
    EXPECT_NEAR(thr, kLammersThreshold, 1e-10);
    EXPECT_LT(lammers_margin(thr - 1e-6), 0.0);
    EXPECT_GT(lammers_margin(thr + 1e-6), 0.0);
    double prev = lammers_margin(0.01);
    for (double b = 0.1; b < 20; b += 0.1) {
        double cur = lammers_margin(b);
        EXPECT_GT(cur, prev);
        prev = cur;
    }
}

TEST(Lammers, TriangulationThreshold) {
    EXPECT_NEAR(triangulation_threshold(), kTriangulationThreshold, 1e-10);
    EXPECT_NEAR(lammers_condition_triangulation(kTriangulationThreshold), 0.0, 1e-12);
}

TEST(RatioChain, PassesForSmallBeta) {
    for (double beta : {0.2, 1.0}) {
        auto rep = ratio_chain_check(30, beta);
        EXPECT_TRUE(rep.passed) << beta;
        ASSERT_FALSE(rep.rows.empty());
        EXPECT_LE(rep.rows.front().recurrence_residual, 1e-12);
    }
}

TEST(RatioChain, RatioDecreasesInOrder) {
    for (double beta : {0.5, 2.0, 8.0})
        for (int k = 0; k < 30; ++k) {
            double r0 = bessel_i_scaled(k + 1, beta) / bessel_i_scaled(k, beta);
            double r1 = bessel_i_scaled(k + 2, beta) / bessel_i_scaled(k + 1, beta);
            EXPECT_LT(r1, r0);
        }
}

TEST(Yk, NormalizerAndMoments) {
    for (double beta : {0.5, 1.0, 2.0})
        for (int k = 0; k <= 10; ++k) {
            YkDistribution y(k, beta);
            EXPECT_NEAR(y.normalizer_scaled(), boost_scaled(k, beta), 1e-13 * boost_scaled(k, beta));
            double total = 0;
            for (double p : y.probs()) total += p;
            EXPECT_NEAR(total, 1.0, 1e-13);
            for (int r = 1; r <= 4; ++r) {
                double closed = std::pow(beta / 2, r) * boost_scaled(k + r, beta) / boost_scaled(k, beta);
                EXPECT_NEAR(y.falling_moment(r), closed, 1e-10 * closed) << "k=" << k << " r=" << r;
            }
        }
}

TEST(Yk, TinyBetaConcentratesAtZero) {
    YkDistribution y(3, 1e-6);
    CounterRng rng(11);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(y.sample(rng), 0);
}

TEST(Yk, SampleMeansWithinFourSE) {
    {
        YkDistribution y(0, 2.0);
        CounterRng rng(5);
        std::vector<double> xs;
        for (int i = 0; i < 1000000; ++i) xs.push_back(y.sample(rng));
        Estimate e = estimate_series(xs);
        double exact = boost_scaled(1, 2.0) / boost_scaled(0, 2.0);
        EXPECT_LE(std::abs(e.mean - exact), 4 * e.std_error);
    }
    {
        YkDistribution y(3, 1.0);
        CounterRng rng(6);
        std::vector<double> xs;
        for (int i = 0; i < 1000000; ++i) {
            double s = y.sample(rng);
            xs.push_back(s * (s - 1));
        }
        Estimate e = estimate_series(xs);
        double exact = 0.25 * boost_scaled(5, 1.0) / boost_scaled(3, 1.0);
        EXPECT_LE(std::abs(e.mean - exact), 4 * e.std_error);
    }
}

TEST(PoissonTail, UpperBoundsExactTail) {
    for (double mu : {0.25, 1.0, 3.0})
        for (long t : {1L, 3L, 8L}) {
            double exact = 0, p = std::exp(-mu);
            for (long n = 0; n < 200; ++n) {
                if (n >= t) exact += p;
                p *= mu / double(n + 1);
            }
            EXPECT_GE(poisson_upper_tail(mu, t), exact * (1 - 1e-12));
            EXPECT_LE(poisson_upper_tail(mu, t), exact * (1 + 1e-9) + 1e-300);
        }
}
