#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>

#include "xyloops/battery.hpp"
#include "xyloops/coloured.hpp"
#include "xyloops/quadrature.hpp"

using namespace xyl;

namespace {

double ratio_i(int k, double beta) { return boost::math::cyl_bessel_i(k, beta) / boost::math::cyl_bessel_i(0, beta); }

}  // namespace

TEST(Coloured, CountFormulaMatchesEnumeration) {
    PlanarGraph g = triangle_graph();
    Current r(6, 0), b(6, 0);
    r[0] = 1;  // one red unit on edge 0
    b[2] = 1;
    b[4] = 1;
    for (const VertexSet& S : {VertexSet{}, VertexSet{0}, VertexSet{0, 1, 2}}) {
        double formula = coloured_count_formula(g, r, b, S);
        double factored = enumerate_coloured_count(g, r, b, S);
        long explicit_count = 0;
        enumerate_coloured(g, r, b, S, [&](const ColouredConfig& cfg) {
            validate_coloured(g, cfg);
            EXPECT_EQ(red_current(g, cfg), r);
            EXPECT_EQ(blue_current(g, cfg), b);
            ++explicit_count;
        });
        EXPECT_EQ(formula, factored);
        EXPECT_EQ(formula, double(explicit_count));
    }
}

TEST(Coloured, ExpansionOnTriangle) {
    PlanarGraph g = triangle_graph();
    Current r(6, 1), b(6, 0);
    b[1] = b[3] = b[5] = 1;
    for (const VertexSet& S : {VertexSet{}, VertexSet{1}}) {
        auto c = verify_loopexp1(g, r, b, S, 0.9);
        EXPECT_LE(c.rel_residual, 1e-12);
        EXPECT_GT(c.configs, 0.0);
    }
}

TEST(Coloured, BinomialSplitSumsOverSubcurrents) {
    PlanarGraph g = single_edge();
    // n = (3, 1); r with div r = (1,-1): r in {(1,0), (2,1)}, C(3,1)C(1,0) + C(3,2)C(1,1) = 6
    auto [total, weighted] = binomial_split_sum(g, {3, 1}, {1, -1}, 0);
    EXPECT_EQ(total, 6.0);
    EXPECT_EQ(weighted, 3.0 * 1 + 3.0 * 2);
}

TEST(DoubleSwitch, SingleEdgeClosedForm) {
    PlanarGraph g = single_edge();
    for (double beta : {0.5, 1.0, 2.0}) {
        auto s = double_switch_verify(g, beta, 0, 1, cutoff_for_tolerance(g, 2 * beta, 1e-10));
        double q = ratio_i(1, beta);
        EXPECT_NEAR(s.loop_value.mid(), q * q, 1e-8) << beta;
        EXPECT_NEAR(s.correlator.ratio, q * q, 1e-8) << beta;
        EXPECT_TRUE(s.sandwich);
    }
    // (I_1/I_0)^2 frozen from Boost
    auto s1 = double_switch_verify(g, 1.0, 0, 1, cutoff_for_tolerance(g, 2.0, 1e-10));
    EXPECT_NEAR(s1.loop_value.mid(), 0.19926400165310926, 1e-8);
    auto s2 = double_switch_verify(g, 2.0, 0, 1, cutoff_for_tolerance(g, 4.0, 1e-10));
    EXPECT_NEAR(s2.loop_value.mid(), 0.48688947329678828, 1e-8);
}

TEST(Ferromagnet, MarginsNonnegative) {
    for (const auto& [g, a, b, c] : std::vector<std::tuple<PlanarGraph, int, int, int>>{
             {path_graph(3), 0, 2, 1}, {triangle_graph(), 0, 1, 2}, {complete_graph4(), 0, 1, 2}}) {
        for (double beta : {0.5, 2.0}) {
            auto f = ferromagnet_verify(g, beta, a, b, c, cutoff_for_tolerance(g, beta, 1e-12));
            EXPECT_GE(f.first_margin, -f.enclosure - kExactTolerance);
            EXPECT_GE(f.second_margin, -f.enclosure - kExactTolerance);
            EXPECT_LE(f.oracle_gap, kOracleTolerance);
            EXPECT_TRUE(f.passed);
        }
    }
}

TEST(Ferromagnet, PathFactorizesThroughMiddle) {
    // On a path a-c-b the first margin is zero: <ab> = <ac><cb>.
    PlanarGraph g = path_graph(3);
    auto f = ferromagnet_verify(g, 1.0, 0, 2, 1, cutoff_for_tolerance(g, 1.0, 1e-12));
    EXPECT_NEAR(f.first_margin, 0.0, 1e-9);
    EXPECT_NEAR(f.ac, ratio_i(1, 1.0), 1e-9);
}

TEST(Derivative, IdentityOnSingleEdge) {
    PlanarGraph g = single_edge();
    auto d = derivative_identity_check(g, 1.0, 0, 1, 0, 24);
    // d/dJ of I_1(J)/I_0(J) at J=1 equals 1 - q/J - q^2 with q = I_1/I_0
    double q = ratio_i(1, 1.0);
    EXPECT_NEAR(d.lhs, 1 - q - q * q, 1e-6);
    EXPECT_LE(d.residual, 1e-6);
    EXPECT_LE(d.rhs_bound, 1e-6);
}

TEST(ColouredBattery, AllChecksPass) {
    auto reports = coloured_battery();
    EXPECT_GT(reports.size(), 30u);
    for (const auto& r : reports) EXPECT_TRUE(r.passed) << r.name << " " << r.instance << " " << r.margin;
}
