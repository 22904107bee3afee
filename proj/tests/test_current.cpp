#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <map>
#include <set>

#include "xyloops/current.hpp"
#include "xyloops/heights.hpp"

using namespace xyl;

namespace {

double ratio_i(int k, double beta) { return boost::math::cyl_bessel_i(k, beta) / boost::math::cyl_bessel_i(0, beta); }

// <sigma_0^k conj(sigma_j)^k> on an n-cycle by the character expansion.
double cycle_correlator(int n, int j, int k, double beta) {
    double z = 0, c = 0;
    for (int m = -60; m <= 60; ++m) {
        double a = boost::math::cyl_bessel_i(m, beta), b = boost::math::cyl_bessel_i(m + k, beta);
        z += std::pow(a, n);
        c += std::pow(a, n - j) * std::pow(b, j);
    }
    return c / z;
}

Current lap(const PlanarGraph& g, int face, int times) {
    Current n(std::size_t(g.num_half_edges()), 0);
    for (int h : g.face_walk(face)) n[std::size_t(h)] = times;
    return n;
}

}  // namespace

TEST(Divergence, Examples) {
    PlanarGraph g = single_edge();
    EXPECT_EQ(divergence(g, {0, 0}), (SourceFunction{0, 0}));
    EXPECT_EQ(divergence(g, {1, 0}), (SourceFunction{1, -1}));
    PlanarGraph c = cycle_graph(4);
    EXPECT_TRUE(is_sourceless(c, lap(c, c.inner_faces().front(), 1)));
}

TEST(WeightLog, Examples) {
    PlanarGraph g = single_edge();
    EXPECT_EQ(weight_log(g, {0, 0}, 2.0), 0.0);
    EXPECT_NEAR(weight_log(g, {1, 0}, 2.0), 0.0, 1e-15);
    EXPECT_NEAR(weight_log(g, {2, 0}, 2.0), std::log(0.5), 1e-15);
}

TEST(Height, ZeroAndLaps) {
    PlanarGraph g = cycle_graph(4);
    int f = g.inner_faces().front();
    HeightField zero = height_from_current(g, Current(std::size_t(g.num_half_edges()), 0));
    for (long h : zero) EXPECT_EQ(h, 0);
    HeightField one = height_from_current(g, lap(g, f, 1));
    EXPECT_EQ(one[std::size_t(f)], 1);
    EXPECT_EQ(one[std::size_t(g.outer_face())], 0);
    EXPECT_EQ(height_from_current(g, lap(g, f, 2))[std::size_t(f)], 2);
}

TEST(Height, SourcedCurrentIsRejected) {
    PlanarGraph g = cycle_graph(4);
    Current n(std::size_t(g.num_half_edges()), 0);
    n[0] = 1;
    EXPECT_THROW(height_from_current(g, n), ConsistencyError);
}

TEST(Height, TreeChoiceDoesNotMatter) {
    PlanarGraph g = box_lattice(2, 2);
    SourceFunction zero(std::size_t(g.num_vertices()), 0);
    int checked = 0;
    enumerate_currents(g, zero, 1, [&](const Current& n) {
        EXPECT_EQ(height_from_current(g, n), height_from_current_dfs(g, n));
        ++checked;
    });
    EXPECT_GT(checked, 100);
}

TEST(GradientAmplitude, Examples) {
    // a single edge carrying (2,1) is sourced; the doubled edge gives a sourceless example
    PlanarGraph d = doubled_edge();
    Current n = {2, 1, 1, 2};
    ASSERT_TRUE(is_sourceless(d, n));
    auto s = gradient_amplitude_split(d, n);
    EXPECT_EQ(s.grad[0], 1);
    EXPECT_EQ(s.X[0], 1);

    PlanarGraph c = cycle_graph(4);
    auto one = gradient_amplitude_split(c, lap(c, c.inner_faces().front(), 1));
    for (int e = 0; e < c.num_edges(); ++e) {
        EXPECT_EQ(one.grad[std::size_t(e)], 1);
        EXPECT_EQ(one.X[std::size_t(e)], 0);
    }
}

TEST(GradientAmplitude, RoundTrip) {
    for (const PlanarGraph& g : {cycle_graph(4), theta_graph(), box_lattice(2, 1)}) {
        SourceFunction zero(std::size_t(g.num_vertices()), 0);
        enumerate_currents(g, zero, 2, [&](const Current& n) {
            auto s = gradient_amplitude_split(g, n);
            auto amp = amplitude(g, n);
            for (int e = 0; e < g.num_edges(); ++e) EXPECT_EQ(amp[std::size_t(e)], s.grad[std::size_t(e)] + 2 * s.X[std::size_t(e)]);
            EXPECT_EQ(assemble(g, height_from_current(g, n), s.X), n);
        });
    }
}

TEST(GradientAmplitude, AssembleRejectsNegativeX) {
    PlanarGraph g = cycle_graph(4);
    HeightField h(std::size_t(g.num_faces()), 0);
    EXPECT_ANY_THROW(assemble(g, h, {0, -1, 0, 0}));
}

TEST(Enumerate, SingleEdgeExamples) {
    PlanarGraph g = single_edge();
    std::set<Current> got;
    enumerate_currents(g, {0, 0}, 2, [&](const Current& n) { got.insert(n); });
    EXPECT_EQ(got, (std::set<Current>{{0, 0}, {1, 1}, {2, 2}}));
    got.clear();
    enumerate_currents(g, {1, -1}, 2, [&](const Current& n) { got.insert(n); });
    EXPECT_EQ(got, (std::set<Current>{{1, 0}, {2, 1}}));
}

TEST(Enumerate, CutoffZeroGivesZeroCurrent) {
    PlanarGraph g = theta_graph();
    int count = 0;
    enumerate_currents(g, SourceFunction(std::size_t(g.num_vertices()), 0), 0, [&](const Current& n) {
        for (int x : n) EXPECT_EQ(x, 0);
        ++count;
    });
    EXPECT_EQ(count, 1);
}

TEST(Enumerate, MatchesBruteForce) {
    PlanarGraph g = path_graph(3);
    SourceFunction phi = {1, 0, -1};
    std::set<Current> got;
    enumerate_currents(g, phi, 2, [&](const Current& n) { got.insert(n); });
    std::set<Current> brute;
    Current n(4, 0);
    for (n[0] = 0; n[0] <= 2; ++n[0])
        for (n[1] = 0; n[1] <= 2; ++n[1])
            for (n[2] = 0; n[2] <= 2; ++n[2])
                for (n[3] = 0; n[3] <= 2; ++n[3])
                    if (divergence(g, n) == phi) brute.insert(n);
    EXPECT_EQ(got, brute);
}

TEST(Enumerate, GuardRefusesLargeSpaces) {
    PlanarGraph g = box_lattice(4, 4);
    SourceFunction zero(std::size_t(g.num_vertices()), 0);
    EXPECT_THROW(enumerate_currents(g, zero, 6, [](const Current&) {}), GuardError);
}

TEST(Correlators, SingleEdgeApproachesBesselRatio) {
    PlanarGraph g = single_edge();
    for (double beta : {0.5, 1.0, 2.0}) {
        double prev_width = 1e9;
        for (int cutoff : {4, 8, 16}) {
            auto r = partition_and_correlators(g, beta, 0, 1, 1, cutoff);
            EXPECT_LE(r.lower, ratio_i(1, beta) + 1e-15);
            EXPECT_GE(r.upper, ratio_i(1, beta) - 1e-15);
            EXPECT_LE(r.upper - r.lower, prev_width);
            prev_width = r.upper - r.lower;
        }
        EXPECT_LT(prev_width, 1e-8);
    }
}

TEST(Correlators, PowerZeroIsOne) {
    auto r = partition_and_correlators(cycle_graph(4), 1.0, 0, 2, 0, 8);
    EXPECT_NEAR(r.ratio, 1.0, 1e-15);
}

TEST(Correlators, CycleMatchesCharacterExpansion) {
    PlanarGraph g = cycle_graph(4);
    for (double beta : {0.5, 1.0, 2.0})
        for (int j : {1, 2})
            for (int k : {1, 2}) {
                int cutoff = cutoff_for_tolerance(g, beta, 1e-12);
                auto r = partition_and_correlators(g, beta, 0, j, k, cutoff);
                EXPECT_NEAR(r.ratio, cycle_correlator(4, j, k, beta), 1e-8) << beta << " " << j << " " << k;
                EXPECT_TRUE(r.certified);
            }
}

TEST(Truncation, TailBoundsOmittedMass) {
    // Mass added by raising the cutoff never exceeds the tail bound of the smaller cutoff.
    for (const PlanarGraph& g : {single_edge(), cycle_graph(4), theta_graph()})
        for (double beta : {0.5, 2.0}) {
            SourceFunction zero(std::size_t(g.num_vertices()), 0);
            for (int c : {1, 2, 3, 4}) {
                TruncatedSum small = partition_function(g, beta, zero, c);
                TruncatedSum big = partition_function(g, beta, zero, 20);
                EXPECT_LE(big.value - small.value, small.tail_bound * (1 + 1e-12) + 1e-300);
                EXPECT_GE(big.value, small.value);
            }
        }
}

TEST(Gibbs, HeightAggregationReproducesBesselWeights) {
    PlanarGraph g = theta_graph();
    const double beta = 1.0;
    const int cutoff = 10;
    SourceFunction zero(std::size_t(g.num_vertices()), 0);
    std::map<HeightField, double> by_height;
    enumerate_currents(g, zero, cutoff, [&](const Current& n) {
        by_height[height_from_current(g, n)] += std::exp(weight_log(g, n, beta));
    });
    HeightField flat(std::size_t(g.num_faces()), 0);
    double base = by_height.at(flat), base_gibbs = gibbs_height_log_weight(g, flat, beta);
    int compared = 0;
    for (const auto& [h, w] : by_height) {
        long mx = 0;
        for (long x : h) mx = std::max(mx, std::labs(x));
        if (mx > 2) continue;
        double expected = std::exp(gibbs_height_log_weight(g, h, beta) - base_gibbs);
        EXPECT_NEAR(w / base, expected, 1e-9 * expected);
        ++compared;
    }
    EXPECT_GE(compared, 9);
}

TEST(Gibbs, GradientTailBound) {
    PlanarGraph g = theta_graph();
    for (double beta : {0.5, 1.0, 2.0}) {
        HeightLaw law = exact_height_law(g, beta, 14);
        for (int e = 0; e < g.num_edges(); ++e) {
            std::map<long, double> p;
            for (const auto& [hs, pr] : law.prob) {
                HeightField h(std::size_t(g.num_faces()), 0);
                for (std::size_t i = 0; i < law.faces.size(); ++i) h[std::size_t(law.faces[i])] = hs[i];
                p[std::labs(h[std::size_t(g.left_face(2 * e))] - h[std::size_t(g.right_face(2 * e))])] += pr;
            }
            for (const auto& [l, pr] : p) {
                if (l == 0) continue;
                EXPECT_LE(pr, 2 * ratio_i(int(l), beta * g.coupling(e)) + 1e-14) << "l=" << l;
            }
        }
    }
}
