#include <gtest/gtest.h>

#include <cmath>

#include "xyloops/battery.hpp"
#include "xyloops/inequality.hpp"
#include "xyloops/quadrature.hpp"

using namespace xyl;

TEST(Reports, PassRule) {
    EXPECT_TRUE(make_report("x", "y", 0.0, 0.0).passed);
    EXPECT_TRUE(make_report("x", "y", -1e-10, 1e-9).passed);
    EXPECT_FALSE(make_report("x", "y", -1e-8, 1e-9).passed);
}

TEST(Oracle, CurrentSumsAgreeWithQuadrature) {
    for (const PlanarGraph& g : {triangle_graph(), cycle_graph(4), complete_graph4()})
        for (double beta : {0.5, 2.0}) {
            ExactValue v = exact_two_point(g, beta, 0, 1);
            EXPECT_TRUE(v.cross_checked);
            EXPECT_LE(v.oracle_gap, kOracleTolerance);
            EXPECT_NEAR(v.value, quad_two_point(g, beta, 0, 1), kOracleTolerance);
        }
}

TEST(Oracle, CycleCharacterExpansionValues) {
    // frozen from the character expansion evaluated with Boost
    PlanarGraph g = cycle_graph(4);
    struct Row {
        double beta, c1, c2, d1, d2;
    };
    for (const Row& r : {Row{0.5, 0.25542748300858215, 0.11690922776761756, 0.03329187279594132, 0.0052229346489934261},
                         Row{1.0, 0.50519653976758372, 0.37336783750693808, 0.1386723966096641, 0.058184746222585043},
                         Row{2.0, 0.77956092269243482, 0.71385084391283227, 0.40228157535740189, 0.28727342276584578}}) {
        ExactOracle o(g, r.beta);
        EXPECT_NEAR(o.two_point(0, 1).value, r.c1, 1e-9);
        EXPECT_NEAR(o.two_point(0, 2).value, r.c2, 1e-9);
        EXPECT_NEAR(o.correlator(point_sources(g, 0, 1, 2)).value, r.d1, 1e-9);
        EXPECT_NEAR(o.correlator(point_sources(g, 0, 2, 2)).value, r.d2, 1e-9);
    }
}

TEST(Oracle, ZeroCouplingUsesQuadrature) {
    PlanarGraph g = complete_graph4();
    std::vector<char> keep(std::size_t(g.num_edges()), 1);
    keep[0] = 0;
    PlanarGraph h = edge_subgraph(g, keep);
    EXPECT_EQ(h.num_edges(), g.num_edges() - 1);
    ExactValue v = exact_two_point(h, 1.0, 0, 1);
    EXPECT_GT(v.value, 0.0);
    EXPECT_LT(v.value, 1.0);
}

TEST(Subgraphs, InducedKeepsMapping) {
    PlanarGraph g = complete_graph4();
    Subgraph s = induced_subgraph(g, {0, 2, 3});
    EXPECT_EQ(s.graph.num_vertices(), 3);
    EXPECT_EQ(s.graph.num_edges(), 3);
    EXPECT_EQ(s.to_sub[1], -1);
    for (int v = 0; v < 3; ++v) EXPECT_EQ(s.to_sub[std::size_t(s.to_parent[std::size_t(v)])], v);
}

TEST(Inequalities, Squares) {
    for (const PlanarGraph& g : {single_edge(), cycle_graph(4), theta_graph()})
        for (double beta : {0.5, 1.0, 2.0}) {
            CheckReport r = check_squares(g, beta, 0, 1);
            EXPECT_TRUE(r.passed) << r.instance << " " << r.margin;
        }
}

TEST(Inequalities, GinibreMonotonicity) {
    CheckReport r = check_ginibre_monotonicity(cycle_graph(4), 1.0, 0, {0.25, 0.5, 1.0, 2.0});
    EXPECT_TRUE(r.passed) << r.margin;
}

TEST(Inequalities, LiebRivasseau) {
    PlanarGraph g = path_graph(4);
    CheckReport r = check_lieb_rivasseau(g, {0, 1}, 1.0, 0, 3);
    EXPECT_TRUE(r.passed) << r.margin;
    // On a path with H = {a}, the boundary is a itself and the bound is an equality.
    CheckReport eq = check_lieb_rivasseau(path_graph(3), {0}, 1.0, 0, 2);
    EXPECT_NEAR(eq.margin, 0.0, 1e-9);
}

TEST(Inequalities, MirrorOnSmallBoxes) {
    for (const PlanarGraph& box : {box_lattice(2, 2), box_lattice(3, 1)}) {
        CheckReport r = check_mirror_exact(box, 1.0);
        EXPECT_TRUE(r.passed) << r.instance << " " << r.margin;
    }
}

TEST(Inequalities, RandomizedSuite) {
    auto reports = randomized_suite(123, 15, {0.5, 1.0, 2.0});
    EXPECT_GT(reports.size(), 15u);
    for (const auto& r : reports) EXPECT_TRUE(r.passed) << r.name << " " << r.instance << " " << r.margin;
    auto again = randomized_suite(123, 15, {0.5, 1.0, 2.0});
    ASSERT_EQ(again.size(), reports.size());
    for (std::size_t i = 0; i < reports.size(); ++i) EXPECT_EQ(again[i].margin, reports[i].margin);
}

TEST(OracleBattery, AllChecksPass) {
    for (const auto& r : oracle_battery()) EXPECT_TRUE(r.passed) << r.name << " " << r.instance << " " << r.margin;
}
