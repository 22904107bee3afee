#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <set>

#include "xyloops/graph_io.hpp"
#include "xyloops/planar_graph.hpp"

using namespace xyl;

namespace {

void expect_face_partition(const PlanarGraph& g) {
    std::multiset<int> seen;
    for (int f = 0; f < g.num_faces(); ++f)
        for (int h : g.face_walk(f)) {
            seen.insert(h);
            EXPECT_EQ(g.left_face(h), f);
        }
    ASSERT_EQ(int(seen.size()), g.num_half_edges());
    for (int h = 0; h < g.num_half_edges(); ++h) {
        EXPECT_EQ(seen.count(h), 1u) << "half-edge " << h;
        EXPECT_EQ(g.left_face(h), g.right_face(PlanarGraph::twin(h)));
        EXPECT_EQ(PlanarGraph::twin(PlanarGraph::twin(h)), h);
        EXPECT_NE(PlanarGraph::twin(h), h);
    }
}

void expect_euler(const PlanarGraph& g) {
    EXPECT_EQ(g.num_vertices() - g.num_edges() + g.num_faces(), 1 + g.num_components());
}

}  // namespace

TEST(PlanarGraph, SingleEdgeHasOneFace) {
    PlanarGraph g = single_edge();
    EXPECT_EQ(g.num_vertices(), 2);
    EXPECT_EQ(g.num_edges(), 1);
    EXPECT_EQ(g.num_faces(), 1);
    expect_face_partition(g);
}

TEST(PlanarGraph, CycleHasInnerAndOuterFace) {
    PlanarGraph g = cycle_graph(4);
    EXPECT_EQ(g.num_faces(), 2);
    EXPECT_EQ(g.inner_faces().size(), 1u);
    expect_face_partition(g);
    expect_euler(g);
}

TEST(PlanarGraph, BoxCounts) {
    PlanarGraph b11 = box_lattice(1, 1);
    EXPECT_EQ(b11.num_vertices(), 4);
    EXPECT_EQ(b11.num_edges(), 4);
    EXPECT_EQ(b11.num_faces(), 2);

    PlanarGraph b22 = box_lattice(2, 2);
    EXPECT_EQ(b22.num_vertices(), 9);
    EXPECT_EQ(b22.num_edges(), 12);
    EXPECT_EQ(b22.num_faces(), 5);

    PlanarGraph b31 = box_lattice(3, 1);
    EXPECT_EQ(b31.num_vertices(), 8);
    EXPECT_EQ(b31.num_edges(), 10);
    EXPECT_EQ(b31.num_faces(), 4);

    for (const PlanarGraph* g : {&b11, &b22, &b31}) {
        expect_face_partition(*g);
        expect_euler(*g);
    }
}

TEST(PlanarGraph, OuterFaceIsLongestWalk) {
    PlanarGraph g = box_lattice(3, 2);
    std::size_t longest = 0;
    for (int f = 0; f < g.num_faces(); ++f) longest = std::max(longest, g.face_walk(f).size());
    EXPECT_EQ(g.face_walk(g.outer_face()).size(), longest);
    EXPECT_EQ(longest, 10u);
}

TEST(PlanarGraph, RotationIsPermutationOfOrigins) {
    PlanarGraph g = box_lattice(3, 3);
    for (int v = 0; v < g.num_vertices(); ++v)
        for (int h : g.rotation(v)) {
            EXPECT_EQ(g.origin(h), v);
            EXPECT_EQ(g.rot_prev(g.rot_next(h)), h);
        }
}

TEST(PlanarGraph, TriangulationHasTrivalentInnerDual) {
    for (auto [n, m] : {std::pair{1, 1}, std::pair{2, 2}, std::pair{3, 2}}) {
        PlanarGraph t = triangulate_square_lattice(box_lattice(n, m));
        expect_face_partition(t);
        expect_euler(t);
        std::vector<bool> merged(std::size_t(t.num_vertices()), false);
        for (int v = t.box()->lattice_vertices; v < t.num_vertices(); ++v) merged[std::size_t(v)] = true;
        for (int f : t.inner_faces()) EXPECT_EQ(t.merged_face_degree(f, merged), 3) << "face " << f;
        EXPECT_EQ(int(t.inner_faces().size()), 2 * n * m);
        for (int e = 0; e < t.num_edges(); ++e) EXPECT_DOUBLE_EQ(t.coupling(e), 0.5);
    }
}

TEST(PlanarGraph, TriangulationRejectsNonBox) {
    EXPECT_THROW(triangulate_square_lattice(cycle_graph(4)), UnsupportedGraph);
}

TEST(PlanarGraph, Subdivision) {
    PlanarGraph g = cycle_graph(4);
    PlanarGraph s1 = subdivide_edges(g, 1);
    EXPECT_EQ(s1.num_vertices(), 4);
    EXPECT_EQ(s1.num_edges(), 4);
    EXPECT_EQ(s1.num_faces(), 2);

    PlanarGraph s2 = subdivide_edges(g, 2);
    EXPECT_EQ(s2.num_vertices(), 8);
    EXPECT_EQ(s2.num_edges(), 8);
    EXPECT_EQ(s2.num_faces(), 2);
    expect_face_partition(s2);

    PlanarGraph p = subdivide_edges(single_edge(), 3);
    EXPECT_EQ(p.num_vertices(), 4);
    EXPECT_EQ(p.num_edges(), 3);
    EXPECT_EQ(p.num_faces(), 1);
}

TEST(PlanarGraph, ParallelEdges) {
    PlanarGraph g = parallelize_edges(single_edge(), 4);
    EXPECT_EQ(g.num_edges(), 4);
    EXPECT_EQ(g.num_faces(), 4);
    expect_face_partition(g);
    expect_euler(g);
}

TEST(PlanarGraph, DualTreeReachesEveryFace) {
    PlanarGraph g = box_lattice(3, 3);
    auto tree = dual_bfs_tree(g);
    for (int f = 0; f < g.num_faces(); ++f) {
        if (f == g.outer_face()) {
            EXPECT_EQ(tree[std::size_t(f)], -1);
        } else {
            ASSERT_GE(tree[std::size_t(f)], 0);
            EXPECT_EQ(g.left_face(tree[std::size_t(f)]), f);
        }
    }
}

TEST(PlanarGraph, BoxCutSeparatesCenterFace) {
    for (int L : {2, 3, 4}) {
        PlanarGraph g = box_lattice(L, L);
        CutPath cut = box_cut(g);
        EXPECT_FALSE(cut.plus_side.empty());
        EXPECT_FALSE(cut.minus_side.empty());
        for (int a : cut.plus_side)
            for (int b : cut.minus_side) EXPECT_NE(a, b);
        EXPECT_TRUE(validate_cut(g, cut, 12));
    }
}

TEST(GraphIo, RoundTrip) {
    PlanarGraph g = box_lattice(2, 1, 1.5);
    PlanarGraph h = graph_from_json(graph_to_json(g));
    EXPECT_EQ(h.num_vertices(), g.num_vertices());
    EXPECT_EQ(h.num_edges(), g.num_edges());
    EXPECT_EQ(h.num_faces(), g.num_faces());
    for (int e = 0; e < h.num_edges(); ++e) EXPECT_DOUBLE_EQ(h.coupling(e), 1.5);
}

TEST(GraphIo, ParsesTriangle) {
    auto j = nlohmann::json::parse(R"({
        "vertices": ["a", "b", "c"],
        "rotation": {"a": ["b", "c"], "b": ["c", "a"], "c": ["a", "b"]},
        "couplings": {"a-b": 1.0, "b-c": 2.0, "a-c": 0.5}
    })");
    PlanarGraph g = graph_from_json(j);
    EXPECT_EQ(g.num_vertices(), 3);
    EXPECT_EQ(g.num_edges(), 3);
    EXPECT_EQ(g.num_faces(), 2);
}

TEST(GraphIo, NonpositiveCouplingNamesEdge) {
    auto j = nlohmann::json::parse(R"({
        "vertices": ["a", "b"],
        "rotation": {"a": ["b"], "b": ["a"]},
        "couplings": {"a-b": -1}
    })");
    try {
        graph_from_json(j);
        FAIL() << "expected a validation error";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("a-b"), std::string::npos) << e.what();
    }
}

TEST(GraphIo, InconsistentRotationIsEmbeddingError) {
    auto j = nlohmann::json::parse(R"({
        "vertices": ["a", "b", "c"],
        "rotation": {"a": ["b"], "b": ["c"], "c": []},
        "couplings": {"a-b": 1, "b-c": 1}
    })");
    EXPECT_ANY_THROW(graph_from_json(j));
}
