#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace xyl {

struct EmbeddingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedGraph : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Point {
    double x = 0.0, y = 0.0;
};

struct EdgeInput {
    int u, v;
    double J;
};

// Neighbor-list description of an embedding. neighbors[v] lists the other
// endpoints of the edges at v in counterclockwise order; a neighbor repeated
// k times means k parallel edges. Parallel copies pair up in reverse order of
// appearance at the two endpoints, as in a planar bundle.
struct RotationSpec {
    int num_vertices = 0;
    std::vector<std::vector<int>> neighbors;
    // Key (min(v,w), max(v,w)); one value for all parallel copies or one per
    // copy in the order they appear around min(v,w).
    std::map<std::pair<int, int>, std::vector<double>> couplings;
    std::vector<std::string> labels;  // optional, used in diagnostics
    std::vector<Point> coords;        // optional, empty or one per vertex
    // Optional outer face: the face to the left of the first half-edge from
    // outer_hint->first to outer_hint->second.
    std::optional<std::pair<int, int>> outer_hint;
};

struct BoxInfo {
    int width = 0, height = 0;  // number of unit squares along x and y
    bool triangulated = false;
    int lattice_vertices = 0;   // ids below this are lattice sites; above are midpoints
};

// Finite plane graph stored as a rotation system. Edge e has half-edges 2e
// (from edge_u(e) to edge_v(e)) and 2e+1 (reverse). Faces are traced with the
// face on the left of each half-edge.
class PlanarGraph {
public:
    // rotation[v]: half-edges with origin v in counterclockwise order.
    PlanarGraph(int num_vertices, std::vector<EdgeInput> edges, std::vector<std::vector<int>> rotation,
                std::vector<std::string> labels = {}, std::vector<Point> coords = {},
                std::optional<int> outer_half_edge = std::nullopt);

    int num_vertices() const { return n_; }
    int num_edges() const { return int(edges_.size()); }
    int num_half_edges() const { return 2 * num_edges(); }
    int num_faces() const { return int(faces_.size()); }

    static int twin(int h) { return h ^ 1; }
    static int edge_of(int h) { return h >> 1; }
    int origin(int h) const { return (h & 1) ? edges_[h >> 1].v : edges_[h >> 1].u; }
    int target(int h) const { return origin(h ^ 1); }

    const EdgeInput& edge(int e) const { return edges_[e]; }
    double coupling(int e) const { return edges_[e].J; }
    const std::vector<int>& rotation(int v) const { return rotation_[v]; }
    int degree(int v) const { return int(rotation_[v].size()); }
    int rot_next(int h) const { return rot_next_[h]; }
    int rot_prev(int h) const { return rot_prev_[h]; }
    int face_next(int h) const { return rot_prev_[h ^ 1]; }
    int left_face(int h) const { return face_of_[h]; }
    int right_face(int h) const { return face_of_[h ^ 1]; }
    const std::vector<int>& face_walk(int f) const { return faces_[f]; }
    int outer_face() const { return outer_; }
    std::vector<int> inner_faces() const;

    int num_components() const { return components_; }
    int component(int v) const { return comp_[v]; }
    bool connected() const { return components_ <= 1; }

    bool has_coords() const { return !coords_.empty(); }
    const Point& coord(int v) const { return coords_.at(v); }
    const std::vector<Point>& coords() const { return coords_; }
    std::string label(int v) const;

    const std::optional<BoxInfo>& box() const { return box_; }
    void set_box(BoxInfo b) { box_ = b; }

    // Copy with a different coupling on one edge (J >= 0 allowed here; J = 0
    // switches the edge off for monotonicity scans).
    PlanarGraph with_coupling(int e, double J) const;
    PlanarGraph with_couplings(const std::vector<double>& J) const;
    PlanarGraph with_outer_face(int f) const;

    // Half-edge from u to v, first in rotation order; -1 if absent.
    int find_half_edge(int u, int v) const;
    std::vector<int> neighbors(int v) const;

    // Face containing the point, by even-odd test on inner face polygons.
    int face_containing(Point p) const;
    // A point strictly inside an inner face (centroid, checked); nullopt if none found.
    std::optional<Point> interior_point(int f) const;

    // Number of sides of a face when the listed vertices are treated as
    // interior points of their edges (subdivision midpoints).
    int merged_face_degree(int f, const std::vector<bool>& merged) const;

    const std::vector<EdgeInput>& edges() const { return edges_; }

private:
    int n_;
    std::vector<EdgeInput> edges_;
    std::vector<std::vector<int>> rotation_;
    std::vector<int> rot_next_, rot_prev_, face_of_;
    std::vector<std::vector<int>> faces_;
    std::vector<std::string> labels_;
    std::vector<Point> coords_;
    std::vector<int> comp_;
    int components_ = 0;
    int outer_ = 0;
    std::optional<BoxInfo> box_;

    void build(std::optional<int> outer_half_edge);
};

PlanarGraph build_from_rotation(const RotationSpec& spec);

// Rotation from coordinates: half-edges at each vertex sorted by angle.
PlanarGraph build_from_coordinates(const std::vector<Point>& coords, const std::vector<EdgeInput>& edges,
                                   std::vector<std::string> labels = {});

// Square-lattice box with n x m unit squares; vertex (x, y) has id y*(n+1)+x.
PlanarGraph box_lattice(int n, int m, double J = 1.0);

// Each square gets a diagonal path bottom-right -> midpoint -> top-left; the
// midpoint is the copy of the bottom-left corner created by doubling its bottom
// and left edges. All couplings are halved.
PlanarGraph triangulate_square_lattice(const PlanarGraph& box);

// Each edge becomes a path of s edges through s-1 new vertices (couplings kept).
PlanarGraph subdivide_edges(const PlanarGraph& g, int s);

// Each edge becomes s parallel edges (couplings kept).
PlanarGraph parallelize_edges(const PlanarGraph& g, int s);

// Small builtin graphs.
PlanarGraph single_edge(double J = 1.0);
PlanarGraph doubled_edge(double J = 1.0);
PlanarGraph path_graph(int vertices, double J = 1.0);
PlanarGraph cycle_graph(int vertices, double J = 1.0);
PlanarGraph theta_graph(double J = 1.0);
PlanarGraph triangle_graph(double J = 1.0);
PlanarGraph complete_graph4(double J = 1.0);

// Dual spanning tree by breadth-first search from the outer face: for each
// face, the half-edge crossed to enter it (left side = that face), -1 at the root.
std::vector<int> dual_bfs_tree(const PlanarGraph& g);

// Crossing signs for the tree path from the outer face to `face`: a closed
// walk winds sum_i sign[h_i] times around the face.
std::vector<int> crossing_signs(const PlanarGraph& g, int face);

struct CutPath {
    std::vector<int> plus_side;
    std::vector<int> minus_side;
    int face_anchor = 0;
};

// Center vertex of a box (or triangulated box): (width/2, height/2).
int box_center(const PlanarGraph& g);
int box_vertex(const PlanarGraph& g, int x, int y);
// Face with lower-left corner at the center (lower-left half if triangulated).
int box_center_face(const PlanarGraph& g);
// Horizontal cut through the center row, split just right of the center.
CutPath box_cut(const PlanarGraph& g);

// Every simple cycle of length <= max_len that winds around the anchor face
// meets both sides. Exhaustive; for small graphs.
bool validate_cut(const PlanarGraph& g, const CutPath& cut, int max_len);

// Boundary vertices of a box.
std::vector<int> box_boundary(const PlanarGraph& g);

}  // namespace xyl
