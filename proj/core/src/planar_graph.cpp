#include "xyloops/planar_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>
#include <sstream>

namespace xyl {

namespace {

double signed_area(const std::vector<Point>& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % poly.size()];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

bool point_in_polygon(const std::vector<Point>& poly, Point p) {
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Point& a = poly[i];
        const Point& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

}  // namespace

PlanarGraph::PlanarGraph(int num_vertices, std::vector<EdgeInput> edges, std::vector<std::vector<int>> rotation,
                         std::vector<std::string> labels, std::vector<Point> coords,
                         std::optional<int> outer_half_edge)
    : n_(num_vertices),
      edges_(std::move(edges)),
      rotation_(std::move(rotation)),
      labels_(std::move(labels)),
      coords_(std::move(coords)) {
    build(outer_half_edge);
}

std::string PlanarGraph::label(int v) const {
    if (v >= 0 && v < int(labels_.size())) return labels_[v];
    return std::to_string(v);
}

void PlanarGraph::build(std::optional<int> outer_half_edge) {
    if (n_ < 0) throw ValidationError("negative vertex count");
    if (int(rotation_.size()) != n_) throw EmbeddingError("rotation must list every vertex");
    if (!coords_.empty() && int(coords_.size()) != n_) throw ValidationError("coordinates must cover every vertex");
    int H = num_half_edges();
    for (int e = 0; e < num_edges(); ++e) {
        const auto& ed = edges_[e];
        if (ed.u < 0 || ed.u >= n_ || ed.v < 0 || ed.v >= n_)
            throw EmbeddingError("edge " + std::to_string(e) + " has an endpoint out of range");
        if (ed.u == ed.v) throw EmbeddingError("self-loop at vertex " + label(ed.u) + " is not supported");
        if (!(ed.J >= 0) || !std::isfinite(ed.J))
            throw ValidationError("coupling on edge " + label(ed.u) + "-" + label(ed.v) + " must be finite and positive");
    }
    rot_next_.assign(H, -1);
    rot_prev_.assign(H, -1);
    std::vector<int> seen(H, 0);
    for (int v = 0; v < n_; ++v) {
        const auto& r = rotation_[v];
        for (std::size_t i = 0; i < r.size(); ++i) {
            int h = r[i];
            if (h < 0 || h >= H) throw EmbeddingError("rotation at " + label(v) + " names an unknown half-edge");
            if (origin(h) != v)
                throw EmbeddingError("rotation at " + label(v) + " lists edge " + label(origin(h)) + "-" +
                                     label(target(h)) + " from the wrong endpoint");
            if (seen[h]++) throw EmbeddingError("rotation at " + label(v) + " repeats a half-edge");
            int nx = r[(i + 1) % r.size()];
            rot_next_[h] = nx;
            rot_prev_[nx] = h;
        }
    }
    for (int h = 0; h < H; ++h)
        if (!seen[h])
            throw EmbeddingError("edge " + label(origin(h)) + "-" + label(target(h)) + " missing from rotation at " +
                                 label(origin(h)));

    // Faces.
    face_of_.assign(H, -1);
    faces_.clear();
    for (int h0 = 0; h0 < H; ++h0) {
        if (face_of_[h0] >= 0) continue;
        int f = int(faces_.size());
        faces_.emplace_back();
        int h = h0;
        do {
            face_of_[h] = f;
            faces_[f].push_back(h);
            h = face_next(h);
        } while (h != h0);
    }

    // Components.
    std::vector<int> parent(n_);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const auto& e : edges_) parent[find(e.u)] = find(e.v);
    comp_.assign(n_, -1);
    components_ = 0;
    std::vector<int> root_id(n_, -1);
    int isolated = 0;
    for (int v = 0; v < n_; ++v) {
        int r = find(v);
        if (root_id[r] < 0) root_id[r] = components_++;
        comp_[v] = root_id[r];
        if (rotation_[v].empty()) ++isolated;
    }
    int expected_faces = num_edges() - n_ + 2 * components_ - isolated;
    if (num_faces() != expected_faces) {
        std::ostringstream os;
        os << "rotation system is not planar: traced " << num_faces() << " faces, Euler's formula needs "
           << expected_faces;
        throw EmbeddingError(os.str());
    }

    // Outer face.
    outer_ = 0;
    if (faces_.empty()) return;
    if (outer_half_edge) {
        outer_ = face_of_.at(*outer_half_edge);
        return;
    }
    if (has_coords() && components_ == 1) {
        int best = -1;
        double best_area = 0.0;
        for (int f = 0; f < num_faces(); ++f) {
            std::vector<Point> poly;
            for (int h : faces_[f]) poly.push_back(coords_[origin(h)]);
            double a = signed_area(poly);
            if (a < best_area - 1e-12) {
                best_area = a;
                best = f;
            }
        }
        if (best >= 0) {
            outer_ = best;
            return;
        }
    }
    std::size_t best_len = 0;
    for (int f = 0; f < num_faces(); ++f)
        if (faces_[f].size() > best_len) {
            best_len = faces_[f].size();
            outer_ = f;
        }
}

std::vector<int> PlanarGraph::inner_faces() const {
    std::vector<int> out;
    for (int f = 0; f < num_faces(); ++f)
        if (f != outer_) out.push_back(f);
    return out;
}

PlanarGraph PlanarGraph::with_coupling(int e, double J) const {
    PlanarGraph g = *this;
    g.edges_.at(e).J = J;
    return g;
}

PlanarGraph PlanarGraph::with_couplings(const std::vector<double>& J) const {
    if (int(J.size()) != num_edges()) throw ValidationError("coupling vector has the wrong length");
    PlanarGraph g = *this;
    for (int e = 0; e < num_edges(); ++e) g.edges_[e].J = J[e];
    return g;
}

PlanarGraph PlanarGraph::with_outer_face(int f) const {
    if (f < 0 || f >= num_faces()) throw ValidationError("no such face");
    PlanarGraph g = *this;
    g.outer_ = f;
    return g;
}

int PlanarGraph::find_half_edge(int u, int v) const {
    for (int h : rotation_[u])
        if (target(h) == v) return h;
    return -1;
}

std::vector<int> PlanarGraph::neighbors(int v) const {
    std::vector<int> out;
    for (int h : rotation_[v]) out.push_back(target(h));
    return out;
}

int PlanarGraph::face_containing(Point p) const {
    if (!has_coords()) throw UnsupportedGraph("face lookup needs coordinates");
    for (int f = 0; f < num_faces(); ++f) {
        if (f == outer_) continue;
        std::vector<Point> poly;
        for (int h : faces_[f]) poly.push_back(coords_[origin(h)]);
        if (point_in_polygon(poly, p)) return f;
    }
    return outer_;
}

std::optional<Point> PlanarGraph::interior_point(int f) const {
    if (!has_coords() || f == outer_) return std::nullopt;
    std::vector<Point> poly;
    Point c;
    for (int h : faces_[f]) {
        poly.push_back(coords_[origin(h)]);
        c.x += poly.back().x;
        c.y += poly.back().y;
    }
    c.x /= double(poly.size());
    c.y /= double(poly.size());
    if (point_in_polygon(poly, c) && face_containing(c) == f) return c;
    return std::nullopt;
}

int PlanarGraph::merged_face_degree(int f, const std::vector<bool>& merged) const {
    int d = 0;
    for (int h : faces_[f]) {
        int v = origin(h);
        if (v >= int(merged.size()) || !merged[v]) ++d;
    }
    return d;
}

PlanarGraph build_from_rotation(const RotationSpec& spec) {
    int n = spec.num_vertices;
    if (int(spec.neighbors.size()) != n) throw EmbeddingError("neighbor lists must cover every vertex");
    auto name = [&](int v) { return v < int(spec.labels.size()) ? spec.labels[v] : std::to_string(v); };
    std::vector<EdgeInput> edges;
    std::vector<std::vector<int>> rotation(n);
    // occurrence index of each neighbor entry
    std::vector<std::vector<int>> occ(n);
    std::map<std::pair<int, int>, int> count;
    for (int v = 0; v < n; ++v) {
        std::map<int, int> c;
        for (int w : spec.neighbors[v]) {
            if (w < 0 || w >= n) throw EmbeddingError("vertex " + name(v) + " lists an unknown neighbor");
            if (w == v) throw EmbeddingError("self-loop at vertex " + name(v) + " is not supported");
            occ[v].push_back(c[w]++);
        }
        for (auto [w, k] : c) count[{v, w}] = k;
    }
    for (auto [key, k] : count) {
        auto [v, w] = key;
        int back = count.count({w, v}) ? count[{w, v}] : 0;
        if (back != k)
            throw EmbeddingError("inconsistent adjacency on edge " + name(std::min(v, w)) + "-" + name(std::max(v, w)) +
                                 ": " + name(v) + " lists it " + std::to_string(k) + " times, " + name(w) + " lists it " +
                                 std::to_string(back) + " times");
    }
    // Create edges at the smaller endpoint.
    std::map<std::pair<int, int>, std::vector<int>> edge_ids;
    for (int v = 0; v < n; ++v) {
        for (std::size_t i = 0; i < spec.neighbors[v].size(); ++i) {
            int w = spec.neighbors[v][i];
            if (w < v) continue;
            auto key = std::make_pair(v, w);
            int copy = occ[v][i];
            double J;
            auto it = spec.couplings.find(key);
            if (it == spec.couplings.end() || it->second.empty())
                throw ValidationError("missing coupling on edge " + name(v) + "-" + name(w));
            if (it->second.size() == 1)
                J = it->second[0];
            else if (copy < int(it->second.size()))
                J = it->second[copy];
            else
                throw ValidationError("coupling list on edge " + name(v) + "-" + name(w) + " is too short");
            if (!(J > 0) || !std::isfinite(J))
                throw ValidationError("coupling on edge " + name(v) + "-" + name(w) + " must be finite and positive");
            edge_ids[key].push_back(int(edges.size()));
            edges.push_back({v, w, J});
        }
    }
    for (int v = 0; v < n; ++v) {
        for (std::size_t i = 0; i < spec.neighbors[v].size(); ++i) {
            int w = spec.neighbors[v][i];
            int copy = occ[v][i];
            if (v < w) {
                rotation[v].push_back(2 * edge_ids[{v, w}][copy]);
            } else {
                const auto& ids = edge_ids[{w, v}];
                rotation[v].push_back(2 * ids[ids.size() - 1 - copy] + 1);
            }
        }
    }
    std::optional<int> outer;
    if (spec.outer_hint) {
        auto [u, v] = *spec.outer_hint;
        for (int h : rotation.at(u)) {
            int e = h >> 1;
            int t = (h & 1) ? edges[e].u : edges[e].v;
            if (t == v) {
                outer = h;
                break;
            }
        }
        if (!outer) throw EmbeddingError("outer face hint names a missing edge " + name(u) + "-" + name(v));
    }
    return PlanarGraph(n, std::move(edges), std::move(rotation), spec.labels, spec.coords, outer);
}

PlanarGraph build_from_coordinates(const std::vector<Point>& coords, const std::vector<EdgeInput>& edges,
                                   std::vector<std::string> labels) {
    int n = int(coords.size());
    std::vector<std::vector<int>> rotation(n);
    for (int e = 0; e < int(edges.size()); ++e) {
        rotation.at(edges[e].u).push_back(2 * e);
        rotation.at(edges[e].v).push_back(2 * e + 1);
    }
    for (int v = 0; v < n; ++v) {
        auto angle = [&](int h) {
            const auto& ed = edges[h >> 1];
            int w = (h & 1) ? ed.u : ed.v;
            return std::atan2(coords[w].y - coords[v].y, coords[w].x - coords[v].x);
        };
        std::stable_sort(rotation[v].begin(), rotation[v].end(), [&](int a, int b) { return angle(a) < angle(b); });
    }
    return PlanarGraph(n, edges, std::move(rotation), std::move(labels), coords);
}

PlanarGraph box_lattice(int n, int m, double J) {
    if (n < 1 || m < 1) throw ValidationError("box dimensions must be at least 1");
    if (!(J > 0)) throw ValidationError("coupling must be positive");
    std::vector<Point> coords;
    for (int y = 0; y <= m; ++y)
        for (int x = 0; x <= n; ++x) coords.push_back({double(x), double(y)});
    auto id = [&](int x, int y) { return y * (n + 1) + x; };
    std::vector<EdgeInput> edges;
    for (int y = 0; y <= m; ++y)
        for (int x = 0; x < n; ++x) edges.push_back({id(x, y), id(x + 1, y), J});
    for (int y = 0; y < m; ++y)
        for (int x = 0; x <= n; ++x) edges.push_back({id(x, y), id(x, y + 1), J});
    PlanarGraph g = build_from_coordinates(coords, edges);
    g.set_box({n, m, false, (n + 1) * (m + 1)});
    return g;
}

PlanarGraph triangulate_square_lattice(const PlanarGraph& box) {
    if (!box.box() || box.box()->triangulated)
        throw UnsupportedGraph("triangulation needs an untriangulated square-lattice box");
    int n = box.box()->width, m = box.box()->height;
    auto id = [&](int x, int y) { return y * (n + 1) + x; };
    std::vector<Point> coords = box.coords();
    std::vector<EdgeInput> edges;
    for (const auto& e : box.edges()) edges.push_back({e.u, e.v, 0.5 * e.J});
    // Coupling of the diagonal path: half the coupling of the doubled edges it
    // replaces (bottom edge of the square).
    for (int y = 0; y < m; ++y)
        for (int x = 0; x < n; ++x) {
            int mid = int(coords.size());
            coords.push_back({x + 0.5, y + 0.5});
            int bottom = box.find_half_edge(id(x, y), id(x + 1, y)) >> 1;
            double J = 0.5 * box.coupling(bottom);
            edges.push_back({id(x + 1, y), mid, J});
            edges.push_back({mid, id(x, y + 1), J});
        }
    PlanarGraph g = build_from_coordinates(coords, edges);
    g.set_box({n, m, true, (n + 1) * (m + 1)});
    return g;
}

PlanarGraph subdivide_edges(const PlanarGraph& g, int s) {
    if (s < 1) throw ValidationError("subdivision factor must be positive");
    int n = g.num_vertices();
    std::vector<EdgeInput> edges;
    std::vector<std::vector<int>> rotation(n);
    std::vector<Point> coords = g.coords();
    // first and last new half-edge replacing each old half-edge
    std::vector<int> start_half(g.num_half_edges());
    int next_vertex = n;
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto& ed = g.edge(e);
        int prev = ed.u;
        int first = -1, last = -1;
        for (int i = 0; i < s; ++i) {
            int nxt;
            if (i == s - 1) {
                nxt = ed.v;
            } else {
                nxt = next_vertex++;
                rotation.emplace_back();
                if (g.has_coords()) {
                    double t = double(i + 1) / s;
                    Point a = g.coord(ed.u), b = g.coord(ed.v);
                    coords.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
                }
            }
            int ne = int(edges.size());
            edges.push_back({prev, nxt, ed.J});
            if (i == 0) first = ne;
            last = ne;
            if (i > 0) {
                // interior vertex prev: incoming from previous piece, outgoing to this one
                rotation[prev].push_back(2 * ne);
                rotation[prev].push_back(2 * (ne - 1) + 1);
            }
            prev = nxt;
        }
        start_half[2 * e] = 2 * first;
        start_half[2 * e + 1] = 2 * last + 1;
    }
    for (int v = 0; v < n; ++v)
        for (int h : g.rotation(v)) rotation[v].push_back(start_half[h]);
    std::optional<int> outer;
    // keep the outer face: a half-edge on it maps to the first piece
    if (g.num_faces() > 0) outer = start_half[g.face_walk(g.outer_face()).front()];
    PlanarGraph out(next_vertex, std::move(edges), std::move(rotation), {}, g.has_coords() ? coords : std::vector<Point>{},
                    outer);
    return out;
}

PlanarGraph parallelize_edges(const PlanarGraph& g, int s) {
    if (s < 1) throw ValidationError("bundle size must be positive");
    std::vector<EdgeInput> edges;
    for (const auto& e : g.edges())
        for (int i = 0; i < s; ++i) edges.push_back(e);
    std::vector<std::vector<int>> rotation(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v)
        for (int h : g.rotation(v)) {
            int e = h >> 1;
            // copies appear in order at the tail and in reverse order at the head
            for (int i = 0; i < s; ++i) {
                int copy = (h & 1) ? s - 1 - i : i;
                rotation[v].push_back(2 * (e * s + copy) + (h & 1));
            }
        }
    std::optional<int> outer;
    if (g.num_faces() > 0) {
        int h = g.face_walk(g.outer_face()).front();
        int e = h >> 1;
        // outer side of the bundle: the copy whose left face is outside
        outer = 2 * (e * s + ((h & 1) ? 0 : s - 1)) + (h & 1);
    }
    return PlanarGraph(g.num_vertices(), std::move(edges), std::move(rotation), {}, g.coords(), outer);
}

PlanarGraph single_edge(double J) {
    RotationSpec s;
    s.num_vertices = 2;
    s.neighbors = {{1}, {0}};
    s.couplings[{0, 1}] = {J};
    s.labels = {"a", "b"};
    return build_from_rotation(s);
}

PlanarGraph doubled_edge(double J) {
    RotationSpec s;
    s.num_vertices = 2;
    s.neighbors = {{1, 1}, {0, 0}};
    s.couplings[{0, 1}] = {J};
    s.labels = {"a", "b"};
    return build_from_rotation(s);
}

PlanarGraph path_graph(int vertices, double J) {
    RotationSpec s;
    s.num_vertices = vertices;
    s.neighbors.resize(vertices);
    for (int v = 0; v + 1 < vertices; ++v) {
        s.neighbors[v].push_back(v + 1);
        s.neighbors[v + 1].push_back(v);
        s.couplings[{v, v + 1}] = {J};
    }
    return build_from_rotation(s);
}

PlanarGraph cycle_graph(int vertices, double J) {
    if (vertices < 3) throw ValidationError("cycle needs at least 3 vertices");
    std::vector<Point> coords;
    std::vector<EdgeInput> edges;
    for (int v = 0; v < vertices; ++v) {
        double t = 2.0 * M_PI * v / vertices;
        coords.push_back({std::cos(t), std::sin(t)});
        edges.push_back({v, (v + 1) % vertices, J});
    }
    return build_from_coordinates(coords, edges);
}

PlanarGraph theta_graph(double J) {
    RotationSpec s;
    s.num_vertices = 2;
    s.neighbors = {{1, 1, 1}, {0, 0, 0}};
    s.couplings[{0, 1}] = {J};
    s.labels = {"a", "b"};
    return build_from_rotation(s);
}

PlanarGraph triangle_graph(double J) { return cycle_graph(3, J); }

PlanarGraph complete_graph4(double J) {
    std::vector<Point> coords = {{0, 0}, {2, 0}, {1, 2}, {1, 0.7}};
    std::vector<EdgeInput> edges = {{0, 1, J}, {1, 2, J}, {2, 0, J}, {0, 3, J}, {1, 3, J}, {2, 3, J}};
    return build_from_coordinates(coords, edges);
}

int box_vertex(const PlanarGraph& g, int x, int y) {
    if (!g.box()) throw UnsupportedGraph("not a box");
    int n = g.box()->width, m = g.box()->height;
    if (x < 0 || x > n || y < 0 || y > m) throw ValidationError("site outside the box");
    return y * (n + 1) + x;
}

int box_center(const PlanarGraph& g) {
    if (!g.box()) throw UnsupportedGraph("not a box");
    return box_vertex(g, g.box()->width / 2, g.box()->height / 2);
}

int box_center_face(const PlanarGraph& g) {
    if (!g.box()) throw UnsupportedGraph("not a box");
    int xc = g.box()->width / 2, yc = g.box()->height / 2;
    if (xc >= g.box()->width) xc = g.box()->width - 1;
    if (yc >= g.box()->height) yc = g.box()->height - 1;
    return g.face_containing({xc + 0.375, yc + 0.375});
}

CutPath box_cut(const PlanarGraph& g) {
    if (!g.box()) throw UnsupportedGraph("cuts are defined on boxes");
    int n = g.box()->width, m = g.box()->height;
    int xc = std::min(n / 2, n - 1), yc = std::min(m / 2, m - 1);
    CutPath c;
    for (int x = 0; x <= n; ++x) (x <= xc ? c.plus_side : c.minus_side).push_back(box_vertex(g, x, yc));
    c.face_anchor = box_center_face(g);
    return c;
}

std::vector<int> box_boundary(const PlanarGraph& g) {
    if (!g.box()) throw UnsupportedGraph("not a box");
    int n = g.box()->width, m = g.box()->height;
    std::vector<int> out;
    for (int y = 0; y <= m; ++y)
        for (int x = 0; x <= n; ++x)
            if (x == 0 || y == 0 || x == n || y == m) out.push_back(box_vertex(g, x, y));
    return out;
}

std::vector<int> dual_bfs_tree(const PlanarGraph& g) {
    std::vector<int> via(g.num_faces(), -2);
    if (g.num_faces() == 0) return via;
    std::deque<int> q;
    via[g.outer_face()] = -1;
    q.push_back(g.outer_face());
    while (!q.empty()) {
        int f = q.front();
        q.pop_front();
        // half-edges with f on the right lead to the face on their left
        for (int h : g.face_walk(f)) {
            int t = PlanarGraph::twin(h);
            int nf = g.left_face(t);
            if (via[nf] == -2) {
                via[nf] = t;
                q.push_back(nf);
            }
        }
    }
    return via;
}

std::vector<int> crossing_signs(const PlanarGraph& g, int face) {
    std::vector<int> sign(g.num_half_edges(), 0);
    std::vector<int> via = dual_bfs_tree(g);
    int f = face;
    while (f >= 0 && via[f] >= 0) {
        int h = via[f];
        sign[h] += 1;
        sign[PlanarGraph::twin(h)] -= 1;
        f = g.right_face(h);
    }
    if (f >= 0 && via[f] == -2) throw UnsupportedGraph("face is not reachable from the outer face");
    return sign;
}

bool validate_cut(const PlanarGraph& g, const CutPath& cut, int max_len) {
    std::vector<int> sign = crossing_signs(g, cut.face_anchor);
    std::vector<char> plus(g.num_vertices(), 0), minus(g.num_vertices(), 0);
    for (int v : cut.plus_side) plus[v] = 1;
    for (int v : cut.minus_side) minus[v] = 1;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (plus[v] && minus[v]) return false;
    bool ok = true;
    std::vector<char> on(g.num_vertices(), 0);
    std::vector<int> path;
    // Simple cycles with smallest vertex s.
    std::function<void(int, int, int, int, int)> dfs = [&](int s, int v, int len, int wind, int last_edge) {
        if (!ok) return;
        for (int h : g.rotation(v)) {
            int e = PlanarGraph::edge_of(h);
            if (e == last_edge) continue;
            int w = g.target(h);
            if (w == s && len + 1 >= 2) {
                int total = wind + sign[h];
                if (total != 0) {
                    bool hp = false, hm = false;
                    for (int x : path) {
                        hp = hp || plus[x];
                        hm = hm || minus[x];
                    }
                    if (!hp || !hm) ok = false;
                }
                continue;
            }
            if (w < s || on[w] || len + 1 >= max_len) continue;
            on[w] = 1;
            path.push_back(w);
            dfs(s, w, len + 1, wind + sign[h], e);
            path.pop_back();
            on[w] = 0;
        }
    };
    for (int s = 0; s < g.num_vertices() && ok; ++s) {
        on[s] = 1;
        path = {s};
        dfs(s, s, 0, 0, -1);
        on[s] = 0;
    }
    return ok;
}

}  // namespace xyl
