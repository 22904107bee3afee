#include "xyloops/current.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "xyloops/bessel.hpp"

namespace xyl {

SourceFunction divergence(const PlanarGraph& g, const Current& n) {
    if (int(n.size()) != g.num_half_edges()) throw ValidationError("current has the wrong length");
    SourceFunction d(g.num_vertices(), 0);
    for (int h = 0; h < g.num_half_edges(); ++h) {
        d[g.origin(h)] += n[h];
        d[g.target(h)] -= n[h];
    }
    return d;
}

bool is_sourceless(const PlanarGraph& g, const Current& n) {
    auto d = divergence(g, n);
    return std::all_of(d.begin(), d.end(), [](int x) { return x == 0; });
}

SourceFunction point_sources(const PlanarGraph& g, int a, int b, int k) {
    SourceFunction phi(g.num_vertices(), 0);
    phi.at(a) += k;
    phi.at(b) -= k;
    return phi;
}

double weight_log(const PlanarGraph& g, const Current& n, double beta) {
    double s = 0.0;
    for (int h = 0; h < g.num_half_edges(); ++h) {
        if (n[h] < 0) throw ValidationError("currents are nonnegative");
        if (n[h] == 0) continue;
        double x = 0.5 * beta * g.coupling(h >> 1);
        s += n[h] * std::log(x) - std::lgamma(n[h] + 1.0);
    }
    return s;
}

std::vector<int> net_flow(const PlanarGraph& g, const Current& n) {
    std::vector<int> l(g.num_edges());
    for (int e = 0; e < g.num_edges(); ++e) l[e] = n[2 * e] - n[2 * e + 1];
    return l;
}

std::vector<int> amplitude(const PlanarGraph& g, const Current& n) {
    std::vector<int> m(g.num_edges());
    for (int e = 0; e < g.num_edges(); ++e) m[e] = n[2 * e] + n[2 * e + 1];
    return m;
}

namespace {

HeightField heights_along(const PlanarGraph& g, const Current& n, const std::vector<int>& via,
                          const std::vector<int>& order) {
    HeightField h(g.num_faces(), 0);
    for (int f : order) {
        int t = via[f];
        if (t < 0) continue;
        h[f] = h[g.right_face(t)] + (n[t] - n[PlanarGraph::twin(t)]);
    }
    for (int he = 0; he < g.num_half_edges(); ++he) {
        long inc = n[he] - n[PlanarGraph::twin(he)];
        if (h[g.left_face(he)] - h[g.right_face(he)] != inc)
            throw ConsistencyError("current has sources: height increments are not consistent around edge " +
                                   g.label(g.origin(he)) + "-" + g.label(g.target(he)));
    }
    return h;
}

}  // namespace

HeightField height_from_current(const PlanarGraph& g, const Current& n) {
    if (!g.connected()) throw UnsupportedGraph("height functions need a connected graph");
    if (int(n.size()) != g.num_half_edges()) throw ValidationError("current has the wrong length");
    std::vector<int> via = dual_bfs_tree(g);
    // BFS discovery order: parents come first when sorted by tree depth.
    std::vector<int> order;
    std::deque<int> q{g.outer_face()};
    std::vector<char> seen(g.num_faces(), 0);
    if (g.num_faces() > 0) seen[g.outer_face()] = 1;
    while (!q.empty()) {
        int f = q.front();
        q.pop_front();
        order.push_back(f);
        for (int nf = 0; nf < g.num_faces(); ++nf)
            if (!seen[nf] && via[nf] >= 0 && g.right_face(via[nf]) == f) {
                seen[nf] = 1;
                q.push_back(nf);
            }
    }
    return heights_along(g, n, via, order);
}

HeightField height_from_current_dfs(const PlanarGraph& g, const Current& n) {
    if (!g.connected()) throw UnsupportedGraph("height functions need a connected graph");
    std::vector<int> via(g.num_faces(), -2), order;
    std::vector<int> stack{g.outer_face()};
    via[g.outer_face()] = -1;
    while (!stack.empty()) {
        int f = stack.back();
        stack.pop_back();
        order.push_back(f);
        const auto& walk = g.face_walk(f);
        for (auto it = walk.rbegin(); it != walk.rend(); ++it) {
            int t = PlanarGraph::twin(*it);
            int nf = g.left_face(t);
            if (via[nf] == -2) {
                via[nf] = t;
                stack.push_back(nf);
            }
        }
    }
    return heights_along(g, n, via, order);
}

GradientAmplitude gradient_amplitude_split(const PlanarGraph& g, const Current& n) {
    if (!is_sourceless(g, n)) throw ConsistencyError("gradient/amplitude split needs a sourceless current");
    GradientAmplitude out;
    for (int e = 0; e < g.num_edges(); ++e) {
        out.grad.push_back(std::abs(n[2 * e] - n[2 * e + 1]));
        out.X.push_back(std::min(n[2 * e], n[2 * e + 1]));
    }
    return out;
}

Current assemble(const PlanarGraph& g, const HeightField& h, const std::vector<int>& X) {
    if (int(X.size()) != g.num_edges() || int(h.size()) != g.num_faces())
        throw ValidationError("assemble: size mismatch");
    Current n(g.num_half_edges());
    for (int e = 0; e < g.num_edges(); ++e) {
        if (X[e] < 0) throw ValidationError("assemble: X must be nonnegative");
        long l = h[g.left_face(2 * e)] - h[g.right_face(2 * e)];
        n[2 * e] = X[e] + int(std::max(l, 0L));
        n[2 * e + 1] = X[e] + int(std::max(-l, 0L));
    }
    return n;
}

double gibbs_height_log_weight(const PlanarGraph& g, const HeightField& h, double beta) {
    double s = 0.0;
    for (int e = 0; e < g.num_edges(); ++e) {
        long l = h[g.left_face(2 * e)] - h[g.right_face(2 * e)];
        s += bessel_i_log(int(l), beta * g.coupling(e));
    }
    return s;
}

double truncation_tail(const PlanarGraph& g, double beta, int cutoff) {
    double t = 0.0;
    for (int e = 0; e < g.num_edges(); ++e) t += 2.0 * poisson_upper_tail(0.5 * beta * g.coupling(e), cutoff + 1);
    return t;
}

double current_count_estimate(const PlanarGraph& g, int cutoff) {
    int rank = g.num_edges() - g.num_vertices() + g.num_components();
    return std::pow(cutoff + 1.0, g.num_edges()) * std::pow(2.0 * cutoff + 1.0, rank);
}

void enumerate_currents(const PlanarGraph& g, const SourceFunction& phi, int cutoff,
                        const std::function<void(const Current&)>& visit, double max_count) {
    if (int(phi.size()) != g.num_vertices()) throw ValidationError("source function has the wrong length");
    long total = 0;
    for (int x : phi) total += x;
    if (total != 0) return;
    double est = current_count_estimate(g, cutoff);
    if (est > max_count)
        throw GuardError("current enumeration refused: about " + std::to_string(est) + " currents", est);
    int H = g.num_half_edges();
    int V = g.num_vertices();
    std::vector<int> out_left(V, 0), in_left(V, 0), d(V, 0);
    for (int h = 0; h < H; ++h) {
        out_left[g.origin(h)]++;
        in_left[g.target(h)]++;
    }
    Current n(H, 0);
    auto ok = [&](int v) {
        long need = long(phi[v]) - d[v];
        return need <= long(cutoff) * out_left[v] && -need <= long(cutoff) * in_left[v];
    };
    for (int v = 0; v < V; ++v)
        if (!ok(v)) return;
    std::function<void(int)> rec = [&](int h) {
        if (h == H) {
            visit(n);
            return;
        }
        int u = g.origin(h), w = g.target(h);
        out_left[u]--;
        in_left[w]--;
        for (int x = 0; x <= cutoff; ++x) {
            n[h] = x;
            d[u] += x;
            d[w] -= x;
            if (ok(u) && ok(w)) rec(h + 1);
            d[u] -= x;
            d[w] += x;
        }
        n[h] = 0;
        out_left[u]++;
        in_left[w]++;
    };
    rec(0);
}

double truncated_edge_factor(int l, double x, int cutoff) {
    int a = std::abs(l);
    if (a > cutoff) return 0.0;
    if (x == 0) return l == 0 ? 1.0 : 0.0;
    double term = std::exp(-2.0 * x);
    for (int j = 1; j <= a; ++j) term *= x / j;
    double s = 0.0, c = 0.0;
    for (int j = 0; j + a <= cutoff; ++j) {
        double y = term - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
        term *= x * x / (double(j + 1) * double(j + 1 + a));
        if (term < 1e-300) break;
    }
    return s;
}

namespace {

// Edges ordered so that vertices get closed early: breadth-first from vertex 0.
std::vector<int> closing_edge_order(const PlanarGraph& g) {
    std::vector<int> order;
    std::vector<char> used(g.num_edges(), 0), seen(g.num_vertices(), 0);
    for (int s = 0; s < g.num_vertices(); ++s) {
        if (seen[s]) continue;
        std::deque<int> q{s};
        seen[s] = 1;
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            for (int h : g.rotation(v)) {
                int e = h >> 1;
                if (!used[e]) {
                    used[e] = 1;
                    order.push_back(e);
                }
                int w = g.target(h);
                if (!seen[w]) {
                    seen[w] = 1;
                    q.push_back(w);
                }
            }
        }
    }
    return order;
}

}  // namespace

void enumerate_net_flows(const PlanarGraph& g, const SourceFunction& phi, int cutoff,
                         const std::function<void(const std::vector<int>&)>& visit, double max_count) {
    int V = g.num_vertices(), E = g.num_edges();
    long total = 0;
    for (int x : phi) total += x;
    if (total != 0) return;
    int rank = E - V + g.num_components();
    double est = std::pow(2.0 * cutoff + 1.0, rank);
    if (est > max_count) throw GuardError("net-flow enumeration refused: about " + std::to_string(est) + " terms", est);
    std::vector<int> order = closing_edge_order(g);
    std::vector<int> rem(V, 0), d(V, 0), l(E, 0);
    for (int v = 0; v < V; ++v) rem[v] = g.degree(v);
    auto ok = [&](int v) { return std::abs(long(phi[v]) - d[v]) <= long(cutoff) * rem[v]; };
    for (int v = 0; v < V; ++v)
        if (!ok(v)) return;
    std::function<void(int)> rec = [&](int i) {
        if (i == E) {
            visit(l);
            return;
        }
        int e = order[i];
        int u = g.edge(e).u, w = g.edge(e).v;
        rem[u]--;
        rem[w]--;
        // An edge that completes a vertex has its flow forced.
        long lo = -cutoff, hi = cutoff;
        if (rem[u] == 0) lo = std::max(lo, long(phi[u]) - d[u]), hi = std::min(hi, long(phi[u]) - d[u]);
        if (rem[w] == 0) lo = std::max(lo, d[w] - long(phi[w])), hi = std::min(hi, d[w] - long(phi[w]));
        for (int x = int(lo); x <= int(hi); ++x) {
            l[e] = x;
            d[u] += x;
            d[w] -= x;
            if (ok(u) && ok(w)) rec(i + 1);
            d[u] -= x;
            d[w] += x;
        }
        l[e] = 0;
        rem[u]++;
        rem[w]++;
    };
    rec(0);
}

TruncatedSum partition_function(const PlanarGraph& g, double beta, const SourceFunction& phi, int cutoff) {
    int E = g.num_edges();
    std::vector<std::vector<double>> f(E, std::vector<double>(2 * cutoff + 1));
    for (int e = 0; e < E; ++e)
        for (int l = -cutoff; l <= cutoff; ++l)
            f[e][l + cutoff] = truncated_edge_factor(l, 0.5 * beta * g.coupling(e), cutoff);
    double s = 0.0, c = 0.0;
    enumerate_net_flows(g, phi, cutoff, [&](const std::vector<int>& l) {
        double w = 1.0;
        for (int e = 0; e < E; ++e) w *= f[e][l[e] + cutoff];
        double y = w - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    });
    return {s, truncation_tail(g, beta, cutoff)};
}

CorrelatorResult ratio_enclosure(const TruncatedSum& num, const TruncatedSum& den, double tolerance) {
    CorrelatorResult r;
    r.numerator = num;
    r.denominator = den;
    r.ratio = den.value > 0 ? num.value / den.value : 0.0;
    r.lower = std::max(0.0, (num.value - num.tail_bound) / (den.value + den.tail_bound));
    r.upper = den.value > den.tail_bound ? (num.value + num.tail_bound) / (den.value - den.tail_bound) : INFINITY;
    r.certified = r.upper - r.lower <= tolerance;
    return r;
}

CorrelatorResult partition_and_correlators(const PlanarGraph& g, double beta, int a, int b, int k, int cutoff,
                                           double tolerance) {
    TruncatedSum den = partition_function(g, beta, SourceFunction(g.num_vertices(), 0), cutoff);
    if (k == 0 || a == b) {
        CorrelatorResult r = ratio_enclosure(den, den, tolerance);
        r.ratio = 1.0;
        r.lower = std::min(r.lower, 1.0);
        r.upper = std::max(r.upper, 1.0);
        return r;
    }
    TruncatedSum num = partition_function(g, beta, point_sources(g, a, b, k), cutoff);
    return ratio_enclosure(num, den, tolerance);
}

int cutoff_for_tolerance(const PlanarGraph& g, double beta, double rel, int max_cutoff) {
    for (int N = 1; N <= max_cutoff; ++N) {
        double lower = 1.0;
        for (int e = 0; e < g.num_edges(); ++e) lower *= truncated_edge_factor(0, 0.5 * beta * g.coupling(e), N);
        if (truncation_tail(g, beta, N) <= rel * lower) return N;
    }
    return max_cutoff;
}

}  // namespace xyl
