#include "xyloops/loops.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>

#include "xyloops/strand_law.hpp"

namespace xyl {

namespace {

double log_factorial(int n) { return std::lgamma(n + 1.0); }

// Subsets of {0..m-1} with k elements, as bitmasks (Gosper's hack).
template <class F>
void for_each_subset(int m, int k, F&& f) {
    if (k < 0 || k > m) return;
    if (k == 0) {
        f(0u);
        return;
    }
    unsigned c = (1u << k) - 1u, limit = 1u << m;
    while (c < limit) {
        f(c);
        unsigned u = c & (~c + 1u), v = c + u;
        c = v + (((v ^ c) / u) >> 2);
    }
}

LoopConfig empty_config(const PlanarGraph& g, const Current& n, const std::vector<char>& mask) {
    LoopConfig cfg;
    cfg.offset.assign(g.num_edges() + 1, 0);
    for (int e = 0; e < g.num_edges(); ++e) cfg.offset[e + 1] = cfg.offset[e] + n[2 * e] + n[2 * e + 1];
    cfg.half.assign(cfg.offset.back(), -1);
    cfg.next.assign(cfg.offset.back(), -1);
    cfg.in_S = mask;
    return cfg;
}

std::vector<int> predecessors(const LoopConfig& cfg) {
    std::vector<int> pred(cfg.num_copies(), -1);
    for (int c = 0; c < cfg.num_copies(); ++c)
        if (cfg.next[c] >= 0) pred[cfg.next[c]] = c;
    return pred;
}

std::vector<int> config_key(const LoopConfig& cfg) {
    std::vector<int> key = cfg.half;
    key.insert(key.end(), cfg.next.begin(), cfg.next.end());
    return key;
}

std::vector<StrandBundle> bundles_of(const PlanarGraph& g, const Current& n) {
    std::vector<StrandBundle> out;
    for (int h = 0; h < g.num_half_edges(); ++h)
        if (n[h] > 0) out.push_back({g.origin(h), g.target(h), n[h]});
    return out;
}

double falling(int m, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= double(m - i);
    return r;
}

// All currents with the given amplitudes.
template <class F>
void for_each_current_with_amplitudes(const PlanarGraph& g, const std::vector<int>& M, F&& f) {
    int E = g.num_edges();
    Current n(g.num_half_edges(), 0);
    auto rec = [&](auto&& self, int e) -> void {
        if (e == E) {
            f(n);
            return;
        }
        for (int x = 0; x <= M[e]; ++x) {
            n[2 * e] = x;
            n[2 * e + 1] = M[e] - x;
            self(self, e + 1);
        }
    };
    rec(rec, 0);
}

}  // namespace

std::vector<char> vertex_mask(const PlanarGraph& g, const VertexSet& S) {
    std::vector<char> m(g.num_vertices(), 0);
    for (int v : S) m.at(v) = 1;
    return m;
}

Current config_current(const PlanarGraph& g, const LoopConfig& cfg) {
    Current n(g.num_half_edges(), 0);
    for (int h : cfg.half) n[h]++;
    return n;
}

std::vector<int> config_multigraph(const PlanarGraph& g, const LoopConfig& cfg) {
    std::vector<int> M(g.num_edges(), 0);
    for (int h : cfg.half) M[h >> 1]++;
    return M;
}

void validate_config(const PlanarGraph& g, const LoopConfig& cfg) {
    int C = cfg.num_copies();
    thread_local std::vector<int> pred;
    pred.assign(std::size_t(C), -1);
    for (int c = 0; c < C; ++c) {
        int h = cfg.half[c];
        if (h < 0 || (h >> 1) < 0 || cfg.offset[h >> 1] > c || cfg.offset[(h >> 1) + 1] <= c)
            throw ValidationError("copy " + std::to_string(c) + " does not belong to its edge");
        int t = g.target(h);
        int nx = cfg.next[c];
        if (cfg.in_S[t]) {
            if (nx >= 0) throw ValidationError("pairing at a vertex of S");
            continue;
        }
        if (nx < 0) throw ValidationError("unpaired incoming copy at vertex " + g.label(t));
        if (g.origin(cfg.half[nx]) != t) throw ValidationError("pairing joins copies at different vertices");
        if (pred[nx] >= 0) throw ValidationError("outgoing copy paired twice");
        pred[nx] = c;
    }
    for (int c = 0; c < C; ++c) {
        int o = g.origin(cfg.half[c]);
        if (!cfg.in_S[o] && pred[c] < 0) throw ValidationError("unpaired outgoing copy at vertex " + g.label(o));
    }
}

double consistent_count_formula(const PlanarGraph& g, const Current& n, const VertexSet& S) {
    auto mask = vertex_mask(g, S);
    auto d = divergence(g, n);
    double logc = 0.0;
    for (int e = 0; e < g.num_edges(); ++e)
        logc += log_factorial(n[2 * e] + n[2 * e + 1]) - log_factorial(n[2 * e]) - log_factorial(n[2 * e + 1]);
    std::vector<int> in(g.num_vertices(), 0);
    for (int h = 0; h < g.num_half_edges(); ++h) in[g.target(h)] += n[h];
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (mask[v]) continue;
        if (d[v] != 0) return 0.0;
        logc += log_factorial(in[v]);
    }
    return std::round(std::exp(logc));
}

void enumerate_consistent(const PlanarGraph& g, const Current& n, const VertexSet& S,
                          const std::function<void(const LoopConfig&)>& visit, double max_configs) {
    auto mask = vertex_mask(g, S);
    long copies = 0;
    for (int x : n) copies += x;
    if (copies > 24) throw GuardError("loop enumeration refused: " + std::to_string(copies) + " edge copies", copies);
    double count = consistent_count_formula(g, n, S);
    if (count == 0) return;
    if (count > max_configs)
        throw GuardError("loop enumeration refused: " + std::to_string(count) + " configurations", count);
    LoopConfig cfg = empty_config(g, n, mask);
    int E = g.num_edges(), V = g.num_vertices();
    std::vector<int> free_vertices;
    for (int v = 0; v < V; ++v)
        if (!mask[v]) free_vertices.push_back(v);

    // Incoming and outgoing copies per free vertex, rebuilt once per orientation.
    std::vector<std::vector<int>> ins(free_vertices.size()), outs(free_vertices.size());
    auto pair_vertices = [&](auto&& self, std::size_t i) -> void {
        if (i == free_vertices.size()) {
            visit(cfg);
            return;
        }
        const std::vector<int>& in = ins[i];
        std::vector<int>& out = outs[i];
        do {
            for (std::size_t j = 0; j < in.size(); ++j) cfg.next[in[j]] = out[j];
            self(self, i + 1);
        } while (std::next_permutation(out.begin(), out.end()));
        for (int c : in) cfg.next[c] = -1;
    };
    auto orient = [&](auto&& self, int e) -> void {
        if (e == E) {
            for (std::size_t i = 0; i < free_vertices.size(); ++i) {
                int v = free_vertices[i];
                ins[i].clear();
                outs[i].clear();
                for (int c = 0; c < cfg.num_copies(); ++c) {
                    if (g.target(cfg.half[c]) == v) ins[i].push_back(c);
                    if (g.origin(cfg.half[c]) == v) outs[i].push_back(c);
                }
            }
            pair_vertices(pair_vertices, 0);
            return;
        }
        int m = n[2 * e] + n[2 * e + 1], base = cfg.offset[e];
        for_each_subset(m, n[2 * e], [&](unsigned bits) {
            for (int j = 0; j < m; ++j) cfg.half[base + j] = (bits >> j & 1u) ? 2 * e : 2 * e + 1;
            self(self, e + 1);
        });
    };
    orient(orient, 0);
}

double enumerate_consistent_count(const PlanarGraph& g, const Current& n, const VertexSet& S) {
    auto mask = vertex_mask(g, S);
    auto d = divergence(g, n);
    double total = 1.0;
    for (int e = 0; e < g.num_edges(); ++e) {
        int m = n[2 * e] + n[2 * e + 1];
        if (m > 24) throw GuardError("orientation enumeration refused", m);
        double c = 0;
        for_each_subset(m, n[2 * e], [&](unsigned) { c += 1; });
        total *= c;
    }
    std::vector<int> in(g.num_vertices(), 0);
    for (int h = 0; h < g.num_half_edges(); ++h) in[g.target(h)] += n[h];
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (mask[v]) continue;
        if (d[v] != 0) return 0.0;
        if (in[v] > 11) throw GuardError("pairing enumeration refused", in[v]);
        std::vector<int> perm(in[v]);
        for (int i = 0; i < in[v]; ++i) perm[i] = i;
        double c = 0;
        do c += 1;
        while (std::next_permutation(perm.begin(), perm.end()));
        total *= c;
    }
    return total;
}

double weight_lambda_multigraph(const PlanarGraph& g, const std::vector<int>& M, const std::vector<char>& in_S,
                                double beta) {
    double s = 0.0;
    std::vector<int> deg(g.num_vertices(), 0);
    for (int e = 0; e < g.num_edges(); ++e) {
        if (M[e] == 0) continue;
        double x = 0.5 * beta * g.coupling(e);
        s += M[e] * std::log(x) - log_factorial(M[e]);
        deg[g.edge(e).u] += M[e];
        deg[g.edge(e).v] += M[e];
    }
    for (int v = 0; v < g.num_vertices(); ++v)
        if (!in_S[v]) s -= log_factorial(deg[v] / 2);
    return s;
}

double weight_lambda(const PlanarGraph& g, const LoopConfig& cfg, double beta) {
    return weight_lambda_multigraph(g, config_multigraph(g, cfg), cfg.in_S, beta);
}

LoopExpansionCheck verify_loopexp(const PlanarGraph& g, const Current& n, const VertexSet& S, double beta,
                                  double max_explicit) {
    LoopExpansionCheck r;
    auto mask = vertex_mask(g, S);
    auto d = divergence(g, n);
    for (int v = 0; v < g.num_vertices(); ++v)
        if (d[v] != 0 && !mask[v]) r.admissible = false;
    r.current_weight = std::exp(weight_log(g, n, beta));
    double formula = consistent_count_formula(g, n, S);
    if (formula <= max_explicit) {
        r.explicit_enumeration = true;
        double s = 0.0, comp = 0.0;
        // lambda depends on the configuration only through its multigraph; reuse
        // the last value while the multigraph repeats.
        std::vector<int> last_M, M(std::size_t(g.num_edges()));
        Current got(n.size());
        double last_w = 0.0;
        enumerate_consistent(
            g, n, S,
            [&](const LoopConfig& cfg) {
                validate_config(g, cfg);
                std::fill(got.begin(), got.end(), 0);
                std::fill(M.begin(), M.end(), 0);
                for (int h : cfg.half) {
                    ++got[std::size_t(h)];
                    ++M[std::size_t(h >> 1)];
                }
                if (got != n) throw ValidationError("enumerated configuration has the wrong current");
                if (M != last_M) {
                    last_w = std::exp(weight_lambda_multigraph(g, M, cfg.in_S, beta));
                    last_M = M;
                }
                double y = last_w - comp;
                double t = s + y;
                comp = (t - s) - y;
                s = t;
                r.configs += 1;
            },
            max_explicit);
        r.loop_sum = s;
    } else {
        r.configs = enumerate_consistent_count(g, n, S);
        std::vector<int> M(g.num_edges());
        for (int e = 0; e < g.num_edges(); ++e) M[e] = n[2 * e] + n[2 * e + 1];
        r.loop_sum = r.configs * std::exp(weight_lambda_multigraph(g, M, mask, beta));
    }
    r.rel_residual = std::abs(r.loop_sum - r.current_weight) / r.current_weight;
    return r;
}

LoopConfig cutting_map(const PlanarGraph& g, const LoopConfig& cfg, const VertexSet& S) {
    LoopConfig out = cfg;
    for (int v : S) out.in_S.at(v) = 1;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (cfg.in_S[v] && !out.in_S[v]) throw std::invalid_argument("cutting map cannot shrink S");
    for (int c = 0; c < out.num_copies(); ++c)
        if (out.in_S[g.target(out.half[c])]) out.next[c] = -1;
    return out;
}

CuttingCheck verify_cutting(const PlanarGraph& g, const Current& n, const VertexSet& S_small, const VertexSet& S_big,
                            double beta) {
    CuttingCheck r;
    std::map<std::vector<int>, std::pair<double, int>> images;
    enumerate_consistent(g, n, S_small, [&](const LoopConfig& cfg) {
        LoopConfig img = cutting_map(g, cfg, S_big);
        auto& slot = images[config_key(img)];
        slot.first += std::exp(weight_lambda(g, cfg, beta));
        slot.second += 1;
    });
    r.images = int(images.size());
    auto big = vertex_mask(g, S_big), small = vertex_mask(g, S_small);
    std::vector<int> in(g.num_vertices(), 0);
    for (int h = 0; h < g.num_half_edges(); ++h) in[g.target(h)] += n[h];
    double expected = 1.0;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (big[v] && !small[v]) expected *= std::exp(log_factorial(in[v]));
    enumerate_consistent(g, n, S_big, [&](const LoopConfig& cfg) {
        r.target_configs++;
        auto it = images.find(config_key(cfg));
        if (it == images.end()) {
            r.preimage_counts_ok = false;
            return;
        }
        double lam = std::exp(weight_lambda(g, cfg, beta));
        r.max_rel_residual = std::max(r.max_rel_residual, std::abs(it->second.first - lam) / lam);
        if (std::abs(it->second.second - expected) > 0.5) r.preimage_counts_ok = false;
    });
    if (r.images != r.target_configs) r.preimage_counts_ok = false;
    return r;
}

std::vector<std::vector<int>> config_loops(const LoopConfig& cfg) {
    auto pred = predecessors(cfg);
    std::vector<char> seen(cfg.num_copies(), 0);
    // Copies on open paths are excluded first.
    for (int c = 0; c < cfg.num_copies(); ++c) {
        if (pred[c] >= 0) continue;
        for (int x = c; x >= 0 && !seen[x]; x = cfg.next[x]) seen[x] = 1;
    }
    std::vector<std::vector<int>> loops;
    for (int c = 0; c < cfg.num_copies(); ++c) {
        if (seen[c]) continue;
        std::vector<int> loop;
        for (int x = c; !seen[x]; x = cfg.next[x]) {
            seen[x] = 1;
            loop.push_back(x);
        }
        loops.push_back(std::move(loop));
    }
    return loops;
}

std::vector<std::vector<int>> config_paths(const PlanarGraph& g, const LoopConfig& cfg) {
    auto pred = predecessors(cfg);
    std::vector<int> starts;
    for (int c = 0; c < cfg.num_copies(); ++c)
        if (pred[c] < 0) starts.push_back(c);
    std::stable_sort(starts.begin(), starts.end(),
                     [&](int x, int y) { return g.origin(cfg.half[x]) < g.origin(cfg.half[y]); });
    std::vector<std::vector<int>> paths;
    for (int s : starts) {
        std::vector<int> p;
        for (int x = s; x >= 0; x = cfg.next[x]) p.push_back(x);
        paths.push_back(std::move(p));
    }
    return paths;
}

int count_m(const PlanarGraph& g, const LoopConfig& cfg, int a, int b) {
    if (a == b) throw std::invalid_argument("count_m needs distinct vertices");
    int m = 0;
    for (int c = 0; c < cfg.num_copies(); ++c) {
        if (g.origin(cfg.half[c]) != a) continue;
        int cur = c;
        while (true) {
            int t = g.target(cfg.half[cur]);
            if (t == a || t == b) {
                if (t == b) ++m;
                break;
            }
            cur = cfg.next[cur];
            if (cur < 0) break;
        }
    }
    return m;
}

long winding_at_face(const PlanarGraph& g, const LoopConfig& cfg, int face) {
    auto p = g.interior_point(face);
    if (!p || !g.has_coords()) throw UnsupportedGraph("angle winding needs coordinates");
    long total = 0;
    for (const auto& loop : config_loops(cfg)) {
        double turn = 0.0;
        for (int c : loop) {
            const Point& s = g.coord(g.origin(cfg.half[c]));
            const Point& t = g.coord(g.target(cfg.half[c]));
            double d = std::atan2(t.y - p->y, t.x - p->x) - std::atan2(s.y - p->y, s.x - p->x);
            while (d > std::numbers::pi) d -= 2 * std::numbers::pi;
            while (d <= -std::numbers::pi) d += 2 * std::numbers::pi;
            turn += d;
        }
        total += std::lround(turn / (2 * std::numbers::pi));
    }
    return total;
}

HeightField winding_field_crossings(const PlanarGraph& g, const LoopConfig& cfg) {
    HeightField w(g.num_faces(), 0);
    auto loops = config_loops(cfg);
    for (int u = 0; u < g.num_faces(); ++u) {
        if (u == g.outer_face()) continue;
        auto sign = crossing_signs(g, u);
        for (const auto& loop : loops)
            for (int c : loop) w[u] += sign[cfg.half[c]];
    }
    return w;
}

HeightField winding_field(const PlanarGraph& g, const LoopConfig& cfg) {
    for (char s : cfg.in_S)
        if (s) throw std::invalid_argument("winding field needs S empty");
    if (!g.box() || !g.has_coords()) return winding_field_crossings(g, cfg);
    HeightField w(g.num_faces(), 0);
    for (int u = 0; u < g.num_faces(); ++u)
        if (u != g.outer_face()) w[u] = winding_at_face(g, cfg, u);
    return w;
}

LoopConfig reverse_all(const PlanarGraph&, const LoopConfig& cfg) {
    LoopConfig out = cfg;
    std::fill(out.next.begin(), out.next.end(), -1);
    for (int c = 0; c < cfg.num_copies(); ++c) {
        out.half[c] ^= 1;
        if (cfg.next[c] >= 0) out.next[cfg.next[c]] = c;
    }
    return out;
}

LoopConfig reverse_path(const PlanarGraph&, const LoopConfig& cfg, const std::vector<int>& path) {
    if (path.empty()) throw std::invalid_argument("empty path");
    auto pred = predecessors(cfg);
    if (pred[path.front()] >= 0 || cfg.next[path.back()] >= 0) throw std::invalid_argument("not a maximal open path");
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (cfg.next[path[i]] != path[i + 1]) throw std::invalid_argument("copies do not form a path");
    LoopConfig out = cfg;
    for (int c : path) out.half[c] ^= 1;
    out.next[path.front()] = -1;
    for (std::size_t i = 1; i < path.size(); ++i) out.next[path[i]] = path[i - 1];
    return out;
}

ReversalCheck verify_path_reversal(const PlanarGraph& g, double beta, int a, int b, const std::vector<int>& M) {
    ReversalCheck r;
    VertexSet S{a, b};
    SourceFunction phi = point_sources(g, a, b, 2);
    std::set<std::vector<int>> images, targets;
    for_each_current_with_amplitudes(g, M, [&](const Current& n) {
        auto d = divergence(g, n);
        bool sourced = d == phi;
        bool sourceless = std::all_of(d.begin(), d.end(), [](int x) { return x == 0; });
        if (!sourced && !sourceless) return;
        enumerate_consistent(g, n, S, [&](const LoopConfig& cfg) {
            double lam = std::exp(weight_lambda(g, cfg, beta));
            auto paths = config_paths(g, cfg);
            if (sourced) {
                r.sourced_sum += lam;
                for (const auto& p : paths) {
                    if (g.origin(cfg.half[p.front()]) != a || g.target(cfg.half[p.back()]) != b) continue;
                    LoopConfig rev = reverse_path(g, cfg, p);
                    double lam2 = std::exp(weight_lambda(g, rev, beta));
                    if (std::abs(lam2 - lam) > 1e-12 * lam) r.weights_preserved = false;
                    auto key = config_key(rev);
                    key.push_back(p.back());
                    if (!images.insert(key).second) r.bijective = false;
                    r.pairs++;
                }
            } else {
                int m = 0;
                for (const auto& p : paths) {
                    if (g.origin(cfg.half[p.front()]) != b || g.target(cfg.half[p.back()]) != a) continue;
                    ++m;
                    auto key = config_key(cfg);
                    key.push_back(p.front());
                    targets.insert(key);
                }
                r.reversed_sum += lam * m / (m + 1.0);
            }
        });
    });
    if (images != targets) r.bijective = false;
    return r;
}

double eulerian_factor(const PlanarGraph& g, const std::vector<int>& M) {
    std::vector<int> edge_of_copy;
    for (int e = 0; e < g.num_edges(); ++e)
        for (int j = 0; j < M[e]; ++j) edge_of_copy.push_back(e);
    int T = int(edge_of_copy.size());
    if (T > 20) throw GuardError("Eulerian orientation count refused", T);
    double count = 0;
    std::vector<int> bal(g.num_vertices());
    for (unsigned long mask = 0; mask < (1ul << T); ++mask) {
        std::fill(bal.begin(), bal.end(), 0);
        for (int j = 0; j < T; ++j) {
            const auto& ed = g.edge(edge_of_copy[j]);
            int dir = (mask >> j & 1ul) ? 1 : -1;
            bal[ed.u] += dir;
            bal[ed.v] -= dir;
        }
        if (std::all_of(bal.begin(), bal.end(), [](int x) { return x == 0; })) count += 1;
    }
    return count;
}

std::pair<double, double> eulerian_marginal(const PlanarGraph& g, double beta, const std::vector<int>& M) {
    double from_currents = 0.0;
    for_each_current_with_amplitudes(g, M, [&](const Current& n) {
        if (is_sourceless(g, n)) from_currents += std::exp(weight_log(g, n, beta));
    });
    double lw = 0.0;
    for (int e = 0; e < g.num_edges(); ++e)
        if (M[e] > 0) lw += M[e] * std::log(0.5 * beta * g.coupling(e)) - log_factorial(M[e]);
    return {from_currents, eulerian_factor(g, M) * std::exp(lw)};
}

double for_each_weighted_current(const PlanarGraph& g, double beta, const SourceFunction& phi, int cutoff,
                                 double threshold, double bound_scale,
                                 const std::function<void(const Current&, double)>& visit) {
    int E = g.num_edges(), N = cutoff;
    // term[e][l][X]: scaled weight of (net |l|, X) on edge e; bterm at bound_scale * beta.
    std::vector<std::vector<std::vector<double>>> term(E), bterm(E);
    std::vector<std::vector<double>> btotal(E, std::vector<double>(N + 1, 0.0));
    auto scaled = [](double x, int l, int X) {
        if (x == 0) return (l == 0 && X == 0) ? 1.0 : 0.0;
        return std::exp(-2 * x + (2 * X + l) * std::log(x) - log_factorial(X) - log_factorial(X + l));
    };
    for (int e = 0; e < E; ++e) {
        double x = 0.5 * beta * g.coupling(e);
        term[e].resize(N + 1);
        bterm[e].resize(N + 1);
        for (int l = 0; l <= N; ++l)
            for (int X = 0; X + l <= N; ++X) {
                term[e][l].push_back(scaled(x, l, X));
                bterm[e][l].push_back(scaled(bound_scale * x, l, X));
                btotal[e][l] += bterm[e][l].back();
            }
    }
    double skipped = 0.0;
    Current n(g.num_half_edges(), 0);
    std::vector<double> suffix(E + 1, 1.0);
    enumerate_net_flows(g, phi, N, [&](const std::vector<int>& flow) {
        for (int e = E - 1; e >= 0; --e) suffix[e] = suffix[e + 1] * btotal[e][std::abs(flow[e])];
        if (suffix[0] < threshold) {
            skipped += suffix[0];
            return;
        }
        auto rec = [&](auto&& self, int e, double w, double bound) -> void {
            if (e == E) {
                visit(n, w);
                return;
            }
            int l = std::abs(flow[e]);
            for (int X = 0; X + l <= N; ++X) {
                double b = bound * bterm[e][l][X];
                if (b * suffix[e + 1] < threshold) {
                    skipped += b * suffix[e + 1];
                    continue;
                }
                n[2 * e] = X + std::max(flow[e], 0);
                n[2 * e + 1] = X + std::max(-flow[e], 0);
                self(self, e + 1, w * term[e][l][X], b);
            }
        };
        rec(rec, 0, 1.0, 1.0);
    });
    return skipped;
}

SwitchCheck higher_power_verify(const PlanarGraph& g, double beta, int a, int b, int k, int cutoff) {
    if (k < 1) throw std::invalid_argument("power must be at least 1");
    if (a == b) throw std::invalid_argument("switching needs distinct vertices");
    SwitchCheck r;
    r.cutoff = cutoff;
    r.correlator = partition_and_correlators(g, beta, a, b, 2 * k, cutoff);
    double Z0 = r.correlator.denominator.value;
    double Zs = 0.0, Q = 0.0, P = 0.0;
    double skipped = for_each_weighted_current(
        g, beta, SourceFunction(g.num_vertices(), 0), cutoff, 1e-16 * Z0, 1.0, [&](const Current& n, double w) {
            auto pm = strand_count_law(g.num_vertices(), bundles_of(g, n), a, b);
            double f = 0.0, p = 0.0;
            for (int m = 0; m < int(pm.size()); ++m) {
                f += pm[m] * falling(m, k) / falling(m + k, k);
                if (m > 0) p += pm[m];
            }
            if (k == 1 && (0.5 * p > f * (1 + 1e-14) + 1e-300 || f > p * (1 + 1e-14) + 1e-300)) r.sandwich = false;
            Zs += w;
            Q += w * f;
            P += w * p;
            r.currents++;
        });
    double u = skipped + truncation_tail(g, beta, cutoff);
    r.loop_included = Q / Zs;
    r.p_included = P / Zs;
    r.loop_value = {Q / (Zs + u), (Q + u) / (Zs + u)};
    r.p_positive = {P / (Zs + u), (P + u) / (Zs + u)};
    double slack = 1e-12 * std::max(1.0, r.correlator.upper);
    r.agree = r.correlator.lower <= r.loop_value.upper + slack && r.loop_value.lower <= r.correlator.upper + slack;
    return r;
}

SwitchCheck single_switch_verify(const PlanarGraph& g, double beta, int a, int b, int cutoff) {
    return higher_power_verify(g, beta, a, b, 1, cutoff);
}

}  // namespace xyl
