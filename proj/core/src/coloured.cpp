#include "xyloops/coloured.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <deque>
#include <stdexcept>

#include "xyloops/quadrature.hpp"
#include "xyloops/strand_law.hpp"

namespace xyl {

namespace {

double log_factorial(int n) { return std::lgamma(n + 1.0); }

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return std::round(std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k)));
}

std::vector<int> predecessors(const LoopConfig& cfg) {
    std::vector<int> pred(cfg.num_copies(), -1);
    for (int c = 0; c < cfg.num_copies(); ++c)
        if (cfg.next[c] >= 0) pred[cfg.next[c]] = c;
    return pred;
}

std::vector<StrandBundle> bundles_of(const PlanarGraph& g, const Current& n) {
    std::vector<StrandBundle> out;
    for (int h = 0; h < g.num_half_edges(); ++h)
        if (n[h] > 0) out.push_back({g.origin(h), g.target(h), n[h]});
    return out;
}

// Injections from `from` into `to` (|from| <= |to|), one element at a time.
template <class F>
void for_each_injection(const std::vector<int>& from, const std::vector<int>& to, std::vector<int>& image, F&& f,
                        std::size_t i = 0) {
    if (i == from.size()) {
        f();
        return;
    }
    std::vector<char> used(to.size(), 0);
    for (std::size_t k = 0; k < i; ++k)
        for (std::size_t j = 0; j < to.size(); ++j)
            if (to[j] == image[k]) used[j] = 1;
    for (std::size_t j = 0; j < to.size(); ++j) {
        if (used[j]) continue;
        image[i] = to[j];
        for_each_injection(from, to, image, f, i + 1);
    }
}

double count_injections(int k, int m) {
    // Counted by enumeration of partial permutations.
    std::vector<int> from(k), to(m), image(k);
    for (int i = 0; i < k; ++i) from[i] = i;
    for (int j = 0; j < m; ++j) to[j] = j;
    double c = 0;
    for_each_injection(from, to, image, [&] { c += 1; });
    return c;
}

std::vector<int> closing_order(const PlanarGraph& g) {
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
                if (!used[h >> 1]) {
                    used[h >> 1] = 1;
                    order.push_back(h >> 1);
                }
                if (!seen[g.target(h)]) {
                    seen[g.target(h)] = 1;
                    q.push_back(g.target(h));
                }
            }
        }
    }
    return order;
}

SourceFunction sources_of(const PlanarGraph& g, const LoopConfig& cfg) {
    return divergence(g, config_current(g, cfg));
}

}  // namespace

Current red_current(const PlanarGraph& g, const ColouredConfig& cfg) {
    Current n(g.num_half_edges(), 0);
    for (int c = 0; c < cfg.base.num_copies(); ++c)
        if (cfg.colour[c] == Red) n[cfg.base.half[c]]++;
    return n;
}

Current blue_current(const PlanarGraph& g, const ColouredConfig& cfg) {
    Current n(g.num_half_edges(), 0);
    for (int c = 0; c < cfg.base.num_copies(); ++c)
        if (cfg.colour[c] == Blue) n[cfg.base.half[c]]++;
    return n;
}

double coloured_count_formula(const PlanarGraph& g, const Current& r, const Current& b, const VertexSet& S) {
    auto mask = vertex_mask(g, S);
    double lc = 0.0;
    Current n(r.size());
    for (std::size_t h = 0; h < r.size(); ++h) n[h] = r[h] + b[h];
    for (int e = 0; e < g.num_edges(); ++e)
        lc += log_factorial(n[2 * e] + n[2 * e + 1]) - log_factorial(r[2 * e]) - log_factorial(r[2 * e + 1]) -
              log_factorial(b[2 * e]) - log_factorial(b[2 * e + 1]);
    std::vector<int> in(g.num_vertices(), 0), out(g.num_vertices(), 0);
    for (int h = 0; h < g.num_half_edges(); ++h) {
        in[g.target(h)] += n[h];
        out[g.origin(h)] += n[h];
    }
    for (int v = 0; v < g.num_vertices(); ++v)
        if (!mask[v]) lc += log_factorial(std::max(in[v], out[v])) - log_factorial(std::abs(out[v] - in[v]));
    return std::round(std::exp(lc));
}

void enumerate_coloured(const PlanarGraph& g, const Current& r, const Current& b, const VertexSet& S,
                        const std::function<void(const ColouredConfig&)>& visit, double max_configs) {
    auto mask = vertex_mask(g, S);
    int E = g.num_edges(), V = g.num_vertices();
    Current n(r.size());
    long copies = 0;
    for (std::size_t h = 0; h < r.size(); ++h) copies += n[h] = r[h] + b[h];
    if (copies > 24) throw GuardError("coloured enumeration refused: " + std::to_string(copies) + " copies", copies);
    double count = coloured_count_formula(g, r, b, S);
    if (count > max_configs)
        throw GuardError("coloured enumeration refused: " + std::to_string(count) + " configurations", count);

    ColouredConfig cfg;
    cfg.base.offset.assign(E + 1, 0);
    for (int e = 0; e < E; ++e) cfg.base.offset[e + 1] = cfg.base.offset[e] + n[2 * e] + n[2 * e + 1];
    cfg.base.half.assign(copies, -1);
    cfg.base.next.assign(copies, -1);
    cfg.base.in_S = mask;
    cfg.colour.assign(copies, Red);
    cfg.phi = divergence(g, n);

    std::vector<int> free_vertices;
    for (int v = 0; v < V; ++v)
        if (!mask[v]) free_vertices.push_back(v);

    auto pair_vertices = [&](auto&& self, std::size_t i) -> void {
        if (i == free_vertices.size()) {
            visit(cfg);
            return;
        }
        int v = free_vertices[i];
        std::vector<int> in, out;
        for (int c = 0; c < int(copies); ++c) {
            if (g.target(cfg.base.half[c]) == v) in.push_back(c);
            if (g.origin(cfg.base.half[c]) == v) out.push_back(c);
        }
        if (in.size() <= out.size()) {
            std::vector<int> image(in.size());
            for_each_injection(in, out, image, [&] {
                for (std::size_t j = 0; j < in.size(); ++j) cfg.base.next[in[j]] = image[j];
                self(self, i + 1);
            });
        } else {
            std::vector<int> image(out.size());
            for_each_injection(out, in, image, [&] {
                for (int c : in) cfg.base.next[c] = -1;
                for (std::size_t j = 0; j < out.size(); ++j) cfg.base.next[image[j]] = out[j];
                self(self, i + 1);
            });
        }
        for (int c : in) cfg.base.next[c] = -1;
    };

    // Per edge: labels take one of four classes (red fwd, red bwd, blue fwd, blue bwd).
    auto assign = [&](auto&& self, int e, int j, std::array<int, 4> left) -> void {
        if (e == E) {
            pair_vertices(pair_vertices, 0);
            return;
        }
        int base = cfg.base.offset[e], m = cfg.base.offset[e + 1] - base;
        if (j == m) {
            if (e + 1 < E) {
                std::array<int, 4> nl{r[2 * e + 2], r[2 * e + 3], b[2 * e + 2], b[2 * e + 3]};
                self(self, e + 1, 0, nl);
            } else {
                self(self, e + 1, 0, left);
            }
            return;
        }
        for (int k = 0; k < 4; ++k) {
            if (left[k] == 0) continue;
            cfg.base.half[base + j] = 2 * e + (k & 1);
            cfg.colour[base + j] = (k < 2) ? Red : Blue;
            --left[k];
            self(self, e, j + 1, left);
            ++left[k];
        }
    };
    if (E == 0) {
        pair_vertices(pair_vertices, 0);
        return;
    }
    assign(assign, 0, 0, std::array<int, 4>{r[0], r[1], b[0], b[1]});
}

double enumerate_coloured_count(const PlanarGraph& g, const Current& r, const Current& b, const VertexSet& S) {
    auto mask = vertex_mask(g, S);
    double total = 1.0;
    for (int e = 0; e < g.num_edges(); ++e) {
        std::array<int, 4> cnt{r[2 * e], r[2 * e + 1], b[2 * e], b[2 * e + 1]};
        int m = cnt[0] + cnt[1] + cnt[2] + cnt[3];
        if (m > 16) throw GuardError("colour assignment enumeration refused", m);
        double c = 0;
        auto rec = [&](auto&& self, int j) -> void {
            if (j == m) {
                c += 1;
                return;
            }
            for (int k = 0; k < 4; ++k)
                if (cnt[k] > 0) {
                    --cnt[k];
                    self(self, j + 1);
                    ++cnt[k];
                }
        };
        rec(rec, 0);
        total *= c;
    }
    std::vector<int> in(g.num_vertices(), 0), out(g.num_vertices(), 0);
    for (int h = 0; h < g.num_half_edges(); ++h) {
        in[g.target(h)] += r[h] + b[h];
        out[g.origin(h)] += r[h] + b[h];
    }
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (mask[v]) continue;
        int k = std::min(in[v], out[v]), m = std::max(in[v], out[v]);
        if (m > 10) throw GuardError("pairing enumeration refused", m);
        total *= count_injections(k, m);
    }
    return total;
}

void validate_coloured(const PlanarGraph& g, const ColouredConfig& cfg) {
    const LoopConfig& L = cfg.base;
    if (sources_of(g, L) != cfg.phi) throw ValidationError("sources do not match the copies");
    std::vector<int> pred(L.num_copies(), -1), open_in(g.num_vertices(), 0), open_out(g.num_vertices(), 0);
    for (int c = 0; c < L.num_copies(); ++c) {
        int t = g.target(L.half[c]);
        int nx = L.next[c];
        if (L.in_S[t]) {
            if (nx >= 0) throw ValidationError("pairing at a vertex of S");
            continue;
        }
        if (nx < 0) {
            open_in[t]++;
            continue;
        }
        if (g.origin(L.half[nx]) != t) throw ValidationError("pairing joins copies at different vertices");
        if (pred[nx] >= 0) throw ValidationError("outgoing copy paired twice");
        pred[nx] = c;
    }
    for (int c = 0; c < L.num_copies(); ++c)
        if (pred[c] < 0) open_out[g.origin(L.half[c])]++;
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (L.in_S[v]) continue;
        if (open_out[v] != std::max(cfg.phi[v], 0) || open_in[v] != std::max(-cfg.phi[v], 0))
            throw ValidationError("unpaired ends at vertex " + g.label(v) + " do not match its sources");
    }
}

double weight_lambda_tilde(const PlanarGraph& g, const ColouredConfig& cfg, double beta) {
    auto M = config_multigraph(g, cfg.base);
    std::vector<int> deg(g.num_vertices(), 0);
    double s = 0.0;
    for (int e = 0; e < g.num_edges(); ++e) {
        if (M[e] == 0) continue;
        s += M[e] * std::log(0.5 * beta * g.coupling(e)) - log_factorial(M[e]);
        deg[g.edge(e).u] += M[e];
        deg[g.edge(e).v] += M[e];
    }
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (cfg.base.in_S[v]) continue;
        int p = std::abs(cfg.phi[v]);
        if ((deg[v] + p) % 2 != 0) throw ValidationError("odd degree plus sources at vertex " + g.label(v));
        s += log_factorial(p) - log_factorial((deg[v] + p) / 2);
    }
    return s;
}

ColouredExpansionCheck verify_loopexp1(const PlanarGraph& g, const Current& r, const Current& b, const VertexSet& S,
                                       double beta, double max_explicit) {
    ColouredExpansionCheck c;
    c.current_weight = std::exp(weight_log(g, r, beta) + weight_log(g, b, beta));
    double formula = coloured_count_formula(g, r, b, S);
    if (formula <= max_explicit) {
        c.explicit_enumeration = true;
        double s = 0.0, comp = 0.0;
        enumerate_coloured(
            g, r, b, S,
            [&](const ColouredConfig& cfg) {
                validate_coloured(g, cfg);
                if (red_current(g, cfg) != r || blue_current(g, cfg) != b)
                    throw ValidationError("enumerated configuration has the wrong colours");
                double y = std::exp(weight_lambda_tilde(g, cfg, beta)) - comp;
                double t = s + y;
                comp = (t - s) - y;
                s = t;
                c.configs += 1;
            },
            max_explicit);
        c.loop_sum = s;
    } else {
        c.configs = enumerate_coloured_count(g, r, b, S);
        ColouredConfig probe;
        Current n(r.size());
        for (std::size_t h = 0; h < r.size(); ++h) n[h] = r[h] + b[h];
        probe.base.offset.assign(g.num_edges() + 1, 0);
        for (int e = 0; e < g.num_edges(); ++e) probe.base.offset[e + 1] = probe.base.offset[e] + n[2 * e] + n[2 * e + 1];
        for (int e = 0; e < g.num_edges(); ++e) {
            for (int j = 0; j < n[2 * e]; ++j) probe.base.half.push_back(2 * e);
            for (int j = 0; j < n[2 * e + 1]; ++j) probe.base.half.push_back(2 * e + 1);
        }
        probe.base.in_S = vertex_mask(g, S);
        probe.phi = divergence(g, n);
        c.loop_sum = c.configs * std::exp(weight_lambda_tilde(g, probe, beta));
    }
    c.rel_residual = std::abs(c.loop_sum - c.current_weight) / c.current_weight;
    return c;
}

ColouredConfig switch_path(const PlanarGraph& g, const ColouredConfig& cfg, const std::vector<int>& path) {
    if (path.empty()) throw std::invalid_argument("empty path");
    auto pred = predecessors(cfg.base);
    if (pred[path.front()] >= 0 || cfg.base.next[path.back()] >= 0)
        throw std::invalid_argument("switch_path needs a maximal open path");
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (cfg.base.next[path[i]] != path[i + 1]) throw std::invalid_argument("copies do not form a path");
    ColouredConfig out = cfg;
    for (int c : path) {
        out.base.half[c] ^= 1;
        out.colour[c] = cfg.colour[c] == Red ? Blue : Red;
    }
    out.base.next[path.front()] = -1;
    for (std::size_t i = 1; i < path.size(); ++i) out.base.next[path[i]] = path[i - 1];
    out.phi[g.origin(cfg.base.half[path.front()])] -= 2;
    out.phi[g.target(cfg.base.half[path.back()])] += 2;
    return out;
}

std::pair<double, double> binomial_split_sum(const PlanarGraph& g, const Current& n, const SourceFunction& phi_r,
                                             int half) {
    // Summing over (r_fwd, r_bwd) with fixed net l on an edge gives C(M_e, n_bwd + l)
    // (Vandermonde); the r_{half}-weighted sum gives n_h C(M_e - 1, ...).
    int V = g.num_vertices(), E = g.num_edges();
    auto order = closing_order(g);
    std::vector<long> out_cap(V, 0), in_cap(V, 0), d(V, 0);
    for (int e = 0; e < E; ++e) {
        int u = g.edge(e).u, w = g.edge(e).v;
        out_cap[u] += n[2 * e];
        in_cap[u] += n[2 * e + 1];
        out_cap[w] += n[2 * e + 1];
        in_cap[w] += n[2 * e];
    }
    auto ok = [&](int v) {
        long need = long(phi_r[v]) - d[v];
        return need <= out_cap[v] && -need <= in_cap[v];
    };
    for (int v = 0; v < V; ++v)
        if (!ok(v)) return {0.0, 0.0};
    int he = half >= 0 ? half >> 1 : -1;
    double s0 = 0.0, s1 = 0.0;
    auto rec = [&](auto&& self, std::size_t i, double w0, double w1) -> void {
        if (i == order.size()) {
            s0 += w0;
            s1 += w1;
            return;
        }
        int e = order[i];
        int u = g.edge(e).u, w = g.edge(e).v;
        int nf = n[2 * e], nb = n[2 * e + 1], M = nf + nb;
        out_cap[u] -= nf, in_cap[u] -= nb, out_cap[w] -= nb, in_cap[w] -= nf;
        for (int l = -nb; l <= nf; ++l) {
            d[u] += l;
            d[w] -= l;
            if (ok(u) && ok(w)) {
                double f0 = binom(M, nb + l);
                double f1 = f0;
                if (e == he) f1 = (half & 1) ? nb * binom(M - 1, nf - 1 - l) : nf * binom(M - 1, nb + l - 1);
                if (f0 > 0 || f1 > 0) self(self, i + 1, w0 * f0, w1 * f1);
            }
            d[u] -= l;
            d[w] += l;
        }
        out_cap[u] += nf, in_cap[u] += nb, out_cap[w] += nb, in_cap[w] += nf;
    };
    rec(rec, 0, 1.0, 1.0);
    return {s0, half >= 0 ? s1 : 0.0};
}

SwitchCheck double_switch_verify(const PlanarGraph& g, double beta, int a, int b, int cutoff) {
    if (a == b) throw std::invalid_argument("switching needs distinct vertices");
    SwitchCheck r;
    r.cutoff = cutoff;
    CorrelatorResult c = partition_and_correlators(g, beta, a, b, 1, cutoff);
    r.correlator = c;
    r.correlator.ratio = c.ratio * c.ratio;
    r.correlator.lower = c.lower * c.lower;
    r.correlator.upper = c.upper * c.upper;
    double Z = c.denominator.value;
    double sumJ = 0.0;
    for (int e = 0; e < g.num_edges(); ++e) sumJ += g.coupling(e);
    double scale = std::exp(-beta * sumJ);
    SourceFunction zero(g.num_vertices(), 0);
    double ZZ = 0.0, Q = 0.0, P = 0.0;
    double skipped =
        for_each_weighted_current(g, beta, zero, cutoff, 1e-16 * Z * Z, 2.0, [&](const Current& n, double w) {
            double W = w * scale * binomial_split_sum(g, n, zero).first;
            auto pm = strand_count_law(g.num_vertices(), bundles_of(g, n), a, b);
            double f = 0.0, p = 0.0;
            for (int m = 1; m < int(pm.size()); ++m) {
                f += pm[m] * m / (m + 1.0);
                p += pm[m];
            }
            if (0.5 * p > f * (1 + 1e-14) + 1e-300 || f > p * (1 + 1e-14) + 1e-300) r.sandwich = false;
            ZZ += W;
            Q += W * f;
            P += W * p;
            r.currents++;
        });
    // Pairs (r, b) with some entry of r + b above the cutoff.
    double u = skipped + truncation_tail(g, 2 * beta, cutoff);
    r.loop_included = Q / ZZ;
    r.p_included = P / ZZ;
    r.loop_value = {Q / (ZZ + u), (Q + u) / (ZZ + u)};
    r.p_positive = {P / (ZZ + u), (P + u) / (ZZ + u)};
    double slack = 1e-12 * std::max(1.0, r.correlator.upper);
    r.agree = r.correlator.lower <= r.loop_value.upper + slack && r.loop_value.lower <= r.correlator.upper + slack;
    return r;
}

namespace {

CorrelatorResult correlator_for(const PlanarGraph& g, double beta, const SourceFunction& phi, int cutoff) {
    TruncatedSum den = partition_function(g, beta, SourceFunction(g.num_vertices(), 0), cutoff);
    if (std::all_of(phi.begin(), phi.end(), [](int x) { return x == 0; })) {
        CorrelatorResult r = ratio_enclosure(den, den, 0.0);
        r.ratio = 1.0;
        r.lower = std::min(r.lower, 1.0);
        r.upper = std::max(r.upper, 1.0);
        return r;
    }
    return ratio_enclosure(partition_function(g, beta, phi, cutoff), den, 0.0);
}

}  // namespace

FerromagnetCheck ferromagnet_verify(const PlanarGraph& g, double beta, int a, int b, int c, int cutoff,
                                    double tolerance) {
    FerromagnetCheck f;
    int V = g.num_vertices();
    auto pair = [&](int x, int y) {
        SourceFunction phi(V, 0);
        phi[x] += 1;
        phi[y] -= 1;
        return phi;
    };
    SourceFunction four(V, 0);
    four[a] += 1;
    four[b] += 1;
    four[c] -= 2;
    auto ab = correlator_for(g, beta, pair(a, b), cutoff);
    auto ac = correlator_for(g, beta, pair(a, c), cutoff);
    auto cb = correlator_for(g, beta, pair(c, b), cutoff);
    auto abcc = correlator_for(g, beta, four, cutoff);
    f.ab = ab.ratio, f.ac = ac.ratio, f.cb = cb.ratio, f.abcc = abcc.ratio;
    f.first_margin = f.ab - f.ac * f.cb;
    f.second_margin = f.ac * f.cb - f.abcc;
    double lo1 = ab.lower - ac.upper * cb.upper;
    double lo2 = ac.lower * cb.lower - abcc.upper;
    f.enclosure = std::max(f.first_margin - lo1, f.second_margin - lo2);
    if (V <= 5) {
        auto q = [&](const Monomial& m) { return quad_correlator(g, beta, m).value; };
        double qab = a == b ? 1.0 : q({{a, 1}, {b, -1}});
        double qac = a == c ? 1.0 : q({{a, 1}, {c, -1}});
        double qcb = c == b ? 1.0 : q({{c, 1}, {b, -1}});
        double qabcc = q({{a, 1}, {b, 1}, {c, -2}});
        f.oracle_gap = std::max({std::abs(qab - f.ab), std::abs(qac - f.ac), std::abs(qcb - f.cb),
                                 std::abs(qabcc - f.abcc)});
    }
    f.passed = lo1 >= -tolerance && lo2 >= -tolerance;
    return f;
}

DerivativeCheck derivative_identity_check(const PlanarGraph& g, double beta, int a, int b, int e, int cutoff) {
    if (a == b) throw std::invalid_argument("derivative identity needs distinct vertices");
    DerivativeCheck d;
    double J = g.coupling(e);
    const double h = 1e-3;
    auto corr = [&](double Je) { return quad_correlator(g.with_coupling(e, Je), beta, {{a, 1}, {b, -1}}, 1e-13).value; };
    d.lhs = (-corr(J + 2 * h) + 8 * corr(J + h) - 8 * corr(J - h) + corr(J - 2 * h)) / (12 * h);

    int V = g.num_vertices();
    TruncatedSum Z0 = partition_function(g, beta, SourceFunction(V, 0), cutoff);
    double Z = Z0.value, t = Z0.tail_bound;
    double sumJ = 0.0;
    for (int k = 0; k < g.num_edges(); ++k) sumJ += g.coupling(k);
    double scale = std::exp(-beta * sumJ);
    SourceFunction phi = point_sources(g, a, b, 1);
    std::vector<int> sources(V + 1, 0);
    sources[a] = 1;
    sources[b] = -1;
    double sum = 0.0;
    double skipped =
        for_each_weighted_current(g, beta, phi, cutoff, 1e-24 * Z * Z, 2.0, [&](const Current& n, double w) {
            d.currents++;
            for (int dir : {2 * e, 2 * e + 1}) {
                if (n[dir] == 0) continue;
                // One copy of `dir` is routed through a marker vertex z = V.
                auto bundles = bundles_of(g, n);
                for (auto& bd : bundles)
                    if (bd.from == g.origin(dir) && bd.to == g.target(dir)) {
                        bd.count -= 1;
                        break;
                    }
                bundles.push_back({g.origin(dir), V, 1});
                bundles.push_back({V, g.target(dir), 1});
                StrandLaw law(V + 1, bundles, sources, {V});
                double p = 0.0;
                for (const auto& o : law.outcomes())
                    if (law.count(o, law.start_type(a), V) == 1) p += o.prob;
                auto [k0, k1] = binomial_split_sum(g, n, phi, dir);
                sum += w * scale * p * (2 * k1 - n[dir] * k0);
            }
        });
    d.rhs = sum / (J * Z * Z);
    double x = 0.5 * beta * J;
    double omitted = skipped + truncation_tail(g, 2 * beta, cutoff);
    d.rhs_bound = std::sqrt(4 * x + 16 * x * x) * std::sqrt(omitted) / (J * Z * Z) +
                  std::abs(d.rhs) * (2 * t / Z + t * t / (Z * Z));
    d.residual = std::abs(d.lhs - d.rhs);
    return d;
}

}  // namespace xyl
