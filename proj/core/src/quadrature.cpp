#include "xyloops/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace xyl {

namespace {

using cd = std::complex<double>;

struct Factor {
    std::vector<int> vars;  // sorted; table index = sum idx[vars[i]] * N^i
    std::vector<cd> t;
};

std::size_t ipow(int N, std::size_t k) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < k; ++i) r *= std::size_t(N);
    return r;
}

// Fix `var` at grid index 0.
Factor slice_at_zero(const Factor& f, int var, std::size_t N) {
    auto it = std::find(f.vars.begin(), f.vars.end(), var);
    if (it == f.vars.end()) return f;
    std::size_t pos = std::size_t(it - f.vars.begin());
    Factor out;
    out.vars = f.vars;
    out.vars.erase(out.vars.begin() + long(pos));
    out.t.assign(ipow(int(N), out.vars.size()), cd(0));
    std::size_t stride = ipow(int(N), pos);
    for (std::size_t i = 0; i < out.t.size(); ++i) {
        std::size_t lo = i % stride, hi = i / stride;
        out.t[i] = f.t[lo + hi * stride * N];
    }
    return out;
}

cd integrate(const PlanarGraph& g, double beta, const Monomial& mono, int N) {
    int V = g.num_vertices();
    std::vector<Factor> factors;
    for (int e = 0; e < g.num_edges(); ++e) {
        int u = g.edge(e).u, w = g.edge(e).v;
        double K = beta * g.coupling(e);
        Factor f;
        f.vars = {std::min(u, w), std::max(u, w)};
        f.t.resize(std::size_t(N) * N);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                f.t[i + std::size_t(j) * N] = std::exp(K * (std::cos(2 * std::numbers::pi * (i - j) / N) - 1.0));
        factors.push_back(std::move(f));
    }
    std::vector<int> power(V, 0);
    for (auto [v, k] : mono) power.at(v) += k;
    for (int v = 0; v < V; ++v) {
        if (power[v] == 0) continue;
        Factor f;
        f.vars = {v};
        f.t.resize(N);
        for (int i = 0; i < N; ++i) f.t[i] = std::polar(1.0, 2 * std::numbers::pi * power[v] * i / N);
        factors.push_back(std::move(f));
    }
    // One angle per component is fixed at 0 by rotation invariance.
    std::vector<char> is_root(V, 0), seen(g.num_components(), 0);
    for (int v = 0; v < V; ++v)
        if (!seen[g.component(v)]) {
            seen[g.component(v)] = 1;
            is_root[v] = 1;
            for (auto& f : factors) f = slice_at_zero(f, v, std::size_t(N));
        }
    std::vector<int> free;
    for (int v = 0; v < V; ++v)
        if (!is_root[v]) free.push_back(v);

    while (!free.empty()) {
        int best = -1;
        std::vector<int> best_scope;
        for (int v : free) {
            std::vector<int> scope;
            for (const auto& f : factors)
                if (std::binary_search(f.vars.begin(), f.vars.end(), v))
                    for (int x : f.vars) scope.push_back(x);
            std::sort(scope.begin(), scope.end());
            scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
            if (scope.empty()) scope.push_back(v);
            if (best < 0 || scope.size() < best_scope.size()) {
                best = v;
                best_scope = scope;
            }
        }
        if (best_scope.size() > 3) throw UnsupportedGraph("quadrature: elimination would couple more than 3 angles");
        std::vector<Factor> touching, rest;
        for (auto& f : factors)
            (std::binary_search(f.vars.begin(), f.vars.end(), best) ? touching : rest).push_back(std::move(f));
        std::size_t U = best_scope.size();
        std::size_t vpos = std::size_t(std::find(best_scope.begin(), best_scope.end(), best) - best_scope.begin());
        std::vector<std::vector<std::size_t>> strides(touching.size(), std::vector<std::size_t>(U, 0));
        for (std::size_t k = 0; k < touching.size(); ++k)
            for (std::size_t i = 0; i < touching[k].vars.size(); ++i) {
                std::size_t pos = std::size_t(
                    std::find(best_scope.begin(), best_scope.end(), touching[k].vars[i]) - best_scope.begin());
                strides[k][pos] = ipow(N, i);
            }
        Factor out;
        out.vars = best_scope;
        out.vars.erase(out.vars.begin() + long(vpos));
        out.t.assign(ipow(N, U - 1), cd(0));
        std::vector<int> idx(U, 0);
        std::size_t total = ipow(N, U);
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t r = flat;
            for (std::size_t p = 0; p < U; ++p) {
                idx[p] = int(r % N);
                r /= N;
            }
            cd prod(1.0);
            for (std::size_t k = 0; k < touching.size(); ++k) {
                std::size_t ti = 0;
                for (std::size_t p = 0; p < U; ++p) ti += strides[k][p] * std::size_t(idx[p]);
                prod *= touching[k].t[ti];
            }
            std::size_t oi = 0, mult = 1;
            for (std::size_t p = 0; p < U; ++p) {
                if (p == vpos) continue;
                oi += mult * std::size_t(idx[p]);
                mult *= N;
            }
            out.t[oi] += prod;
        }
        for (auto& x : out.t) x /= double(N);
        rest.push_back(std::move(out));
        factors.swap(rest);
        free.erase(std::find(free.begin(), free.end(), best));
    }
    cd result(1.0);
    for (const auto& f : factors) result *= f.t.at(0);
    return result;
}

bool charge_neutral(const PlanarGraph& g, const Monomial& mono) {
    std::vector<long> charge(g.num_components(), 0);
    for (auto [v, k] : mono) charge.at(g.component(v)) += k;
    return std::all_of(charge.begin(), charge.end(), [](long c) { return c == 0; });
}

}  // namespace

QuadResult quad_correlator(const PlanarGraph& g, double beta, const Monomial& mono, double tol, int max_vertices) {
    if (g.num_vertices() > max_vertices)
        throw UnsupportedGraph("quadrature limited to " + std::to_string(max_vertices) + " vertices");
    QuadResult r;
    if (!charge_neutral(g, mono)) {
        r.converged = true;
        return r;
    }
    double prev = 0.0;
    for (int N = 12; N <= 1536; N *= 2) {
        double val = (integrate(g, beta, mono, N) / integrate(g, beta, {}, N)).real();
        if (N > 12) {
            r.last_change = std::abs(val - prev);
            if (r.last_change < tol) {
                r.value = val;
                r.resolution = N;
                r.converged = true;
                return r;
            }
        }
        prev = val;
        r.value = val;
        r.resolution = N;
    }
    return r;
}

double quad_two_point(const PlanarGraph& g, double beta, int a, int b, int max_vertices) {
    if (a == b) return 1.0;
    return quad_correlator(g, beta, {{a, 1}, {b, -1}}, 1e-10, max_vertices).value;
}

double quad_log_partition(const PlanarGraph& g, double beta, double tol, int max_vertices) {
    if (g.num_vertices() > max_vertices)
        throw UnsupportedGraph("quadrature limited to " + std::to_string(max_vertices) + " vertices");
    double prev = 0.0;
    for (int N = 12; N <= 1536; N *= 2) {
        double val = std::log(integrate(g, beta, {}, N).real());
        if (N > 12 && std::abs(val - prev) < tol) return val;
        prev = val;
    }
    return prev;
}

}  // namespace xyl
