#include "xyloops/heights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace xyl {

double LogBesselTable::operator()(long k) {
    std::size_t a = std::size_t(std::labs(k));
    while (v_.size() <= a) v_.push_back(bessel_i_log(int(v_.size()), K_));
    return v_[a];
}

HeightChain::HeightChain(const PlanarGraph& g, double beta, std::uint64_t seed)
    : g_(g), seed_(seed), h_(g.num_faces(), 0), nbr_(g.num_faces()) {
    if (!g.connected()) throw UnsupportedGraph("height chain needs a connected graph");
    std::map<double, int> table_of;
    for (int f = 0; f < g.num_faces(); ++f) {
        if (f == g.outer_face()) continue;
        inner_.push_back(f);
        for (int h : g.face_walk(f)) {
            int other = g.right_face(h);
            if (other == f) continue;
            double K = beta * g.coupling(h >> 1);
            auto [it, added] = table_of.emplace(K, int(tables_.size()));
            if (added) tables_.emplace_back(K);
            nbr_[f].push_back({other, it->second});
        }
    }
}

void HeightChain::conditional(int face, std::vector<long>& values, std::vector<double>& weights) {
    auto lp = [&](long k) {
        double s = 0.0;
        for (auto [o, t] : nbr_[face]) s += tables_[t](k - h_[o]);
        return s;
    };
    values.clear();
    weights.clear();
    if (nbr_[face].empty()) throw UnsupportedGraph("face without neighbors");
    std::vector<long> hs;
    for (auto [o, t] : nbr_[face]) hs.push_back(h_[o]);
    std::nth_element(hs.begin(), hs.begin() + long(hs.size() / 2), hs.end());
    long mode = hs[hs.size() / 2];
    double lm = lp(mode);
    for (;;) {
        double up = lp(mode + 1), dn = lp(mode - 1);
        if (up > lm) {
            ++mode, lm = up;
        } else if (dn > lm) {
            --mode, lm = dn;
        } else {
            break;
        }
    }
    // Log-concavity: successive ratios decrease away from the mode, so the
    // remaining tail is below w r / (1 - r).
    std::vector<double> right, left;
    double total = 1.0;
    for (int dir : {1, -1}) {
        auto& side = dir > 0 ? right : left;
        double prev = 1.0;
        for (long k = mode + dir;; k += dir) {
            double w = std::exp(lp(k) - lm);
            side.push_back(w);
            total += w;
            double r = w / prev;
            prev = w;
            if (w == 0.0 || (r < 1.0 && w * r / (1.0 - r) < 1e-14 * total)) break;
        }
    }
    values.push_back(mode);
    weights.push_back(1.0);
    for (std::size_t i = 0; i < std::max(right.size(), left.size()); ++i) {
        if (i < right.size()) values.push_back(mode + long(i) + 1), weights.push_back(right[i]);
        if (i < left.size()) values.push_back(mode - long(i) - 1), weights.push_back(left[i]);
    }
}

void HeightChain::sweep() {
    std::vector<long> values;
    std::vector<double> weights;
    for (int f : inner_) {
        conditional(f, values, weights);
        double total = 0.0;
        for (double w : weights) total += w;
        CounterRng rng(seed_, std::uint32_t(sweep_), std::uint32_t(f), kHeightHeatBath);
        double u = rng.uniform() * total;
        std::size_t i = 0;
        for (; i + 1 < weights.size(); ++i) {
            u -= weights[i];
            if (u < 0.0) break;
        }
        h_[f] = values[i];
    }
    ++sweep_;
}

LoopAugmenter::LoopAugmenter(const PlanarGraph& g, double beta) : g_(g), beta_(beta) {}

LoopConfig LoopAugmenter::draw(const HeightField& h, CounterRng& rng) {
    int E = g_.num_edges(), V = g_.num_vertices();
    std::vector<int> X(E, 0);
    for (int e = 0; e < E; ++e) {
        int k = int(std::labs(h[g_.left_face(2 * e)] - h[g_.right_face(2 * e)]));
        double K = beta_ * g_.coupling(e);
        auto it = cache_.find({k, K});
        if (it == cache_.end()) it = cache_.emplace(std::pair{k, K}, YkDistribution(k, K)).first;
        X[e] = it->second.sample(rng);
    }
    n_ = assemble(g_, h, X);

    LoopConfig cfg;
    cfg.offset.assign(E + 1, 0);
    for (int e = 0; e < E; ++e) cfg.offset[e + 1] = cfg.offset[e] + n_[2 * e] + n_[2 * e + 1];
    int C = cfg.offset[E];
    cfg.half.assign(C, -1);
    cfg.next.assign(C, -1);
    cfg.in_S.assign(V, 0);
    std::vector<int> labels;
    for (int e = 0; e < E; ++e) {
        int M = cfg.offset[e + 1] - cfg.offset[e];
        labels.resize(M);
        for (int j = 0; j < M; ++j) labels[j] = cfg.offset[e] + j;
        // Partial Fisher-Yates: the first n(2e) labels go forward.
        for (int j = 0; j < n_[2 * e]; ++j) std::swap(labels[j], labels[j + int(rng.below(std::uint64_t(M - j)))]);
        for (int j = 0; j < M; ++j) cfg.half[labels[j]] = j < n_[2 * e] ? 2 * e : 2 * e + 1;
    }
    std::vector<std::vector<int>> in(V), out(V);
    for (int c = 0; c < C; ++c) {
        in[g_.target(cfg.half[c])].push_back(c);
        out[g_.origin(cfg.half[c])].push_back(c);
    }
    for (int v = 0; v < V; ++v) {
        auto& o = out[v];
        for (int j = int(o.size()) - 1; j > 0; --j) std::swap(o[j], o[int(rng.below(std::uint64_t(j + 1)))]);
        for (std::size_t j = 0; j < in[v].size(); ++j) cfg.next[in[v][j]] = o[j];
    }
    return cfg;
}

void run_height_pipeline(const PlanarGraph& g, double beta, const ChainSpec& spec,
                         const std::function<void(long, const HeightField&, const LoopConfig&)>& visit) {
    validate_chain_spec(spec);
    HeightChain chain(g, beta, spec.seed);
    LoopAugmenter aug(g, beta);
    for (long s = 0; s < spec.burn_in; ++s) chain.sweep();
    for (long i = 0; i < spec.samples; ++i) {
        for (long s = 0; s < spec.thinning; ++s) chain.sweep();
        CounterRng rng(spec.seed, std::uint32_t(i), 0, kAugment);
        LoopConfig cfg = aug.draw(chain.heights(), rng);
        visit(i, chain.heights(), cfg);
    }
}

Estimate estimate_two_point_sq(const PlanarGraph& g, double beta, int a, int b, const ChainSpec& spec) {
    validate_chain_spec(spec);
    if (a == b) return {1.0, 0.0, double(spec.samples), std::size_t(spec.samples)};
    if (g.component(a) != g.component(b)) return {0.0, 0.0, double(spec.samples), std::size_t(spec.samples)};
    std::vector<double> xs;
    xs.reserve(std::size_t(spec.samples));
    run_height_pipeline(g, beta, spec, [&](long, const HeightField&, const LoopConfig& cfg) {
        int m = count_m(g, cfg, a, b);
        xs.push_back(double(m) / (m + 1.0));
    });
    return estimate_series(xs);
}

WindingStats winding_and_height_stats(const PlanarGraph& g, double beta, const ChainSpec& spec, int face,
                                      const CutPath* cut) {
    WindingStats ws;
    bool by_angle = g.has_coords() && g.interior_point(face).has_value();
    std::vector<double> ah, aw, cs;
    run_height_pipeline(g, beta, spec, [&](long, const HeightField& h, const LoopConfig& cfg) {
        long W = by_angle ? winding_at_face(g, cfg, face) : winding_field_crossings(g, cfg)[face];
        ws.samples++;
        ws.winding_histogram[W]++;
        if (W != h[face]) ws.mismatches++;
        ah.push_back(double(std::labs(h[face])));
        aw.push_back(double(std::labs(W)));
        if (cut) {
            long s = 0;
            for (int a : cut->plus_side)
                for (int b : cut->minus_side) s += count_m(g, cfg, a, b);
            if (std::labs(W) > s) ws.domination_failures++;
            cs.push_back(double(s));
        }
    });
    ws.abs_height = estimate_series(ah);
    ws.abs_winding = estimate_series(aw);
    if (cut) ws.cut_sum = estimate_series(cs);
    return ws;
}

std::vector<Estimate> amplitude_moments(const PlanarGraph& g, double beta, const ChainSpec& spec, int e, int p_max) {
    std::vector<std::vector<double>> xs(static_cast<std::size_t>(p_max));
    run_height_pipeline(g, beta, spec, [&](long, const HeightField&, const LoopConfig& cfg) {
        double M = cfg.offset[e + 1] - cfg.offset[e];
        double v = 1.0;
        for (int p = 0; p < p_max; ++p) xs[std::size_t(p)].push_back(v *= M);
    });
    std::vector<Estimate> out;
    for (const auto& x : xs) out.push_back(estimate_series(x));
    return out;
}

HeightLaw exact_height_law(const PlanarGraph& g, double beta, int bound, double max_states) {
    if (!g.connected()) throw UnsupportedGraph("height functions need a connected graph");
    HeightLaw law;
    law.faces = g.inner_faces();
    double states = std::pow(2.0 * bound + 1.0, double(law.faces.size()));
    if (states > max_states) throw GuardError("height enumeration refused", states);
    HeightField h(g.num_faces(), 0);
    std::vector<long> key(law.faces.size());
    double total = 0.0;
    // Weights relative to the all-zero field keep the exponent moderate.
    double base = gibbs_height_log_weight(g, h, beta);
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == law.faces.size()) {
            double w = std::exp(gibbs_height_log_weight(g, h, beta) - base);
            for (std::size_t j = 0; j < key.size(); ++j) key[j] = h[law.faces[j]];
            law.prob[key] += w;
            total += w;
            return;
        }
        for (long k = -bound; k <= bound; ++k) {
            h[law.faces[i]] = k;
            self(self, i + 1);
        }
        h[law.faces[i]] = 0;
    };
    rec(rec, 0);
    for (auto& [k, p] : law.prob) p /= total;
    return law;
}

std::map<std::vector<int>, double> exact_multigraph_law(const PlanarGraph& g, double beta, int cutoff) {
    std::map<std::vector<int>, double> law;
    double total = 0.0;
    enumerate_currents(g, SourceFunction(g.num_vertices(), 0), cutoff, [&](const Current& n) {
        double w = std::exp(weight_log(g, n, beta));
        std::vector<int> M(g.num_edges());
        for (int e = 0; e < g.num_edges(); ++e) M[e] = n[2 * e] + n[2 * e + 1];
        law[M] += w;
        total += w;
    });
    for (auto& [k, p] : law) p /= total;
    return law;
}

}  // namespace xyl
