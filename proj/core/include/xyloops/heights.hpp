#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "xyloops/bessel.hpp"
#include "xyloops/current.hpp"
#include "xyloops/loops.hpp"
#include "xyloops/spin_mcmc.hpp"
#include "xyloops/stats.hpp"

namespace xyl {

// log I_k(K) for |k| up to a lazily extended bound.
class LogBesselTable {
public:
    explicit LogBesselTable(double K) : K_(K) {}
    double K() const { return K_; }
    double operator()(long k);

private:
    double K_;
    std::vector<double> v_;
};

// Heat bath on inner-face heights with the outer face pinned to 0. Faces are
// updated in index order; each conditional pmf is enumerated from its mode
// outward and sampled by inversion.
class HeightChain {
public:
    HeightChain(const PlanarGraph& g, double beta, std::uint64_t seed);

    void sweep();
    const HeightField& heights() const { return h_; }
    void set_heights(HeightField h) { h_ = std::move(h); }
    long sweeps_done() const { return sweep_; }

    // Conditional pmf of h(face) given the other faces, in mode-outward order.
    void conditional(int face, std::vector<long>& values, std::vector<double>& weights);

private:
    const PlanarGraph& g_;
    std::uint64_t seed_;
    HeightField h_;
    long sweep_ = 0;
    std::vector<LogBesselTable> tables_;
    std::vector<std::vector<std::pair<int, int>>> nbr_;  // per face: (neighbor face, table)
    std::vector<int> inner_;
};

// Height field -> current -> loop configuration (S empty). X_e ~ Y_{|grad h|_e}
// at beta J_e, copies oriented by a uniform subset and paired uniformly.
class LoopAugmenter {
public:
    LoopAugmenter(const PlanarGraph& g, double beta);
    LoopConfig draw(const HeightField& h, CounterRng& rng);
    const Current& last_current() const { return n_; }

private:
    const PlanarGraph& g_;
    double beta_;
    std::map<std::pair<int, double>, YkDistribution> cache_;
    Current n_;
};

// Heat bath followed by augmentation on every recorded sample; the loop
// configuration of sample i uses stream (seed, i, 0, kAugment).
void run_height_pipeline(const PlanarGraph& g, double beta, const ChainSpec& spec,
                         const std::function<void(long, const HeightField&, const LoopConfig&)>& visit);

// <sigma_a^2 conj(sigma_b)^2> as E[m_{a,b}/(m_{a,b}+1)].
Estimate estimate_two_point_sq(const PlanarGraph& g, double beta, int a, int b, const ChainSpec& spec);

struct WindingStats {
    Estimate abs_height;   // E|h(face)|
    Estimate abs_winding;  // E|W(face)|
    Estimate cut_sum;      // E sum_{a in L+, b in L-} m_{a,b}
    std::map<long, long> winding_histogram;
    long samples = 0;
    long mismatches = 0;           // samples with W(face) != h(face)
    long domination_failures = 0;  // samples with |W(face)| > cut sum
};

// Winding comes from angle sums when the graph carries coordinates and the face
// an interior point, from dual-path crossings otherwise. cut == nullptr skips
// the cut statistics.
WindingStats winding_and_height_stats(const PlanarGraph& g, double beta, const ChainSpec& spec, int face,
                                      const CutPath* cut);

// Estimates of E[M_e^p], p = 1..p_max, where M_e is the copy count of edge e.
std::vector<Estimate> amplitude_moments(const PlanarGraph& g, double beta, const ChainSpec& spec, int e, int p_max);

// Exact law of the inner-face heights restricted to |h| <= bound, normalized
// over that box. Keys list heights of g.inner_faces() in order.
struct HeightLaw {
    std::vector<int> faces;
    std::map<std::vector<long>, double> prob;
};
HeightLaw exact_height_law(const PlanarGraph& g, double beta, int bound, double max_states = 2e7);

// Law of the copy counts M_e over sourceless currents with entries <= cutoff.
std::map<std::vector<int>, double> exact_multigraph_law(const PlanarGraph& g, double beta, int cutoff);

template <class K>
double total_variation(const std::map<K, double>& p, const std::map<K, double>& q) {
    double s = 0.0;
    for (const auto& [k, v] : p) {
        auto it = q.find(k);
        s += std::abs(v - (it == q.end() ? 0.0 : it->second));
    }
    for (const auto& [k, v] : q)
        if (!p.count(k)) s += std::abs(v);
    return 0.5 * s;
}

}  // namespace xyl
