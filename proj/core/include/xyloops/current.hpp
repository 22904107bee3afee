#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "xyloops/planar_graph.hpp"

namespace xyl {

// Nonnegative integer per half-edge (two entries per edge).
using Current = std::vector<int>;
// Integer per vertex.
using SourceFunction = std::vector<int>;
// Integer per face, outer face 0.
using HeightField = std::vector<long>;

struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GuardError : std::runtime_error {
    GuardError(const std::string& what, double estimate) : std::runtime_error(what), size_estimate(estimate) {}
    double size_estimate;
};

SourceFunction divergence(const PlanarGraph& g, const Current& n);
bool is_sourceless(const PlanarGraph& g, const Current& n);
SourceFunction point_sources(const PlanarGraph& g, int a, int b, int k);  // k delta_a - k delta_b

// sum over half-edges of n log(beta J/2) - log n!
double weight_log(const PlanarGraph& g, const Current& n, double beta);

// Net flow per edge: n(2e) - n(2e+1).
std::vector<int> net_flow(const PlanarGraph& g, const Current& n);
std::vector<int> amplitude(const PlanarGraph& g, const Current& n);

// h(left(h)) - h(right(h)) = n(h) - n(twin h); built on a breadth-first dual tree.
HeightField height_from_current(const PlanarGraph& g, const Current& n);
// Same field rebuilt along a depth-first dual tree (used to check path independence).
HeightField height_from_current_dfs(const PlanarGraph& g, const Current& n);

struct GradientAmplitude {
    std::vector<int> grad;  // |grad h|_e
    std::vector<int> X;     // (|n|_e - |grad h|_e)/2
};

GradientAmplitude gradient_amplitude_split(const PlanarGraph& g, const Current& n);
Current assemble(const PlanarGraph& g, const HeightField& h, const std::vector<int>& X);

// Height-model log weight sum_e log I_{h(left)-h(right)}(beta J_e).
double gibbs_height_log_weight(const PlanarGraph& g, const HeightField& h, double beta);

// Truncated sum kept on the scale exp(-beta sum_e J_e); true value lies in
// [value, value + tail_bound] on that scale.
struct TruncatedSum {
    double value = 0.0;
    double tail_bound = 0.0;
};

// Rigorous bound on the scaled mass of currents with some entry > cutoff:
// sum over half-edges of P(Poisson(beta J/2) > cutoff).
double truncation_tail(const PlanarGraph& g, double beta, int cutoff);

// Estimated number of currents with given sources and entries <= cutoff.
double current_count_estimate(const PlanarGraph& g, int cutoff);

// All currents with divergence phi and entries <= cutoff, lexicographic over
// half-edges with pruning on reachable divergence. Throws GuardError when the
// estimated count exceeds max_count.
void enumerate_currents(const PlanarGraph& g, const SourceFunction& phi, int cutoff,
                        const std::function<void(const Current&)>& visit, double max_count = 5e7);

// Truncated Bessel factor on one edge: exp(-2x) sum_{n1-n2=l, n1,n2<=cutoff} x^{n1+n2}/(n1! n2!).
double truncated_edge_factor(int l, double x, int cutoff);

// Net flows with divergence phi and |l_e| <= cutoff; pruned depth-first search.
void enumerate_net_flows(const PlanarGraph& g, const SourceFunction& phi, int cutoff,
                         const std::function<void(const std::vector<int>&)>& visit, double max_count = 5e7);

// Scaled Z^phi over currents with all entries <= cutoff.
TruncatedSum partition_function(const PlanarGraph& g, double beta, const SourceFunction& phi, int cutoff);

struct CorrelatorResult {
    TruncatedSum numerator;
    TruncatedSum denominator;
    double ratio = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool certified = false;  // upper - lower <= tolerance
};

// <sigma_a^k conj(sigma_b)^k> = Z^{k delta_a - k delta_b} / Z^0 with enclosure.
CorrelatorResult partition_and_correlators(const PlanarGraph& g, double beta, int a, int b, int k, int cutoff,
                                           double tolerance = 1e-6);
CorrelatorResult ratio_enclosure(const TruncatedSum& num, const TruncatedSum& den, double tolerance);

// Smallest cutoff whose truncation tail is below rel * (scaled Z^0 lower bound).
int cutoff_for_tolerance(const PlanarGraph& g, double beta, double rel, int max_cutoff = 60);

}  // namespace xyl
