#pragma once

#include <functional>
#include <vector>

#include "xyloops/current.hpp"
#include "xyloops/planar_graph.hpp"

namespace xyl {

// Edge copies of a current's multigraph with the way loops continue through
// each vertex. Copies of edge e are labeled offset[e] .. offset[e+1]-1; each
// carries the half-edge it traverses. next[c] is the copy taken after c at the
// target of c, or -1 when that vertex is in S (or the end is left unpaired).
struct LoopConfig {
    std::vector<int> offset;
    std::vector<int> half;
    std::vector<int> next;
    std::vector<char> in_S;

    int num_copies() const { return int(half.size()); }
};

using VertexSet = std::vector<int>;

std::vector<char> vertex_mask(const PlanarGraph& g, const VertexSet& S);

Current config_current(const PlanarGraph& g, const LoopConfig& cfg);
std::vector<int> config_multigraph(const PlanarGraph& g, const LoopConfig& cfg);

// Throws ValidationError unless every vertex outside S pairs its incoming and
// outgoing copies bijectively and every copy is traversed exactly once.
void validate_config(const PlanarGraph& g, const LoopConfig& cfg);

// Number of configurations consistent with n outside S:
// prod_e C(M_e, n_e) * prod_{v not in S} (deg_M(v)/2)!, or 0 if some vertex
// outside S has sources.
double consistent_count_formula(const PlanarGraph& g, const Current& n, const VertexSet& S);

// Explicit enumeration of all configurations consistent with n outside S.
// Throws GuardError beyond 24 copies or max_configs configurations.
void enumerate_consistent(const PlanarGraph& g, const Current& n, const VertexSet& S,
                          const std::function<void(const LoopConfig&)>& visit, double max_configs = 2e5);

// Same count, obtained by enumerating orientation assignments per edge and
// pairings per vertex separately (the configuration set is their product).
double enumerate_consistent_count(const PlanarGraph& g, const Current& n, const VertexSet& S);

// log of prod_{v not in S} 1/(deg_M(v)/2)! * prod_e (beta J_e/2)^{M_e}/M_e!.
double weight_lambda(const PlanarGraph& g, const LoopConfig& cfg, double beta);
double weight_lambda_multigraph(const PlanarGraph& g, const std::vector<int>& M, const std::vector<char>& in_S,
                                double beta);

struct LoopExpansionCheck {
    double loop_sum = 0.0;      // sum of lambda^S over consistent configurations
    double current_weight = 0.0;  // w_beta(n)
    double rel_residual = 0.0;
    double configs = 0.0;
    bool explicit_enumeration = false;
    bool admissible = true;     // S contains all sources of n
};

LoopExpansionCheck verify_loopexp(const PlanarGraph& g, const Current& n, const VertexSet& S, double beta,
                                  double max_explicit = 2e5);

// Forget the pairings at the vertices of S (S must contain cfg's own S).
LoopConfig cutting_map(const PlanarGraph& g, const LoopConfig& cfg, const VertexSet& S);

struct CuttingCheck {
    int images = 0;
    int target_configs = 0;
    double max_rel_residual = 0.0;
    bool preimage_counts_ok = true;
};

CuttingCheck verify_cutting(const PlanarGraph& g, const Current& n, const VertexSet& S_small, const VertexSet& S_big,
                            double beta);

// Directed loops (copies in traversal order, starting at the smallest copy id)
// and open paths (from an unpaired start to an unpaired end).
std::vector<std::vector<int>> config_loops(const LoopConfig& cfg);
std::vector<std::vector<int>> config_paths(const PlanarGraph& g, const LoopConfig& cfg);

// Pieces of loops from a to b after cutting at a and b.
int count_m(const PlanarGraph& g, const LoopConfig& cfg, int a, int b);

// Net winding of all loops around every face (outer face 0). Uses angle sums
// around face interior points on straight-line lattice boxes, crossing counts
// along a dual path otherwise. Requires S empty.
HeightField winding_field(const PlanarGraph& g, const LoopConfig& cfg);
HeightField winding_field_crossings(const PlanarGraph& g, const LoopConfig& cfg);
// Angle-sum winding around one face; needs coordinates and an interior point.
long winding_at_face(const PlanarGraph& g, const LoopConfig& cfg, int face);

LoopConfig reverse_all(const PlanarGraph& g, const LoopConfig& cfg);
// Reverses an open path (given as its copies in order).
LoopConfig reverse_path(const PlanarGraph& g, const LoopConfig& cfg, const std::vector<int>& path);

struct ReversalCheck {
    double sourced_sum = 0.0;   // sum of lambda over L^{a,b} with sources 2(delta_a - delta_b)
    double reversed_sum = 0.0;  // sum over L^{a,b}_0 of lambda * m_{b,a}/(m_{b,a}+1)
    int pairs = 0;
    bool bijective = true;
    bool weights_preserved = true;
};

// Path reversal on all configurations whose multigraph has amplitudes M.
ReversalCheck verify_path_reversal(const PlanarGraph& g, double beta, int a, int b, const std::vector<int>& M);

// Number of Eulerian orientations of the multigraph with M_e labeled copies of e.
double eulerian_factor(const PlanarGraph& g, const std::vector<int>& M);

// Sum of w_beta over sourceless currents with amplitudes M, and the Eulerian
// form E(M) prod_e (beta J_e/2)^{M_e}/M_e!.
std::pair<double, double> eulerian_marginal(const PlanarGraph& g, double beta, const std::vector<int>& M);

// Currents n = (net flow, X) with divergence phi and all entries <= cutoff, visited
// with their scaled weight. Subtrees whose bound mass (scaled weights at
// bound_scale * beta) falls below `threshold` are skipped; the skipped bound
// mass is returned.
double for_each_weighted_current(const PlanarGraph& g, double beta, const SourceFunction& phi, int cutoff,
                                 double threshold, double bound_scale,
                                 const std::function<void(const Current&, double)>& visit);

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    double mid() const { return 0.5 * (lower + upper); }
    double width() const { return upper - lower; }
};

struct SwitchCheck {
    CorrelatorResult correlator;  // current-sum side
    Interval loop_value;          // E[f(m)] under the loop measure
    Interval p_positive;          // P(m > 0)
    double loop_included = 0.0;   // E[f(m)] over the enumerated part
    double p_included = 0.0;
    bool sandwich = true;         // 1/2 P(m>0) <= E[m/(m+1)] <= P(m>0) on the enumerated part
    bool agree = false;           // enclosures overlap
    int cutoff = 0;
    long currents = 0;
};

// <sigma_a^2 conj(sigma_b)^2> against E[m_{a,b}/(m_{a,b}+1)].
SwitchCheck single_switch_verify(const PlanarGraph& g, double beta, int a, int b, int cutoff);

// <sigma_a^{2k} conj(sigma_b)^{2k}> against E[(m)_k/(m+k)_k].
SwitchCheck higher_power_verify(const PlanarGraph& g, double beta, int a, int b, int k, int cutoff);

}  // namespace xyl
