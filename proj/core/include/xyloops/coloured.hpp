#pragma once

#include <functional>
#include <vector>

#include "xyloops/current.hpp"
#include "xyloops/loops.hpp"

namespace xyl {

enum Colour : char { Red = 0, Blue = 1 };

// Loop configuration on the multigraph of r + b with a colour per copy. At a
// vertex v outside S, phi_v > 0 outgoing ends (phi_v < 0: -phi_v incoming ends)
// stay unpaired, where phi = div(r + b).
struct ColouredConfig {
    LoopConfig base;
    std::vector<char> colour;
    SourceFunction phi;
};

Current red_current(const PlanarGraph& g, const ColouredConfig& cfg);
Current blue_current(const PlanarGraph& g, const ColouredConfig& cfg);

// prod_e |r+b|_e!/(r! r! b! b!) * prod_{v not in S} ((deg_M(v)+|phi_v|)/2)!/|phi_v|!
double coloured_count_formula(const PlanarGraph& g, const Current& r, const Current& b, const VertexSet& S);

void enumerate_coloured(const PlanarGraph& g, const Current& r, const Current& b, const VertexSet& S,
                        const std::function<void(const ColouredConfig&)>& visit, double max_configs = 2e5);

// Same count from separate enumeration of colour/orientation assignments per
// edge and pairings per vertex.
double enumerate_coloured_count(const PlanarGraph& g, const Current& r, const Current& b, const VertexSet& S);

// log of prod_{v not in S} |phi_v|!/((deg_M(v)+|phi_v|)/2)! * prod_e (beta J_e/2)^{M_e}/M_e!.
// Throws ValidationError when deg_M(v) + |phi_v| is odd.
double weight_lambda_tilde(const PlanarGraph& g, const ColouredConfig& cfg, double beta);

// Throws ValidationError unless the pairing leaves exactly the ends prescribed by phi unpaired.
void validate_coloured(const PlanarGraph& g, const ColouredConfig& cfg);

struct ColouredExpansionCheck {
    double loop_sum = 0.0;
    double current_weight = 0.0;  // w(r) w(b)
    double rel_residual = 0.0;
    double configs = 0.0;
    bool explicit_enumeration = false;
};

ColouredExpansionCheck verify_loopexp1(const PlanarGraph& g, const Current& r, const Current& b, const VertexSet& S,
                                       double beta, double max_explicit = 2e5);

// Reverse an open path and swap the colours along it.
ColouredConfig switch_path(const PlanarGraph& g, const ColouredConfig& cfg, const std::vector<int>& path);

// Sum over r <= n (entrywise) with div r = phi_r of prod_h C(n_h, r_h), and the
// same sum weighted by r_{half}. half < 0 skips the second sum.
std::pair<double, double> binomial_split_sum(const PlanarGraph& g, const Current& n, const SourceFunction& phi_r,
                                             int half = -1);

// <sigma_a conj(sigma_b)>^2 against E~[m_{a,b}/(m_{a,b}+1)] under the coloured loop measure.
SwitchCheck double_switch_verify(const PlanarGraph& g, double beta, int a, int b, int cutoff);

struct FerromagnetCheck {
    double ab = 0.0, ac = 0.0, cb = 0.0, abcc = 0.0;  // <s_a s_b^*>, <s_a s_c^*>, <s_c s_b^*>, <s_a s_b s_c^*2>
    double first_margin = 0.0;   // ab - ac cb
    double second_margin = 0.0;  // ac cb - abcc
    double enclosure = 0.0;      // certified truncation error on the margins
    double oracle_gap = 0.0;     // max difference between current sums and quadrature (0 if not run)
    bool passed = false;
};

FerromagnetCheck ferromagnet_verify(const PlanarGraph& g, double beta, int a, int b, int c, int cutoff,
                                    double tolerance = 1e-9);

struct DerivativeCheck {
    double lhs = 0.0;        // d/dJ_e <sigma_a conj(sigma_b)>, centered finite difference of quadrature
    double rhs = 0.0;        // J_e^{-1} sum lambda~ (R_e - B_e) / (Z^0)^2
    double rhs_bound = 0.0;  // bound on the truncated part of the right side
    double residual = 0.0;
    long currents = 0;
};

DerivativeCheck derivative_identity_check(const PlanarGraph& g, double beta, int a, int b, int e, int cutoff);

}  // namespace xyl
