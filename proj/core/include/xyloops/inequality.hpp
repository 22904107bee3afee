#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xyloops/current.hpp"
#include "xyloops/spin_mcmc.hpp"

namespace xyl {

struct CheckReport {
    std::string name;
    std::string instance;
    double margin = 0.0;
    double tolerance = 0.0;
    bool passed = false;  // margin >= -tolerance
};

CheckReport make_report(std::string name, std::string instance, double margin, double tolerance);

// Correlator of a source function (sum zero per component) from current sums
// when all couplings are positive, cross-checked by quadrature up to 5
// vertices (quadrature alone when some coupling is zero).
struct ExactValue {
    double value = 0.0;
    double error = 0.0;       // enclosure width of the current-sum path
    double oracle_gap = 0.0;  // |current sums - quadrature| when both ran
    bool cross_checked = false;
};

// Keeps the cutoff and the sourceless sum of one graph across queries.
class ExactOracle {
public:
    ExactOracle(const PlanarGraph& g, double beta);
    ExactValue correlator(const SourceFunction& phi) const;
    ExactValue two_point(int a, int b) const;

private:
    const PlanarGraph& g_;
    double beta_;
    bool positive_ = true;
    int cutoff_ = 0;
    TruncatedSum den_;
};

ExactValue exact_correlator(const PlanarGraph& g, double beta, const SourceFunction& phi);
ExactValue exact_two_point(const PlanarGraph& g, double beta, int a, int b);

// Agreement tolerance between the two exact paths.
inline constexpr double kOracleTolerance = 1e-8;
// Tolerance on margins computed by exact paths.
inline constexpr double kExactTolerance = 1e-9;

struct Subgraph {
    PlanarGraph graph;
    std::vector<int> to_sub;     // parent vertex -> subgraph vertex or -1
    std::vector<int> to_parent;  // subgraph vertex -> parent vertex
};

// Subgraph induced on `vertices`, embedding inherited from g.
Subgraph induced_subgraph(const PlanarGraph& g, const std::vector<int>& vertices);
// All vertices, edges with keep[e] != 0.
PlanarGraph edge_subgraph(const PlanarGraph& g, const std::vector<char>& keep);

// <sigma_v conj(sigma_w)> nondecreasing along the (ascending) grid of J_e, for
// all vertex pairs.
CheckReport check_ginibre_monotonicity(const PlanarGraph& g, double beta, int e, const std::vector<double>& grid);

// 2 <sigma_a conj(sigma_b)>^2 - <sigma_a^2 conj(sigma_b)^2> >= 0.
CheckReport check_squares(const PlanarGraph& g, double beta, int a, int b);

// sum_{c in boundary(H)} <a c>_H <c b>_G - <a b>_G >= 0, with H induced on
// `H`, a in H, b not in H.
CheckReport check_lieb_rivasseau(const PlanarGraph& g, const std::vector<int>& H, double beta, int a, int b);

// Mirror x -> width - x of a box: <a b> >= <a R(b)> for all a, b in the closed
// left half with b off the mirror line. The line passes through vertices for
// even width and through edges for odd width.
CheckReport check_mirror_exact(const PlanarGraph& box, double beta);

// Monte Carlo sequences around the box center c:
// k -> <s_c conj(s_{c+(n,k)})>, k = 0..k_max, and k -> <s_c conj(s_{c+(n+k,n-k)})>, k = 0..n.
// Margins are min over consecutive pairs of (difference / SE); tolerance 3.
std::vector<CheckReport> check_mms(const PlanarGraph& box, double beta, int n, int k_max, const ChainSpec& spec);

// Random subgraphs of K4 with couplings in [0.5, 1.5] and random vertices,
// each run through all exact checks; failures are reports with passed false.
std::vector<CheckReport> randomized_suite(std::uint64_t seed, int trials, const std::vector<double>& betas);

}  // namespace xyl
