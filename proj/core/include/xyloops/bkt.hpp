#pragma once

#include <string>
#include <vector>

#include "xyloops/inequality.hpp"
#include "xyloops/spin_mcmc.hpp"
#include "xyloops/stats.hpp"

namespace xyl {

// Per-sample sum over boundary vertices w of cos(theta_c - theta_w), c the box center.
SpinObservable boundary_sum_observable(const PlanarGraph& box);

// phi = sum_{w in boundary} <sigma_c conj(sigma_w)>.
Estimate phi_estimate(const PlanarGraph& box, double beta, const ChainSpec& spec);
// Same sum from exact correlators (small boxes); error is the summed enclosure.
ExactValue phi_exact(const PlanarGraph& box, double beta);

struct BracketRow {
    int size = 0;  // box_lattice(size, size)
    double beta = 0.0;
    Estimate phi;
};

// Finite-size bracket on a beta grid: lo = largest beta where some box has
// phi + z se < 1, hi = smallest beta where every box has phi - z se >= 1.
struct BetaBracket {
    double beta_lo = 0.0, beta_hi = 0.0;
    bool lo_found = false, hi_found = false;
    std::vector<BracketRow> rows;
};

BetaBracket bracket_beta_c(const std::vector<int>& sizes, const std::vector<double>& betas, const ChainSpec& spec,
                           double z = 3.0);

struct ChiCut {
    double value = 0.0;
    double std_error = 0.0;  // delta method on the per-pair means
    int pairs = 0;
    int clamped = 0;         // pairs with a nonpositive estimate, counted as 0
    bool degenerate = false; // epsilon >= 2
};

// sum_{a in L+, b in L-} <sigma_a conj(sigma_b)>^{2 - epsilon}, plug-in estimate.
ChiCut chi_cut(const PlanarGraph& box, double beta, double epsilon, const CutPath& cut, const ChainSpec& spec);
ChiCut chi_cut_exact(const PlanarGraph& box, double beta, double epsilon, const CutPath& cut);

struct AxisPoint {
    int r = 0;
    Estimate corr;
};

// Correlator at axis distance r = 1..r_max averaged over every horizontal and
// vertical pair of the box at that distance.
std::vector<AxisPoint> axis_correlator(const PlanarGraph& box, double beta, const ChainSpec& spec, int r_max);

enum class DecayModel { Exponential, Power };
std::string to_string(DecayModel m);

struct DecayFit {
    std::vector<double> distances, values, errors;
    std::vector<int> excluded;  // input indices dropped for nonpositive values
    double exp_rate = 0.0, exp_intercept = 0.0, exp_residual = 0.0;        // log C = a - rate r
    double power_exponent = 0.0, power_intercept = 0.0, power_residual = 0.0;  // log C = a - eta log r
    DecayModel model = DecayModel::Exponential;
    // When the power model wins: C(r) - 1/(8 r) per kept distance (reported only).
    std::vector<double> floor_margin;
};

// Unweighted least squares on log C against r and against log r; the model
// with the smaller RMS log residual wins. Needs at least 4 positive points.
DecayFit decay_fit(const std::vector<double>& distances, const std::vector<double>& values,
                   const std::vector<double>& errors = {});

// (I_1(beta/2)/I_0(beta/2))^2 - 1/2.
double lammers_condition_triangulation(double beta);
// Root of lammers_condition_triangulation by bisection.
double triangulation_threshold(double tol = 1e-12);

// E|h(face)| from the height chain.
Estimate abs_height_estimate(const PlanarGraph& g, double beta, const ChainSpec& spec, int face);

}  // namespace xyl
