#pragma once

#include <utility>
#include <vector>

#include "xyloops/planar_graph.hpp"

namespace xyl {

// Product of spin powers: sigma_v^k for each (v, k); negative k means conjugate.
using Monomial = std::vector<std::pair<int, int>>;

struct QuadResult {
    double value = 0.0;
    int resolution = 0;      // grid points per angle at the accepted step
    double last_change = 0.0;
    bool converged = false;
};

// <prod sigma_v^{k_v}> by periodic trapezoid quadrature in every angle, with
// variables eliminated one at a time. The grid is doubled from 12 points until
// successive values differ by less than `tol`. Throws UnsupportedGraph above
// max_vertices or when an elimination step would touch more than 3 angles.
QuadResult quad_correlator(const PlanarGraph& g, double beta, const Monomial& mono, double tol = 1e-10,
                           int max_vertices = 5);

// <sigma_a conj(sigma_b)> (real by symmetry).
double quad_two_point(const PlanarGraph& g, double beta, int a, int b, int max_vertices = 5);

// log of the partition function on the exp(-beta sum J) scale:
// log int prod_e exp(beta J_e (cos(theta_u - theta_v) - 1)) dtheta / (2 pi)^V.
double quad_log_partition(const PlanarGraph& g, double beta, double tol = 1e-12, int max_vertices = 5);

}  // namespace xyl
