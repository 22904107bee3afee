#pragma once

#include <cstdint>
#include <vector>

#include "xyloops/inequality.hpp"

namespace xyl {

// Fixed check batteries shared by the command line tool and the test suite.
// Every entry is a CheckReport; a battery passes when all its reports pass.

// Turan margins, convolution residuals, ratio chains, Y_k moments.
std::vector<CheckReport> bessel_battery();

// Loop expansion with two admissible source sets, for every current with
// entries <= 3 on the single edge, doubled edge, 3-path, 4-cycle and theta graph.
std::vector<CheckReport> loop_expansion_battery();

// The loop expansion battery plus cutting map, path reversal, Eulerian marginals, single switching and
// enumerated winding = height.
std::vector<CheckReport> loops_battery();

// Coloured expansion, double switching, ferromagnet margins and the
// derivative identity.
std::vector<CheckReport> coloured_battery();

// Current sums against quadrature on every vertex pair of the graphs with at
// most 4 vertices.
std::vector<CheckReport> oracle_battery();

// Randomized exact inequality checks plus the mirror check on a 2x2 box.
std::vector<CheckReport> inequalities_battery(std::uint64_t seed, int trials, const std::vector<double>& betas);

// Seeded Monte Carlo checks: spin chain against exact correlators, per-sample
// winding = height on a box, MMS monotonicity.
std::vector<CheckReport> sampler_battery(std::uint64_t seed);

std::size_t count_failures(const std::vector<CheckReport>& reports);

}  // namespace xyl
