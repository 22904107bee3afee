#pragma once

#include <cstddef>
#include <vector>

namespace xyl {

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    double ess = 0.0;
    std::size_t n = 0;
};

// Batch-means standard error and initial-positive-sequence ESS of a chain.
Estimate estimate_series(const std::vector<double>& xs, int batches = 32);

// Integrated autocorrelation time by Geyer's initial positive sequence.
double integrated_autocorrelation(const std::vector<double>& xs);

// Total variation distance between two pmfs given on a common index set;
// mass missing from either side counts toward the distance.
double total_variation(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace xyl
