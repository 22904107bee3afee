#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "xyloops/planar_graph.hpp"
#include "xyloops/rng.hpp"
#include "xyloops/stats.hpp"

namespace xyl {

// Angle per vertex in (-pi, pi].
using SpinConfig = std::vector<double>;

struct ChainSpec {
    std::uint64_t seed = 1;
    long burn_in = 1000;   // sweeps
    long samples = 10000;
    long thinning = 1;     // sweeps between samples
};

void validate_chain_spec(const ChainSpec& spec);

// Stream purposes for CounterRng addressing.
enum RngPurpose : std::uint32_t {
    kSpinHeatBath = 1,
    kSpinCluster = 2,
    kHeightHeatBath = 3,
    kAugment = 4,
    kSuite = 5,
};

// Draw from the von Mises law exp(kappa cos(theta - mu)) (Best-Fisher).
double sample_von_mises(double mu, double kappa, CounterRng& rng);

// Single-site heat bath in vertex order plus reflection-cluster moves.
class SpinChain {
public:
    SpinChain(const PlanarGraph& g, double beta, std::uint64_t seed, int clusters_per_sweep = 1);

    void sweep();
    void heat_bath_sweep();
    // Returns the size of the flipped cluster.
    int cluster_move(std::uint32_t index);

    const SpinConfig& angles() const { return theta_; }
    void set_angles(SpinConfig t) { theta_ = std::move(t); }
    long sweeps_done() const { return sweep_; }

private:
    const PlanarGraph& g_;
    double beta_;
    std::uint64_t seed_;
    int clusters_;
    SpinConfig theta_;
    long sweep_ = 0;
    std::vector<std::vector<std::pair<int, double>>> nbr_;  // (neighbor, beta J)
};

struct SpinObservable {
    std::string name;
    std::function<double(const SpinConfig&)> f;
};

// cos(theta_a - theta_b) = Re sigma_a conj(sigma_b).
SpinObservable two_point_observable(int a, int b);
// cos(2 (theta_a - theta_b)).
SpinObservable two_point_sq_observable(int a, int b);

struct NamedEstimate {
    std::string name;
    Estimate est;
};

// Runs one chain, starting from all angles 0, and estimates each observable
// by batch means. `trace` (optional) receives each recorded sample's values.
std::vector<NamedEstimate> spin_mcmc(const PlanarGraph& g, double beta, const ChainSpec& spec,
                                     const std::vector<SpinObservable>& observables,
                                     const std::function<void(long, const std::vector<double>&)>& trace = {});

// Raw per-sample values (one series per observable), for derived statistics.
std::vector<std::vector<double>> spin_series(const PlanarGraph& g, double beta, const ChainSpec& spec,
                                             const std::vector<SpinObservable>& observables);

}  // namespace xyl
