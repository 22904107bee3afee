#pragma once

#include <vector>

#include "xyloops/rng.hpp"

namespace xyl {

// I_k(beta) * exp(-beta), summed from the power series.
double bessel_i_scaled(int k, double beta);

// log I_k(beta).
double bessel_i_log(int k, double beta);

struct BesselEval {
    int k;
    double beta;
    double value_scaled;
    double log_value;
};

BesselEval bessel_eval(int k, double beta);

// Height-model pair potential V(k) = -log I_k(betaJ).
double potential(int k, double betaJ);

// I_k^2 - I_{k-1} I_{k+1}, all values scaled by exp(-beta).
double turan_margin(int k, double beta);

// P(Poisson(mu) >= t), summed from the tail upward with a geometric bound on
// the remainder. Upper bound up to rounding.
double poisson_upper_tail(double mu, long t);

struct ConvolutionResidual {
    double residual;    // |truncated sum - I_{k-l}(beta+beta2)|, scaled by exp(-beta-beta2)
    double tail_bound;  // bound on the omitted terms, same scale
    bool certified;     // residual + tail_bound <= tolerance
};

ConvolutionResidual convolution_residual(int k, int l, double beta, double beta2, int m_cutoff,
                                         double tolerance = 1e-10);

// I_1(beta)/I_0(beta) - 1/2.
double lammers_margin(double beta);

// Root of lammers_margin, by bisection.
double lammers_threshold(double tol = 1e-12);

// Bisection for the root of an increasing function on [lo, hi].
template <class F>
double bisect_increasing(F f, double lo, double hi, double tol) {
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) < 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct RatioChainRow {
    int k;
    double r_k;
    double convexity_margin;    // r_{k-1} r_{k+1} / r_k^2 - 1
    double recurrence_residual; // |r_k (2k + beta^2 r_{k+1}) - 1|
    double eps_margin;          // beta^2/(2k+2) - beta^2 r_{k+1}
    bool ok;
};

struct RatioChainReport {
    double beta;
    std::vector<RatioChainRow> rows;
    bool passed;
};

// Checks on r_k = I_k / (beta I_{k-1}) for 1 <= k <= k_max.
RatioChainReport ratio_chain_check(int k_max, double beta, double tol = 1e-12);

// Law of Y_k: P(i) proportional to (beta/2)^{2i+k} / (i! (i+k)!), i >= 0.
class YkDistribution {
public:
    YkDistribution(int k, double beta);

    int k() const { return k_; }
    double beta() const { return beta_; }
    double normalizer_scaled() const { return norm_; }

    // Support in mode-outward order with probabilities; residual mass < 1e-14.
    const std::vector<int>& order() const { return order_; }
    const std::vector<double>& probs() const { return probs_; }

    double pmf(int i) const;

    // E[(Y)_r], falling factorial moment, from the pmf.
    double falling_moment(int r) const;

    // Exact inversion over the mode-outward enumeration.
    int sample(CounterRng& rng) const;

    double mean() const { return falling_moment(1); }

private:
    int k_;
    double beta_;
    double norm_;
    std::vector<int> order_;
    std::vector<double> probs_;
};

// (beta/2)^r I_{k+r}(beta) / I_k(beta).
double yk_falling_moment_closed(int k, double beta, int r);

}  // namespace xyl
