#include "xyloops/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace xyl {

namespace {

// Neumaier compensated sum.
struct CompensatedSum {
    double sum = 0.0, c = 0.0;
    void add(double x) {
        double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + c; }
};

// Series sum S = sum_i prod_{j<=i} h^2 / (j (j+k)), so that
// I_k(beta) = h^k / k! * S with h = beta/2. S = value * exp(log_scale); the
// running sum is rescaled whenever it grows large, since S ~ e^beta.
struct ScaledSeries {
    double value;
    double log_scale;
    double log() const { return log_scale + std::log(value); }
};

ScaledSeries relative_series(int k, double h) {
    constexpr double kBig = 1e250;
    CompensatedSum s;
    double term = 1.0, offset = 0.0;
    s.add(term);
    double h2 = h * h;
    for (long i = 1;; ++i) {
        term *= h2 / (double(i) * double(i + k));
        s.add(term);
        if (double(i) > h && term < 1e-18 * s.value()) break;
        if (i > 10000000) break;
        if (s.value() > kBig) {
            double v = s.value() / kBig;
            s = CompensatedSum{};
            s.add(v);
            term /= kBig;
            offset += std::log(kBig);
        }
    }
    return {s.value(), offset};
}

}  // namespace

double bessel_i_scaled(int k, double beta) {
    if (!(beta >= 0)) throw std::invalid_argument("bessel_i_scaled: beta must be nonnegative");
    k = std::abs(k);
    if (beta == 0) return k == 0 ? 1.0 : 0.0;
    double h = 0.5 * beta;
    double log_lead = k * std::log(h) - std::lgamma(k + 1.0) - beta;
    if (log_lead > -650.0 && beta < 650.0) {
        ScaledSeries series = relative_series(k, h);
        // Product form keeps the leading term to a few ulps; the sequence
        // e^{-beta} h^j / j! is unimodal in j so no intermediate underflows.
        double lead = std::exp(-beta);
        for (int j = 1; j <= k; ++j) lead *= h / j;
        return lead * std::exp(series.log_scale) * series.value;
    }
    return std::exp(log_lead + relative_series(k, h).log());
}

double bessel_i_log(int k, double beta) {
    if (!(beta > 0)) throw std::invalid_argument("bessel_i_log: beta must be positive");
    k = std::abs(k);
    double h = 0.5 * beta;
    double s = bessel_i_scaled(k, beta);
    if (s > 1e-280) return std::log(s) + beta;
    return k * std::log(h) - std::lgamma(k + 1.0) + relative_series(k, h).log();
}

BesselEval bessel_eval(int k, double beta) {
    BesselEval e{k, beta, bessel_i_scaled(k, beta), 0.0};
    e.log_value = beta > 0 ? bessel_i_log(k, beta) : (k == 0 ? 0.0 : -INFINITY);
    return e;
}

double potential(int k, double betaJ) { return -bessel_i_log(k, betaJ); }

double turan_margin(int k, double beta) {
    double a = bessel_i_scaled(k, beta);
    double b = bessel_i_scaled(k - 1, beta);
    double c = bessel_i_scaled(k + 1, beta);
    return a * a - b * c;
}

double poisson_upper_tail(double mu, long t) {
    if (t <= 0) return 1.0;
    if (mu <= 0) return 0.0;
    // First term e^{-mu} mu^t / t!
    double log_term = -mu + t * std::log(mu) - std::lgamma(double(t) + 1.0);
    double term = std::exp(log_term);
    if (term == 0.0) return 0.0;
    CompensatedSum s;
    s.add(term);
    for (long j = t + 1;; ++j) {
        double ratio = mu / double(j);
        term *= ratio;
        if (ratio < 0.5 && term < 1e-20 * s.value()) {
            // remaining terms bounded by a geometric series of ratio mu/(j+1)
            double r = mu / double(j + 1);
            s.add(term / (1.0 - r));
            break;
        }
        s.add(term);
    }
    return std::min(1.0, s.value() * (1.0 + 1e-12));
}

ConvolutionResidual convolution_residual(int k, int l, double beta, double beta2, int m_cutoff,
                                         double tolerance) {
    ConvolutionResidual out{};
    if (beta == 0 && beta2 == 0) {
        double lhs = 0.0;
        for (int m = -m_cutoff; m <= m_cutoff; ++m)
            lhs += bessel_i_scaled(k - m, 0) * bessel_i_scaled(m - l, 0);
        out.residual = std::fabs(lhs - bessel_i_scaled(k - l, 0));
        out.tail_bound = 0.0;
        out.certified = out.residual <= tolerance;
        return out;
    }
    // Scaled by exp(-beta-beta2) these are laws of Skellam variables: the
    // identity is the convolution of the two laws.
    CompensatedSum s;
    for (int m = -m_cutoff; m <= m_cutoff; ++m)
        s.add(bessel_i_scaled(k - m, beta) * bessel_i_scaled(m - l, beta2));
    out.residual = std::fabs(s.value() - bessel_i_scaled(k - l, beta + beta2));
    // Omitted |m| > M: bounded by P(|D2| > M - |l|) with D2 ~ Skellam(beta2/2, beta2/2)
    // and likewise by P(|D1| > M - |k|); take the smaller.
    auto skellam_tail = [](double b, long t) {
        if (t <= 0) return 1.0;
        return std::min(1.0, 2.0 * poisson_upper_tail(0.5 * b, t));
    };
    double t1 = skellam_tail(beta, long(m_cutoff) + 1 - std::abs(k));
    double t2 = skellam_tail(beta2, long(m_cutoff) + 1 - std::abs(l));
    out.tail_bound = std::min(t1, t2);
    out.certified = out.residual + out.tail_bound <= tolerance;
    return out;
}

double lammers_margin(double beta) {
    if (beta <= 0) return -0.5;
    return bessel_i_scaled(1, beta) / bessel_i_scaled(0, beta) - 0.5;
}

double lammers_threshold(double tol) {
    return bisect_increasing([](double b) { return lammers_margin(b); }, 1e-6, 50.0, tol);
}

RatioChainReport ratio_chain_check(int k_max, double beta, double tol) {
    RatioChainReport rep{beta, {}, true};
    std::vector<double> s(k_max + 3);
    for (int k = 0; k <= k_max + 2; ++k) s[k] = bessel_i_scaled(k, beta);
    auto r = [&](int k) {
        // r_k = I_k / (beta I_{k-1}), with I_{-1} = I_1
        double prev = k == 0 ? s[1] : s[k - 1];
        return s[k] / (beta * prev);
    };
    double b2 = beta * beta;
    for (int k = 1; k <= k_max; ++k) {
        RatioChainRow row{};
        row.k = k;
        row.r_k = r(k);
        double rm = r(k - 1), rp = r(k + 1);
        row.convexity_margin = rm * rp / (row.r_k * row.r_k) - 1.0;
        row.recurrence_residual = std::fabs(row.r_k * (2.0 * k + b2 * rp) - 1.0);
        row.eps_margin = b2 / (2.0 * k + 2.0) - b2 * rp;
        row.ok = row.convexity_margin >= -tol && row.recurrence_residual <= tol &&
                 row.eps_margin >= -tol * b2;
        rep.passed = rep.passed && row.ok;
        rep.rows.push_back(row);
    }
    return rep;
}

YkDistribution::YkDistribution(int k, double beta) : k_(k), beta_(beta) {
    if (k < 0) throw std::invalid_argument("YkDistribution: k must be nonnegative");
    if (!(beta >= 0)) throw std::invalid_argument("YkDistribution: beta must be nonnegative");
    norm_ = bessel_i_scaled(k, beta);
    if (beta == 0) {
        order_ = {0};
        probs_ = {1.0};
        return;
    }
    double h = 0.5 * beta;
    double log_norm = bessel_i_log(k, beta);
    auto logp = [&](int i) {
        return (2.0 * i + k) * std::log(h) - std::lgamma(i + 1.0) - std::lgamma(double(i) + k + 1.0) -
               log_norm;
    };
    // mode: largest i with i (i+k) <= h^2
    int mode = int(std::floor(0.5 * (-k + std::sqrt(double(k) * k + 4.0 * h * h))));
    mode = std::max(mode, 0);
    while (mode > 0 && double(mode) * (mode + k) > h * h) --mode;
    order_.push_back(mode);
    probs_.push_back(std::exp(logp(mode)));
    double acc = probs_.back();
    int left = mode - 1, right = mode + 1;
    double pl = left >= 0 ? std::exp(logp(left)) : 0.0;
    double pr = std::exp(logp(right));
    while (true) {
        double next = std::max(pl, pr);
        if (next < 1e-17 && (1.0 - acc <= 1e-14 || next < 1e-300)) break;
        if (left >= 0 && pl >= pr) {
            order_.push_back(left);
            probs_.push_back(pl);
            acc += pl;
            --left;
            pl = left >= 0 ? std::exp(logp(left)) : 0.0;
        } else {
            order_.push_back(right);
            probs_.push_back(pr);
            acc += pr;
            ++right;
            pr = std::exp(logp(right));
        }
    }
}

double YkDistribution::pmf(int i) const {
    if (i < 0) return 0.0;
    for (std::size_t j = 0; j < order_.size(); ++j)
        if (order_[j] == i) return probs_[j];
    return 0.0;
}

double YkDistribution::falling_moment(int r) const {
    if (beta_ == 0) return r == 0 ? 1.0 : 0.0;
    // Summed from the series itself: the stored support is cut for sampling and
    // drops tail terms that matter for high moments.
    double lh = std::log(0.5 * beta_), log_norm = bessel_i_log(k_, beta_);
    CompensatedSum s;
    for (int i = r;; ++i) {
        // (i)_r P(Y = i) = (beta/2)^{2i+k} / ((i-r)! (i+k)! I_k)
        double t = std::exp((2.0 * i + k_) * lh - std::lgamma(double(i - r) + 1.0) -
                            std::lgamma(double(i) + k_ + 1.0) - log_norm);
        s.add(t);
        // past this point successive terms shrink by at least 4
        if (double(i - r) * (i + k_) > beta_ * beta_ && t <= 1e-18 * s.value()) break;
    }
    return s.value();
}

int YkDistribution::sample(CounterRng& rng) const {
    double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t j = 0; j < order_.size(); ++j) {
        acc += probs_[j];
        if (u < acc) return order_[j];
    }
    return order_.back();
}

double yk_falling_moment_closed(int k, double beta, int r) {
    if (beta == 0) return r == 0 ? 1.0 : 0.0;
    return std::exp(r * std::log(0.5 * beta) + bessel_i_log(k + r, beta) - bessel_i_log(k, beta));
}

}  // namespace xyl
