#include "xyloops/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace xyl {

double integrated_autocorrelation(const std::vector<double>& xs) {
    std::size_t n = xs.size();
    if (n < 4) return 1.0;
    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / double(n);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = xs[i] - mean;
    auto gamma = [&](std::size_t lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) s += d[i] * d[i + lag];
        return s / double(n);
    };
    double g0 = gamma(0);
    if (g0 <= 0) return 1.0;
    // Sum consecutive pairs while they stay positive.
    double tau = -1.0;
    double prev_pair = INFINITY;
    for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
        double pair = gamma(2 * m) + gamma(2 * m + 1);
        if (pair <= 0) break;
        pair = std::min(pair, prev_pair);  // initial monotone sequence
        tau += 2.0 * pair / g0;
        prev_pair = pair;
    }
    return std::max(tau, 1.0 / double(n));
}

Estimate estimate_series(const std::vector<double>& xs, int batches) {
    Estimate e;
    e.n = xs.size();
    if (xs.empty()) return e;
    e.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / double(e.n);
    std::size_t b = std::size_t(batches);
    std::size_t len = e.n / b;
    if (len >= 1) {
        std::vector<double> means(b, 0.0);
        for (std::size_t j = 0; j < b; ++j) {
            double s = 0.0;
            for (std::size_t i = j * len; i < (j + 1) * len; ++i) s += xs[i];
            means[j] = s / double(len);
        }
        double m = std::accumulate(means.begin(), means.end(), 0.0) / double(b);
        double v = 0.0;
        for (double x : means) v += (x - m) * (x - m);
        v /= double(b - 1);
        e.std_error = std::sqrt(v / double(b));
    }
    double tau = integrated_autocorrelation(xs);
    e.ess = std::min(double(e.n), double(e.n) / tau);
    return e;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    std::size_t n = std::max(p.size(), q.size());
    double s = 0.0, mp = 0.0, mq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double a = i < p.size() ? p[i] : 0.0;
        double b = i < q.size() ? q[i] : 0.0;
        s += std::fabs(a - b);
        mp += a;
        mq += b;
    }
    s += std::fabs((1.0 - mp) - (1.0 - mq));
    return 0.5 * s;
}

}  // namespace xyl
