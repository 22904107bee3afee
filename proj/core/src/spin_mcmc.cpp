#include "xyloops/spin_mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace xyl {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap(double t) {
    t = std::remainder(t, 2 * kPi);
    return t <= -kPi ? t + 2 * kPi : t;
}

}  // namespace

void validate_chain_spec(const ChainSpec& spec) {
    if (spec.burn_in < 0 || spec.samples <= 0 || spec.thinning <= 0)
        throw std::invalid_argument("chain spec needs burn_in >= 0, samples > 0, thinning > 0");
}

double sample_von_mises(double mu, double kappa, CounterRng& rng) {
    if (kappa < 1e-10) return wrap(2 * kPi * rng.uniform() - kPi);
    double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
    double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
    double r = (1.0 + rho * rho) / (2.0 * rho);
    double f;
    for (;;) {
        double z = std::cos(kPi * rng.uniform());
        f = (1.0 + r * z) / (r + z);
        double c = kappa * (r - f);
        double u2 = rng.uniform_pos();
        if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) break;
    }
    double ang = std::acos(std::clamp(f, -1.0, 1.0));
    return wrap(rng.uniform() < 0.5 ? mu - ang : mu + ang);
}

SpinChain::SpinChain(const PlanarGraph& g, double beta, std::uint64_t seed, int clusters_per_sweep)
    : g_(g), beta_(beta), seed_(seed), clusters_(clusters_per_sweep), theta_(g.num_vertices(), 0.0),
      nbr_(g.num_vertices()) {
    for (int e = 0; e < g.num_edges(); ++e) {
        int u = g.edge(e).u, v = g.edge(e).v;
        if (u == v) continue;
        nbr_[u].push_back({v, beta * g.coupling(e)});
        nbr_[v].push_back({u, beta * g.coupling(e)});
    }
}

void SpinChain::heat_bath_sweep() {
    for (int v = 0; v < g_.num_vertices(); ++v) {
        double hx = 0.0, hy = 0.0;
        for (auto [w, K] : nbr_[v]) {
            hx += K * std::cos(theta_[w]);
            hy += K * std::sin(theta_[w]);
        }
        CounterRng rng(seed_, std::uint32_t(sweep_), std::uint32_t(v), kSpinHeatBath);
        theta_[v] = sample_von_mises(std::atan2(hy, hx), std::hypot(hx, hy), rng);
    }
}

int SpinChain::cluster_move(std::uint32_t index) {
    int V = g_.num_vertices();
    if (V == 0) return 0;
    CounterRng rng(seed_, std::uint32_t(sweep_), index, kSpinCluster);
    double phi = 2 * kPi * rng.uniform();
    std::vector<char> in(V, 0);
    std::vector<int> stack{int(rng.below(std::uint64_t(V)))};
    in[stack[0]] = 1;
    int size = 0;
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        ++size;
        double px = std::cos(theta_[x] - phi);
        for (auto [y, K] : nbr_[x]) {
            if (in[y]) continue;
            double s = px * std::cos(theta_[y] - phi);
            if (s <= 0.0) continue;
            if (rng.uniform() < -std::expm1(-2.0 * K * s)) {
                in[y] = 1;
                stack.push_back(y);
            }
        }
    }
    for (int v = 0; v < V; ++v)
        if (in[v]) theta_[v] = wrap(kPi + 2 * phi - theta_[v]);
    return size;
}

void SpinChain::sweep() {
    heat_bath_sweep();
    for (int k = 0; k < clusters_; ++k) cluster_move(std::uint32_t(k));
    ++sweep_;
}

SpinObservable two_point_observable(int a, int b) {
    return {"corr_" + std::to_string(a) + "_" + std::to_string(b),
            [a, b](const SpinConfig& t) { return std::cos(t[a] - t[b]); }};
}

SpinObservable two_point_sq_observable(int a, int b) {
    return {"corr2_" + std::to_string(a) + "_" + std::to_string(b),
            [a, b](const SpinConfig& t) { return std::cos(2 * (t[a] - t[b])); }};
}

std::vector<std::vector<double>> spin_series(const PlanarGraph& g, double beta, const ChainSpec& spec,
                                             const std::vector<SpinObservable>& observables) {
    validate_chain_spec(spec);
    SpinChain chain(g, beta, spec.seed);
    for (long s = 0; s < spec.burn_in; ++s) chain.sweep();
    std::vector<std::vector<double>> series(observables.size());
    for (auto& s : series) s.reserve(std::size_t(spec.samples));
    for (long i = 0; i < spec.samples; ++i) {
        for (long s = 0; s < spec.thinning; ++s) chain.sweep();
        for (std::size_t k = 0; k < observables.size(); ++k) series[k].push_back(observables[k].f(chain.angles()));
    }
    return series;
}

std::vector<NamedEstimate> spin_mcmc(const PlanarGraph& g, double beta, const ChainSpec& spec,
                                     const std::vector<SpinObservable>& observables,
                                     const std::function<void(long, const std::vector<double>&)>& trace) {
    auto series = spin_series(g, beta, spec, observables);
    if (trace) {
        std::vector<double> row(observables.size());
        for (long i = 0; i < spec.samples; ++i) {
            for (std::size_t k = 0; k < observables.size(); ++k) row[k] = series[k][std::size_t(i)];
            trace(i, row);
        }
    }
    std::vector<NamedEstimate> out;
    for (std::size_t k = 0; k < observables.size(); ++k) out.push_back({observables[k].name, estimate_series(series[k])});
    return out;
}

}  // namespace xyl
