#include "xyloops/bkt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "xyloops/bessel.hpp"
#include "xyloops/heights.hpp"

namespace xyl {

namespace {

struct LineFit {
    double slope = 0.0, intercept = 0.0, rms = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    double n = double(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

}  // namespace

SpinObservable boundary_sum_observable(const PlanarGraph& box) {
    int c = box_center(box);
    std::vector<int> bd = box_boundary(box);
    return {"phi", [c, bd](const SpinConfig& t) {
                double s = 0.0;
                for (int w : bd) s += std::cos(t[c] - t[w]);
                return s;
            }};
}

Estimate phi_estimate(const PlanarGraph& box, double beta, const ChainSpec& spec) {
    return spin_mcmc(box, beta, spec, {boundary_sum_observable(box)})[0].est;
}

ExactValue phi_exact(const PlanarGraph& box, double beta) {
    ExactOracle oracle(box, beta);
    int c = box_center(box);
    ExactValue out;
    for (int w : box_boundary(box)) {
        ExactValue v = oracle.two_point(c, w);
        out.value += v.value;
        out.error += v.error;
        out.oracle_gap = std::max(out.oracle_gap, v.oracle_gap);
        out.cross_checked = out.cross_checked || v.cross_checked;
    }
    return out;
}

BetaBracket bracket_beta_c(const std::vector<int>& sizes, const std::vector<double>& betas, const ChainSpec& spec,
                           double z) {
    BetaBracket b;
    std::vector<double> sorted = betas;
    std::sort(sorted.begin(), sorted.end());
    for (double beta : sorted) {
        bool some_below = false, all_above = true;
        for (int L : sizes) {
            PlanarGraph box = box_lattice(L, L);
            Estimate e = phi_estimate(box, beta, spec);
            b.rows.push_back({L, beta, e});
            some_below = some_below || e.mean + z * e.std_error < 1.0;
            all_above = all_above && e.mean - z * e.std_error >= 1.0;
        }
        if (some_below) {
            b.beta_lo = beta;
            b.lo_found = true;
        }
        if (all_above && !b.hi_found) {
            b.beta_hi = beta;
            b.hi_found = true;
        }
    }
    return b;
}

ChiCut chi_cut(const PlanarGraph& box, double beta, double epsilon, const CutPath& cut, const ChainSpec& spec) {
    ChiCut out;
    out.pairs = int(cut.plus_side.size() * cut.minus_side.size());
    out.degenerate = epsilon >= 2.0;
    if (epsilon == 2.0) {
        out.value = out.pairs;
        return out;
    }
    if (beta == 0.0) return out;
    std::vector<SpinObservable> obs;
    for (int a : cut.plus_side)
        for (int b : cut.minus_side) obs.push_back(two_point_observable(a, b));
    auto series = spin_series(box, beta, spec, obs);
    double p = 2.0 - epsilon;
    std::vector<double> slope(obs.size(), 0.0);
    for (std::size_t k = 0; k < obs.size(); ++k) {
        double m = 0.0;
        for (double x : series[k]) m += x;
        m /= double(series[k].size());
        if (m <= 0.0) {
            out.clamped++;
            continue;
        }
        out.value += std::pow(m, p);
        slope[k] = p * std::pow(m, p - 1.0);
    }
    std::vector<double> lin(series.empty() ? 0 : series[0].size(), 0.0);
    for (std::size_t k = 0; k < obs.size(); ++k)
        for (std::size_t i = 0; i < lin.size(); ++i) lin[i] += slope[k] * series[k][i];
    out.std_error = estimate_series(lin).std_error;
    return out;
}

ChiCut chi_cut_exact(const PlanarGraph& box, double beta, double epsilon, const CutPath& cut) {
    ChiCut out;
    out.pairs = int(cut.plus_side.size() * cut.minus_side.size());
    out.degenerate = epsilon >= 2.0;
    ExactOracle oracle(box, beta);
    for (int a : cut.plus_side)
        for (int b : cut.minus_side) {
            ExactValue v = oracle.two_point(a, b);
            if (v.value <= 0.0) {
                out.clamped++;
                continue;
            }
            out.value += std::pow(v.value, 2.0 - epsilon);
            out.std_error += (2.0 - epsilon) * std::pow(v.value, 1.0 - epsilon) * v.error;
        }
    return out;
}

std::vector<AxisPoint> axis_correlator(const PlanarGraph& box, double beta, const ChainSpec& spec, int r_max) {
    if (!box.box()) throw UnsupportedGraph("axis correlator needs a box");
    int W = box.box()->width, H = box.box()->height;
    if (r_max < 1 || r_max > std::max(W, H)) throw std::invalid_argument("r_max outside the box");
    validate_chain_spec(spec);
    SpinChain chain(box, beta, spec.seed);
    for (long s = 0; s < spec.burn_in; ++s) chain.sweep();
    std::vector<std::vector<double>> series(static_cast<std::size_t>(r_max));
    std::vector<double> c(box.num_vertices()), s(box.num_vertices());
    for (long i = 0; i < spec.samples; ++i) {
        for (long k = 0; k < spec.thinning; ++k) chain.sweep();
        const auto& t = chain.angles();
        for (int v = 0; v < box.num_vertices(); ++v) c[v] = std::cos(t[v]), s[v] = std::sin(t[v]);
        for (int r = 1; r <= r_max; ++r) {
            double sum = 0.0;
            long cnt = 0;
            for (int y = 0; y <= H; ++y)
                for (int x = 0; x + r <= W; ++x) {
                    int a = box_vertex(box, x, y), b = box_vertex(box, x + r, y);
                    sum += c[a] * c[b] + s[a] * s[b];
                    ++cnt;
                }
            for (int x = 0; x <= W; ++x)
                for (int y = 0; y + r <= H; ++y) {
                    int a = box_vertex(box, x, y), b = box_vertex(box, x, y + r);
                    sum += c[a] * c[b] + s[a] * s[b];
                    ++cnt;
                }
            series[std::size_t(r - 1)].push_back(sum / double(cnt));
        }
    }
    std::vector<AxisPoint> out;
    for (int r = 1; r <= r_max; ++r) out.push_back({r, estimate_series(series[std::size_t(r - 1)])});
    return out;
}

std::string to_string(DecayModel m) { return m == DecayModel::Exponential ? "exponential" : "power"; }

DecayFit decay_fit(const std::vector<double>& distances, const std::vector<double>& values,
                   const std::vector<double>& errors) {
    if (distances.size() != values.size() || (!errors.empty() && errors.size() != values.size()))
        throw std::invalid_argument("decay_fit: input lengths differ");
    DecayFit f;
    std::vector<double> r, lr, lc;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0) || !(distances[i] > 0.0)) {
            f.excluded.push_back(int(i));
            continue;
        }
        f.distances.push_back(distances[i]);
        f.values.push_back(values[i]);
        f.errors.push_back(errors.empty() ? 0.0 : errors[i]);
        r.push_back(distances[i]);
        lr.push_back(std::log(distances[i]));
        lc.push_back(std::log(values[i]));
    }
    if (r.size() < 4) throw std::invalid_argument("decay_fit needs at least 4 positive points");
    LineFit e = least_squares(r, lc), p = least_squares(lr, lc);
    f.exp_rate = -e.slope;
    f.exp_intercept = e.intercept;
    f.exp_residual = e.rms;
    f.power_exponent = -p.slope;
    f.power_intercept = p.intercept;
    f.power_residual = p.rms;
    f.model = p.rms < e.rms ? DecayModel::Power : DecayModel::Exponential;
    if (f.model == DecayModel::Power)
        for (std::size_t i = 0; i < f.values.size(); ++i) f.floor_margin.push_back(f.values[i] - 1.0 / (8.0 * f.distances[i]));
    return f;
}

double lammers_condition_triangulation(double beta) {
    double r = bessel_i_scaled(1, 0.5 * beta) / bessel_i_scaled(0, 0.5 * beta);
    return r * r - 0.5;
}

double triangulation_threshold(double tol) { return bisect_increasing(lammers_condition_triangulation, 1e-6, 100.0, tol); }

Estimate abs_height_estimate(const PlanarGraph& g, double beta, const ChainSpec& spec, int face) {
    validate_chain_spec(spec);
    HeightChain chain(g, beta, spec.seed);
    for (long s = 0; s < spec.burn_in; ++s) chain.sweep();
    std::vector<double> xs;
    xs.reserve(std::size_t(spec.samples));
    for (long i = 0; i < spec.samples; ++i) {
        for (long s = 0; s < spec.thinning; ++s) chain.sweep();
        xs.push_back(double(std::labs(chain.heights()[face])));
    }
    return estimate_series(xs);
}

}  // namespace xyl
