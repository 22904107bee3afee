#include "xyloops/battery.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <functional>
#include <string>
#include <tuple>

#include "xyloops/bessel.hpp"
#include "xyloops/coloured.hpp"
#include "xyloops/current.hpp"
#include "xyloops/heights.hpp"
#include "xyloops/loops.hpp"
#include "xyloops/spin_mcmc.hpp"

namespace xyl {

namespace {

struct Named {
    std::string name;
    PlanarGraph graph;
};

CheckReport flag(std::string name, std::string instance, bool ok) {
    return make_report(std::move(name), std::move(instance), ok ? 0.0 : -1.0, 0.0);
}

std::string beta_tag(double beta) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "beta=%g", beta);
    return buf;
}

// Every current with all entries in [0, cap].
void for_each_bounded_current(const PlanarGraph& g, int cap, const std::function<void(const Current&)>& visit) {
    Current n(std::size_t(g.num_half_edges()), 0);
    for (;;) {
        visit(n);
        std::size_t i = 0;
        while (i < n.size() && n[i] == cap) n[i++] = 0;
        if (i == n.size()) return;
        ++n[i];
    }
}

VertexSet support(const SourceFunction& d) {
    VertexSet s;
    for (int v = 0; v < int(d.size()); ++v)
        if (d[v] != 0) s.push_back(v);
    return s;
}

// A second admissible set: add the first vertex not already present, or drop
// to the full vertex set when every vertex is a source.
VertexSet enlarged(const VertexSet& s, int vertices) {
    VertexSet out = s;
    for (int v = 0; v < vertices; ++v)
        if (std::find(s.begin(), s.end(), v) == s.end()) {
            out.push_back(v);
            std::sort(out.begin(), out.end());
            return out;
        }
    return out;
}

int edge_at(const PlanarGraph& g, int v) { return PlanarGraph::edge_of(g.rotation(v).front()); }

// Cutoff for the switching checks: the omitted mass at 2 beta stays far below
// the enclosure budget.
int switch_cutoff(const PlanarGraph& g, double beta) { return cutoff_for_tolerance(g, 2.0 * beta, 1e-10); }

// Half the summed enclosure widths minus the distance between midpoints;
// nonnegative iff the enclosures overlap.
double agreement_margin(const SwitchCheck& s) {
    double c_mid = 0.5 * (s.correlator.lower + s.correlator.upper);
    double half = 0.5 * (s.correlator.upper - s.correlator.lower + s.loop_value.width());
    return half - std::abs(c_mid - s.loop_value.mid());
}

// The truncation bound of the derivative check decays like the square root of
// the omitted mass, so it needs a deeper cutoff than the correlators.
constexpr int kDerivativeCutoff = 24;

}  // namespace

std::size_t count_failures(const std::vector<CheckReport>& reports) {
    return std::size_t(std::count_if(reports.begin(), reports.end(), [](const CheckReport& r) { return !r.passed; }));
}

std::vector<CheckReport> bessel_battery() {
    std::vector<CheckReport> out;
    for (double beta : {0.25, 1.0, 2.0, 4.0}) {
        double worst = 1e300;
        for (int k = 0; k <= 50; ++k) worst = std::min(worst, turan_margin(k, beta));
        out.push_back(make_report("turan_margin", beta_tag(beta) + " k<=50", worst, 1e-15));
    }
    double conv = 0.0;
    for (int k = -5; k <= 5; ++k)
        for (int l = -5; l <= 5; ++l)
            for (double b1 : {0.25, 1.0, 2.0, 4.0})
                for (double b2 : {0.25, 1.0, 2.0, 4.0}) {
                    auto r = convolution_residual(k, l, b1, b2, 40);
                    conv = std::max(conv, r.residual + r.tail_bound);
                }
    out.push_back(make_report("convolution_residual", "k,l in [-5,5], cutoff 40", 1e-10 - conv, 0.0));
    for (double beta : {0.2, 1.0}) out.push_back(flag("ratio_chain", beta_tag(beta) + " k<=30", ratio_chain_check(30, beta).passed));
    for (double beta : {0.5, 1.0, 2.0}) {
        double worst = 0.0;
        for (int k = 0; k <= 10; ++k) {
            YkDistribution y(k, beta);
            for (int r = 1; r <= 4; ++r) {
                double exact = yk_falling_moment_closed(k, beta, r);
                worst = std::max(worst, std::abs(y.falling_moment(r) - exact) / exact);
            }
        }
        out.push_back(make_report("yk_falling_moments", beta_tag(beta) + " k<=10 r<=4", -worst, 1e-10));
    }
    double thr = lammers_threshold();
    out.push_back(make_report("lammers_root", "threshold", -std::abs(lammers_margin(thr)), 1e-10));
    return out;
}

std::vector<CheckReport> loop_expansion_battery() {
    std::vector<CheckReport> out;
    const double beta = 1.3;
    std::vector<Named> graphs = {{"single_edge", single_edge()},
                                 {"doubled_edge", doubled_edge()},
                                 {"path3", path_graph(3)},
                                 {"cycle4", cycle_graph(4)},
                                 {"theta", theta_graph()}};
    for (const auto& [name, g] : graphs) {
        double worst1 = 0.0, worst2 = 0.0, spread = 0.0;
        long currents = 0;
        for_each_bounded_current(g, 3, [&](const Current& n) {
            VertexSet s1 = support(divergence(g, n));
            VertexSet s2 = enlarged(s1, g.num_vertices());
            auto r1 = verify_loopexp(g, n, s1, beta, 2e3);
            auto r2 = verify_loopexp(g, n, s2, beta, 2e3);
            worst1 = std::max(worst1, r1.rel_residual);
            worst2 = std::max(worst2, r2.rel_residual);
            spread = std::max(spread, std::abs(r1.loop_sum - r2.loop_sum) / r1.current_weight);
            ++currents;
        });
        std::string inst = name + " currents=" + std::to_string(currents);
        out.push_back(make_report("loop_expansion_sources", inst, -worst1, 1e-12));
        out.push_back(make_report("loop_expansion_enlarged", inst, -worst2, 1e-12));
        out.push_back(make_report("loop_expansion_set_independence", inst, -spread, 1e-12));
    }
    return out;
}

std::vector<CheckReport> loops_battery() {
    std::vector<CheckReport> out = loop_expansion_battery();
    const double beta = 1.3;
    {
        PlanarGraph g = cycle_graph(4);
        Current n(std::size_t(g.num_half_edges()), 1);
        auto c = verify_cutting(g, n, {}, {0, 2}, beta);
        out.push_back(make_report("cutting_map", "cycle4 n=1 both ways, S={0,2}", -c.max_rel_residual, 1e-12));
        out.push_back(flag("cutting_preimages", "cycle4 n=1 both ways, S={0,2}", c.preimage_counts_ok));
    }
    for (const auto& [name, g, a, b, M] :
         std::vector<std::tuple<std::string, PlanarGraph, int, int, std::vector<int>>>{
             {"doubled_edge M=(2,2)", doubled_edge(), 0, 1, {2, 2}},
             {"cycle4 M=2", cycle_graph(4), 0, 2, {2, 2, 2, 2}},
             {"theta M=(2,2,2)", theta_graph(), 0, 1, {2, 2, 2}}}) {
        auto r = verify_path_reversal(g, beta, a, b, M);
        double rel = std::abs(r.sourced_sum - r.reversed_sum) / std::max(r.sourced_sum, 1e-300);
        out.push_back(make_report("path_reversal", name, -rel, 1e-12));
        out.push_back(flag("path_reversal_bijection", name, r.bijective && r.weights_preserved));
    }
    for (const auto& [name, g, M] : std::vector<std::tuple<std::string, PlanarGraph, std::vector<int>>>{
             {"cycle4 M=1", cycle_graph(4), {1, 1, 1, 1}},
             {"cycle4 M=2", cycle_graph(4), {2, 2, 2, 2}},
             {"theta M=(1,1,2)", theta_graph(), {1, 1, 2}},
             {"doubled_edge M=(1,3)", doubled_edge(), {1, 3}}}) {
        auto [sum, euler] = eulerian_marginal(g, beta, M);
        out.push_back(make_report("eulerian_marginal", name, -std::abs(sum - euler) / std::max(sum, 1e-300), 1e-12));
    }

    for (const auto& [name, g] : std::vector<Named>{{"single_edge", single_edge()}, {"cycle4", cycle_graph(4)}}) {
        std::vector<std::pair<int, int>> pairs = {{0, 1}};
        if (g.num_vertices() == 4) pairs.push_back({0, 2});
        for (double b : {0.5, 1.0, 2.0})
            for (auto [x, y] : pairs) {
                auto s = single_switch_verify(g, b, x, y, switch_cutoff(g, b));
                std::string inst = name + " " + beta_tag(b) + " a=" + std::to_string(x) + " b=" + std::to_string(y);
                double overlap = agreement_margin(s);
                double width = std::max(s.correlator.upper - s.correlator.lower, s.loop_value.width());
                out.push_back(make_report("single_switch_agree", inst, overlap, 1e-12));
                out.push_back(make_report("single_switch_width", inst, 1e-6 - width, 0.0));
                out.push_back(flag("single_switch_sandwich", inst, s.sandwich));
            }
    }
    {
        PlanarGraph g = single_edge();
        auto s = higher_power_verify(g, 1.0, 0, 1, 2, switch_cutoff(g, 1.0));
        out.push_back(make_report("falling_factorial_switch", "single_edge beta=1 k=2", agreement_margin(s), 1e-12));
    }

    std::vector<std::tuple<std::string, PlanarGraph, int>> wgraphs = {{"doubled_edge", doubled_edge(), 3},
                                                                      {"cycle4", cycle_graph(4), 2},
                                                                      {"theta", theta_graph(), 2},
                                                                      {"box2x1", box_lattice(2, 1), 1}};
    for (const auto& [name, g, cap] : wgraphs) {
        long configs = 0, mismatches = 0, skipped = 0;
        SourceFunction zero(std::size_t(g.num_vertices()), 0);
        enumerate_currents(g, zero, cap, [&](const Current& n) {
            if (consistent_count_formula(g, n, {}) > 2e4) {
                ++skipped;
                return;
            }
            HeightField h = height_from_current(g, n);
            enumerate_consistent(g, n, {}, [&](const LoopConfig& cfg) {
                ++configs;
                if (winding_field(g, cfg) != h || winding_field_crossings(g, cfg) != h) ++mismatches;
            });
        });
        std::string inst = name + " configs=" + std::to_string(configs) + " skipped_currents=" + std::to_string(skipped);
        out.push_back(make_report("winding_equals_height", inst, -double(mismatches), 0.0));
    }
    return out;
}

std::vector<CheckReport> coloured_battery() {
    std::vector<CheckReport> out;
    {
        PlanarGraph g = triangle_graph();
        const double beta = 0.9;
        double worst = 0.0;
        long pairs = 0;
        for_each_bounded_current(g, 1, [&](const Current& r) {
            for_each_bounded_current(g, 1, [&](const Current& b) {
                SourceFunction d = divergence(g, r);
                SourceFunction db = divergence(g, b);
                for (std::size_t v = 0; v < d.size(); ++v) d[v] += db[v];
                VertexSet s1 = support(d);
                VertexSet s2 = enlarged(s1, g.num_vertices());
                for (const VertexSet& S : {VertexSet{}, s1, s2}) {
                    auto c = verify_loopexp1(g, r, b, S, beta, 2e3);
                    worst = std::max(worst, c.rel_residual);
                }
                ++pairs;
            });
        });
        out.push_back(make_report("coloured_expansion", "triangle entries<=1 pairs=" + std::to_string(pairs), -worst, 1e-12));
    }
    for (const auto& [name, g] : std::vector<Named>{{"single_edge", single_edge()}, {"cycle4", cycle_graph(4)}}) {
        std::vector<std::pair<int, int>> pairs = {{0, 1}};
        if (g.num_vertices() == 4) pairs.push_back({0, 2});
        for (double b : {0.5, 1.0, 2.0})
            for (auto [x, y] : pairs) {
                auto s = double_switch_verify(g, b, x, y, switch_cutoff(g, b));
                std::string inst = name + " " + beta_tag(b) + " a=" + std::to_string(x) + " b=" + std::to_string(y);
                double overlap = agreement_margin(s);
                double width = std::max(s.correlator.upper - s.correlator.lower, s.loop_value.width());
                out.push_back(make_report("double_switch_agree", inst, overlap, 1e-12));
                out.push_back(make_report("double_switch_width", inst, 1e-6 - width, 0.0));
                out.push_back(flag("double_switch_sandwich", inst, s.sandwich));
                if (g.num_vertices() == 2) {
                    double q = bessel_i_scaled(1, b) / bessel_i_scaled(0, b);
                    out.push_back(make_report("double_switch_closed_form", inst, -std::abs(s.loop_value.mid() - q * q), 1e-8));
                }
            }
    }
    for (const auto& [name, g, a, b, c] : std::vector<std::tuple<std::string, PlanarGraph, int, int, int>>{
             {"path3 a-c-b", path_graph(3), 0, 2, 1},
             {"triangle", triangle_graph(), 0, 1, 2},
             {"cycle4", cycle_graph(4), 0, 2, 1},
             {"k4", complete_graph4(), 0, 1, 2}}) {
        for (double beta : {0.5, 1.0, 2.0}) {
            auto f = ferromagnet_verify(g, beta, a, b, c, cutoff_for_tolerance(g, beta, 1e-12));
            std::string inst = name + " " + beta_tag(beta);
            double tol = f.enclosure + kExactTolerance;
            out.push_back(make_report("ferromagnet_first", inst, f.first_margin, tol));
            out.push_back(make_report("ferromagnet_second", inst, f.second_margin, tol));
            if (f.oracle_gap > 0.0) out.push_back(make_report("ferromagnet_oracle", inst, -f.oracle_gap, kOracleTolerance));
        }
    }
    for (const auto& [name, g] : std::vector<Named>{{"single_edge", single_edge()}, {"cycle4", cycle_graph(4)}}) {
        int a = 0, b = g.num_vertices() == 2 ? 1 : 2;
        int e = edge_at(g, a);
        auto d = derivative_identity_check(g, 1.0, a, b, e, kDerivativeCutoff);
        std::string inst = name + " beta=1 e=" + std::to_string(e);
        out.push_back(make_report("derivative_identity", inst, -d.residual, 1e-6));
        out.push_back(make_report("derivative_truncation", inst, -d.rhs_bound, 1e-6));
    }
    return out;
}

std::vector<CheckReport> oracle_battery() {
    std::vector<CheckReport> out;
    std::vector<Named> graphs = {{"single_edge", single_edge()},   {"doubled_edge", doubled_edge()},
                                 {"path3", path_graph(3)},         {"path4", path_graph(4)},
                                 {"triangle", triangle_graph()},   {"cycle4", cycle_graph(4)},
                                 {"theta", theta_graph()},         {"k4", complete_graph4()}};
    for (const auto& [name, g] : graphs)
        for (double beta : {0.5, 1.0, 2.0}) {
            ExactOracle oracle(g, beta);
            double gap = 0.0, err = 0.0;
            bool crossed = true;
            for (int a = 0; a < g.num_vertices(); ++a)
                for (int b = a + 1; b < g.num_vertices(); ++b) {
                    ExactValue v = oracle.two_point(a, b);
                    gap = std::max(gap, v.oracle_gap);
                    err = std::max(err, v.error);
                    crossed = crossed && v.cross_checked;
                }
            std::string inst = name + " " + beta_tag(beta);
            out.push_back(make_report("quadrature_vs_currents", inst, -gap, kOracleTolerance));
            out.push_back(make_report("current_enclosure", inst, -err, kOracleTolerance));
            out.push_back(flag("quadrature_ran", inst, crossed));
        }
    return out;
}

std::vector<CheckReport> inequalities_battery(std::uint64_t seed, int trials, const std::vector<double>& betas) {
    std::vector<CheckReport> out = randomized_suite(seed, trials, betas);
    out.push_back(check_mirror_exact(box_lattice(2, 2), 1.0));
    for (const auto& [name, g, a, b] : std::vector<std::tuple<std::string, PlanarGraph, int, int>>{
             {"single_edge", single_edge(), 0, 1}, {"cycle4", cycle_graph(4), 0, 2}, {"theta", theta_graph(), 0, 1}})
        for (double beta : betas) {
            CheckReport r = check_squares(g, beta, a, b);
            r.instance = name + " " + r.instance;
            out.push_back(r);
        }
    return out;
}

std::vector<CheckReport> sampler_battery(std::uint64_t seed) {
    std::vector<CheckReport> out;
    ChainSpec spec;
    spec.seed = seed;
    spec.burn_in = 1000;
    spec.samples = 40000;
    for (const auto& [name, g, a, b] : std::vector<std::tuple<std::string, PlanarGraph, int, int>>{
             {"single_edge", single_edge(), 0, 1}, {"cycle4", cycle_graph(4), 0, 2}}) {
        const double beta = 1.0;
        ExactOracle oracle(g, beta);
        double c1 = oracle.two_point(a, b).value;
        SourceFunction sq = point_sources(g, a, b, 2);
        double c2 = oracle.correlator(sq).value;
        auto est = spin_mcmc(g, beta, spec, {two_point_observable(a, b), two_point_sq_observable(a, b)});
        std::string inst = name + " beta=1";
        for (auto [e, exact] : {std::pair{est[0], c1}, std::pair{est[1], c2}}) {
            double z = std::abs(e.est.mean - exact) / e.est.std_error;
            out.push_back(make_report("spin_chain_vs_exact", inst + " " + e.name, 4.0 - z, 0.0));
            out.push_back(make_report("spin_chain_ess", inst + " " + e.name, e.est.ess - 500.0, 0.0));
        }
        Estimate h = estimate_two_point_sq(g, beta, a, b, spec);
        double z = std::abs(h.mean - c2) / h.std_error;
        out.push_back(make_report("height_chain_vs_exact", inst + " corr_sq", 4.0 - z, 0.0));
    }
    {
        PlanarGraph box = box_lattice(4, 4);
        CutPath cut = box_cut(box);
        ChainSpec ws = spec;
        ws.burn_in = 200;
        ws.samples = 10000;
        auto w = winding_and_height_stats(box, 1.0, ws, box_center_face(box), &cut);
        out.push_back(make_report("winding_equals_height_mc", "box4x4 beta=1 samples=" + std::to_string(w.samples),
                                  -double(w.mismatches), 0.0));
        out.push_back(make_report("cut_domination_mc", "box4x4 beta=1", -double(w.domination_failures), 0.0));
    }
    {
        ChainSpec ms = spec;
        ms.samples = 20000;
        for (CheckReport r : check_mms(box_lattice(8, 8), 1.0, 2, 2, ms)) out.push_back(r);
    }
    return out;
}

}  // namespace xyl
