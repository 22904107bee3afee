// xy-loops: command line front end for the xyloops library.
//
// Exit status: 0 when every executed check passes, 1 when some check fails,
// 2 for configuration errors (bad flags, unreadable or malformed inputs,
// requests beyond the enumeration guards).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "xyloops/battery.hpp"
#include "xyloops/bessel.hpp"
#include "xyloops/bkt.hpp"
#include "xyloops/current.hpp"
#include "xyloops/graph_io.hpp"
#include "xyloops/heights.hpp"
#include "xyloops/inequality.hpp"
#include "xyloops/planar_graph.hpp"
#include "xyloops/quadrature.hpp"
#include "xyloops/spin_mcmc.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kSchemaLine = "# xy-loops schema v1\n";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Writes to a sibling temporary file and renames it over the target, so a
// reader never sees a partial artifact. Empty path or "-" means stdout.
void write_atomic(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content << std::flush;
        return;
    }
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("cannot write " + tmp);
        f << content;
        f.flush();
        if (!f) throw ConfigError("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// ---- option bindings with config-file fallback ----------------------------

struct Binding {
    CLI::App* command;   // top-level subcommand owning the option
    CLI::Option* option;
    std::string key;
    std::function<void(const nlohmann::json&)> assign;
};

class Options {
public:
    template <class T>
    CLI::Option* add(CLI::App* command, CLI::App* app, const std::string& flag, T& var, const std::string& help) {
        CLI::Option* o = app->add_option(flag, var, help);
        std::string key = flag.substr(flag.find_first_not_of('-'));
        bindings_.push_back({command, o, key, [&var](const nlohmann::json& j) { var = j.get<T>(); }});
        return o;
    }

    CLI::Option* add_flag(CLI::App* command, CLI::App* app, const std::string& flag, bool& var, const std::string& help) {
        CLI::Option* o = app->add_flag(flag, var, help);
        bindings_.push_back({command, o, flag.substr(2), [&var](const nlohmann::json& j) { var = j.get<bool>(); }});
        return o;
    }

    // Fill options not given on the command line from the config file: a
    // section named after the subcommand first, then top-level keys.
    void apply(const std::string& path, CLI::App* active) {
        nlohmann::json cfg;
        if (!path.empty()) {
            std::ifstream f(path);
            if (!f) throw ConfigError("cannot read config file " + path);
            try {
                cfg = nlohmann::json::parse(f);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError("config file " + path + ": " + e.what());
            }
            if (!cfg.is_object()) throw ConfigError("config file " + path + " must hold a JSON object");
        }
        for (const Binding& b : bindings_) {
            if (b.command != active || b.option->count() > 0) continue;
            const nlohmann::json* v = nullptr;
            std::string section = active->get_name();
            if (cfg.contains(section) && cfg[section].is_object() && cfg[section].contains(b.key))
                v = &cfg[section][b.key];
            else if (cfg.contains(b.key))
                v = &cfg[b.key];
            if (!v) continue;
            try {
                b.assign(*v);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError("config key '" + b.key + "': " + e.what());
            }
            from_config_.insert(b.key);
        }
    }

    bool given(CLI::Option* o, const std::string& key) const { return o->count() > 0 || from_config_.count(key) > 0; }

private:
    std::vector<Binding> bindings_;
    std::set<std::string> from_config_;
};

// ---- graph sources ----------------------------------------------------------

struct GraphSource {
    std::string file;
    int box = 0;  // box of box x box sites
    std::string builtin;
    bool triangulate = false;

    xyl::PlanarGraph load() const {
        int sources = int(!file.empty()) + int(box > 0) + int(!builtin.empty());
        if (sources != 1) throw ConfigError("give exactly one of --graph, --box, --builtin");
        if (!file.empty()) {
            if (!std::filesystem::exists(file)) throw ConfigError("graph file not found: " + file);
            return xyl::load_graph(file);
        }
        if (box > 0) {
            if (box < 2) throw ConfigError("--box needs at least 2 sites per side");
            xyl::PlanarGraph g = xyl::box_lattice(box - 1, box - 1);
            return triangulate ? xyl::triangulate_square_lattice(g) : g;
        }
        static const std::map<std::string, std::function<xyl::PlanarGraph()>> table = {
            {"edge", [] { return xyl::single_edge(); }},
            {"doubled", [] { return xyl::doubled_edge(); }},
            {"path3", [] { return xyl::path_graph(3); }},
            {"path4", [] { return xyl::path_graph(4); }},
            {"triangle", [] { return xyl::triangle_graph(); }},
            {"cycle4", [] { return xyl::cycle_graph(4); }},
            {"theta", [] { return xyl::theta_graph(); }},
            {"k4", [] { return xyl::complete_graph4(); }},
        };
        auto it = table.find(builtin);
        if (it == table.end()) throw ConfigError("unknown builtin graph '" + builtin + "'");
        return it->second();
    }

    std::string describe() const {
        if (!file.empty()) return file;
        if (box > 0) return "box" + std::to_string(box) + (triangulate ? "t" : "");
        return builtin;
    }
};

void add_graph_options(Options& opts, CLI::App* cmd, GraphSource& src) {
    opts.add(cmd, cmd, "--graph", src.file, "Graph file (JSON rotation system)");
    opts.add(cmd, cmd, "--box", src.box, "Square box with N x N sites");
    opts.add(cmd, cmd, "--builtin", src.builtin, "edge|doubled|path3|path4|triangle|cycle4|theta|k4");
    opts.add_flag(cmd, cmd, "--triangulate", src.triangulate, "Add one diagonal per box square");
}

// Vertex by label, by "x,y" on a box, or by index.
int resolve_vertex(const xyl::PlanarGraph& g, const std::string& token) {
    for (int v = 0; v < g.num_vertices(); ++v)
        if (g.label(v) == token) return v;
    auto comma = token.find(',');
    try {
        if (comma != std::string::npos && g.box()) {
            int x = std::stoi(token.substr(0, comma)), y = std::stoi(token.substr(comma + 1));
            return xyl::box_vertex(g, x, y);
        }
        std::size_t used = 0;
        int v = std::stoi(token, &used);
        if (used == token.size() && v >= 0 && v < g.num_vertices()) return v;
    } catch (const std::logic_error&) {
    }
    throw ConfigError("unknown vertex '" + token + "'");
}

xyl::ChainSpec chain_spec(std::uint64_t seed, long burn_in, long samples, long thin) {
    xyl::ChainSpec s;
    s.seed = seed;
    s.burn_in = burn_in;
    s.samples = samples;
    s.thinning = thin;
    try {
        xyl::validate_chain_spec(s);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return s;
}

// ---- subcommands ------------------------------------------------------------

int run_graph_check(const GraphSource& src, const std::string& out) {
    xyl::PlanarGraph g = src.load();
    int V = g.num_vertices(), E = g.num_edges(), F = g.num_faces(), C = g.num_components();
    json j;
    j["graph"] = src.describe();
    j["vertices"] = V;
    j["edges"] = E;
    j["faces"] = F;
    j["components"] = C;
    j["outer_face_length"] = g.face_walk(g.outer_face()).size();
    j["euler_ok"] = (V - E + F == 1 + C);
    write_atomic(out, j.dump(2) + "\n");
    return j["euler_ok"].get<bool>() ? 0 : 1;
}

int run_bessel(const std::vector<int>& ks, const std::vector<double>& betas, const std::string& out) {
    json rows = json::array();
    bool ok = true;
    for (double beta : betas) {
        if (!(beta >= 0)) throw ConfigError("beta must be nonnegative");
        for (int k : ks) {
            json r;
            r["k"] = k;
            r["beta"] = beta;
            r["value_scaled"] = xyl::bessel_i_scaled(k, beta);
            r["rel_tolerance"] = 1e-13;
            if (beta > 0) {
                r["log_value"] = xyl::bessel_i_log(k, beta);
                r["potential"] = xyl::potential(k, beta);
                double t = xyl::turan_margin(std::abs(k), beta);
                r["turan_margin"] = t;
                r["turan_tolerance"] = 1e-15;
                ok = ok && t >= -1e-15;
            }
            rows.push_back(r);
        }
    }
    json j;
    j["values"] = rows;
    json lm;
    lm["threshold"] = xyl::lammers_threshold();
    lm["tolerance"] = 1e-10;
    json margins = json::array();
    for (double beta : betas)
        if (beta > 0) margins.push_back({{"beta", beta}, {"margin", xyl::lammers_margin(beta)}});
    lm["margins"] = margins;
    j["lammers"] = lm;
    json tri;
    tri["threshold"] = xyl::triangulation_threshold();
    tri["tolerance"] = 1e-10;
    j["triangulation"] = tri;
    j["passed"] = ok;
    write_atomic(out, j.dump(2) + "\n");
    return ok ? 0 : 1;
}

int run_exact(const GraphSource& src, double beta, const std::string& a_tok, const std::string& b_tok, int power,
              int cutoff, double tolerance, const std::string& out) {
    xyl::PlanarGraph g = src.load();
    if (!(beta > 0)) throw ConfigError("--beta must be positive");
    if (power < 1) throw ConfigError("--power must be at least 1");
    int a = resolve_vertex(g, a_tok), b = resolve_vertex(g, b_tok);
    if (cutoff <= 0) cutoff = xyl::cutoff_for_tolerance(g, beta, 1e-12);
    xyl::CorrelatorResult r = xyl::partition_and_correlators(g, beta, a, b, power, cutoff, tolerance);
    json j;
    j["graph"] = src.describe();
    j["beta"] = beta;
    j["a"] = g.label(a);
    j["b"] = g.label(b);
    j["power"] = power;
    j["cutoff"] = cutoff;
    j["ratio"] = r.ratio;
    j["lower"] = r.lower;
    j["upper"] = r.upper;
    j["tolerance"] = tolerance;
    j["numerator"] = {{"value", r.numerator.value}, {"tail_bound", r.numerator.tail_bound}};
    j["denominator"] = {{"value", r.denominator.value}, {"tail_bound", r.denominator.tail_bound}};
    j["certified"] = r.certified;
    bool ok = r.certified;
    if (g.num_vertices() <= 5) {
        try {
            xyl::QuadResult q = xyl::quad_correlator(g, beta, {{a, power}, {b, -power}}, 1e-12);
            double gap = std::abs(q.value - r.ratio);
            j["quadrature"] = {{"value", q.value}, {"gap", gap}, {"tolerance", xyl::kOracleTolerance + (r.upper - r.lower)}};
            ok = ok && gap <= xyl::kOracleTolerance + (r.upper - r.lower);
        } catch (const xyl::UnsupportedGraph&) {
            j["quadrature"] = nullptr;
        }
    }
    j["passed"] = ok;
    write_atomic(out, j.dump(2) + "\n");
    return ok ? 0 : 1;
}

json report_json(const xyl::CheckReport& r) {
    json j;
    j["name"] = r.name;
    j["instance"] = r.instance;
    j["margin"] = r.margin;
    j["tolerance"] = r.tolerance;
    j["passed"] = r.passed;
    return j;
}

int run_verify(const std::string& suite, std::uint64_t seed, int trials, const std::vector<double>& betas,
               const std::string& out) {
    if (trials < 1) throw ConfigError("--trials must be positive");
    for (double b : betas)
        if (!(b > 0)) throw ConfigError("--betas must be positive");
    std::vector<std::pair<std::string, std::vector<xyl::CheckReport>>> parts;
    bool all = suite == "all";
    if (all || suite == "bessel") parts.push_back({"bessel", xyl::bessel_battery()});
    if (all || suite == "oracles") parts.push_back({"oracles", xyl::oracle_battery()});
    if (all || suite == "loops") parts.push_back({"loops", xyl::loops_battery()});
    if (all || suite == "coloured") parts.push_back({"coloured", xyl::coloured_battery()});
    if (all || suite == "inequalities") parts.push_back({"inequalities", xyl::inequalities_battery(seed, trials, betas)});
    if (all || suite == "samplers") parts.push_back({"samplers", xyl::sampler_battery(seed)});
    json j;
    j["suite"] = suite;
    j["seed"] = seed;
    std::size_t total = 0, failures = 0;
    json groups = json::array();
    for (auto& [name, reports] : parts) {
        json checks = json::array();
        for (const auto& r : reports) {
            checks.push_back(report_json(r));
            if (!r.passed)
                std::cerr << "FAIL " << name << ": " << r.name << " [" << r.instance << "] margin " << num(r.margin)
                          << " tolerance " << num(r.tolerance) << "\n";
        }
        std::size_t f = xyl::count_failures(reports);
        groups.push_back({{"group", name}, {"checks", checks}, {"failures", f}});
        total += reports.size();
        failures += f;
    }
    j["groups"] = groups;
    j["total"] = total;
    j["failures"] = failures;
    j["passed"] = failures == 0;
    write_atomic(out, j.dump(2) + "\n");
    return failures == 0 ? 0 : 1;
}

struct SampleArgs {
    GraphSource src;
    double beta = 1.0;
    std::uint64_t seed = 0;
    long burn_in = 1000, samples = 10000, thin = 1;
    std::vector<std::string> observables;
    std::string trace, out;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

int run_sample(SampleArgs args) {
    xyl::PlanarGraph g = args.src.load();
    if (!(args.beta >= 0)) throw ConfigError("--beta must be nonnegative");
    xyl::ChainSpec spec = chain_spec(args.seed, args.burn_in, args.samples, args.thin);
    if (args.observables.empty()) {
        if (g.box())
            args.observables = {"phi", "absh"};
        else
            args.observables = {"corr:0:1"};
    }

    // Spin observables share one chain; height observables run their own.
    struct Row {
        std::string name;
        int spin_index = -1;
        xyl::Estimate est;
    };
    std::vector<Row> rows;
    std::vector<xyl::SpinObservable> spin;
    for (const std::string& tok : args.observables) {
        auto parts = split(tok, ':');
        Row row;
        row.name = tok;
        if (parts[0] == "phi") {
            if (!g.box()) throw ConfigError("observable phi needs a box");
            xyl::SpinObservable o = xyl::boundary_sum_observable(g);
            o.name = tok;
            row.spin_index = int(spin.size());
            spin.push_back(o);
        } else if (parts[0] == "energy") {
            const xyl::PlanarGraph* gp = &g;
            row.spin_index = int(spin.size());
            spin.push_back({tok, [gp](const xyl::SpinConfig& t) {
                                double s = 0.0;
                                for (int e = 0; e < gp->num_edges(); ++e)
                                    s += gp->coupling(e) * std::cos(t[gp->edge(e).u] - t[gp->edge(e).v]);
                                return s;
                            }});
        } else if ((parts[0] == "corr" || parts[0] == "corr2") && parts.size() == 3) {
            int a = resolve_vertex(g, parts[1]), b = resolve_vertex(g, parts[2]);
            xyl::SpinObservable o = parts[0] == "corr" ? xyl::two_point_observable(a, b) : xyl::two_point_sq_observable(a, b);
            o.name = tok;
            row.spin_index = int(spin.size());
            spin.push_back(o);
        } else if (parts[0] == "absh" && parts.size() <= 2) {
            int face;
            if (parts.size() == 2)
                face = std::stoi(parts[1]);
            else if (g.box())
                face = xyl::box_center_face(g);
            else if (!g.inner_faces().empty())
                face = g.inner_faces().front();
            else
                throw ConfigError("observable absh needs an inner face");
            if (face < 0 || face >= g.num_faces()) throw ConfigError("face out of range in '" + tok + "'");
            row.est = xyl::abs_height_estimate(g, args.beta, spec, face);
        } else if (parts[0] == "loopsq" && parts.size() == 3) {
            int a = resolve_vertex(g, parts[1]), b = resolve_vertex(g, parts[2]);
            row.est = xyl::estimate_two_point_sq(g, args.beta, a, b, spec);
        } else {
            throw ConfigError("unknown observable '" + tok + "'");
        }
        rows.push_back(row);
    }

    std::ostringstream trace;
    if (!spin.empty()) {
        std::function<void(long, const std::vector<double>&)> hook;
        if (!args.trace.empty())
            hook = [&](long i, const std::vector<double>& vals) {
                json line;
                line["sample"] = i;
                for (std::size_t k = 0; k < spin.size(); ++k) line[spin[k].name] = vals[k];
                trace << line.dump() << "\n";
            };
        auto est = xyl::spin_mcmc(g, args.beta, spec, spin, hook);
        for (Row& r : rows)
            if (r.spin_index >= 0) r.est = est[std::size_t(r.spin_index)].est;
    }

    std::ostringstream csv;
    csv << kSchemaLine;
    csv << "# graph=" << args.src.describe() << " beta=" << num(args.beta) << " seed=" << args.seed
        << " burnin=" << args.burn_in << " samples=" << args.samples << " thin=" << args.thin << "\n";
    csv << "observable,mean,stderr,ess,n\n";
    for (const Row& r : rows)
        csv << r.name << "," << num(r.est.mean) << "," << num(r.est.std_error) << "," << num(r.est.ess) << ","
            << r.est.n << "\n";
    if (!args.trace.empty()) write_atomic(args.trace, trace.str());
    write_atomic(args.out, csv.str());
    return 0;
}

struct BktArgs {
    std::vector<int> boxes = {8, 12};
    std::vector<double> betas = {0.3, 1.5};
    double epsilon = 0.5;
    std::string cut = "center";
    int r_max = 6;
    std::uint64_t seed = 0;
    long burn_in = 1000, samples = 10000, thin = 1;
    std::string out;
};

int run_bkt(const BktArgs& args) {
    xyl::ChainSpec spec = chain_spec(args.seed, args.burn_in, args.samples, args.thin);
    if (args.cut != "center" && args.cut != "none") throw ConfigError("--cut must be center or none");
    if (!(args.epsilon >= 0 && args.epsilon <= 2)) throw ConfigError("--epsilon must lie in [0, 2]");
    std::ostringstream csv;
    csv << kSchemaLine;
    csv << "# seed=" << args.seed << " burnin=" << args.burn_in << " samples=" << args.samples
        << " thin=" << args.thin << " epsilon=" << num(args.epsilon) << " cut=" << args.cut << "\n";
    csv << "beta,box,phi,phi_se,chi,chi_se,Eabsh,Eabsh_se,fit_model,fit_param,fit_residual\n";
    for (double beta : args.betas) {
        if (!(beta >= 0)) throw ConfigError("--betas must be nonnegative");
        for (int L : args.boxes) {
            if (L < 3) throw ConfigError("--boxes entries need at least 3 sites per side");
            xyl::PlanarGraph box = xyl::box_lattice(L - 1, L - 1);
            xyl::Estimate phi = xyl::phi_estimate(box, beta, spec);
            xyl::ChiCut chi;
            if (args.cut == "center") chi = xyl::chi_cut(box, beta, args.epsilon, xyl::box_cut(box), spec);
            xyl::Estimate h = xyl::abs_height_estimate(box, beta, spec, xyl::box_center_face(box));
            std::string model = "none";
            double param = 0.0, resid = 0.0;
            int r_max = std::min(args.r_max, L - 1);
            if (r_max >= 4) {
                auto pts = xyl::axis_correlator(box, beta, spec, r_max);
                std::vector<double> r, c, e;
                for (const auto& p : pts) r.push_back(p.r), c.push_back(p.corr.mean), e.push_back(p.corr.std_error);
                try {
                    xyl::DecayFit f = xyl::decay_fit(r, c, e);
                    model = xyl::to_string(f.model);
                    param = f.model == xyl::DecayModel::Exponential ? f.exp_rate : f.power_exponent;
                    resid = f.model == xyl::DecayModel::Exponential ? f.exp_residual : f.power_residual;
                } catch (const std::invalid_argument&) {
                }
            }
            csv << num(beta) << "," << L << "," << num(phi.mean) << "," << num(phi.std_error) << ","
                << (args.cut == "center" ? num(chi.value) : "") << "," << (args.cut == "center" ? num(chi.std_error) : "")
                << "," << num(h.mean) << "," << num(h.std_error) << "," << model << "," << num(param) << ","
                << num(resid) << "\n";
        }
    }
    write_atomic(args.out, csv.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Loop, current and height representations of the planar XY model"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "JSON file with default option values");
    Options opts;

    // graph check
    CLI::App* graph = app.add_subcommand("graph", "Graph utilities");
    graph->require_subcommand(1);
    graph->fallthrough();
    CLI::App* gcheck = graph->add_subcommand("check", "Validate a graph and print V/E/F");
    GraphSource gsrc;
    std::string gout;
    gcheck->add_option("file", gsrc.file, "Graph file");
    opts.add(graph, gcheck, "--box", gsrc.box, "Square box with N x N sites");
    opts.add(graph, gcheck, "--builtin", gsrc.builtin, "Builtin graph name");
    opts.add_flag(graph, gcheck, "--triangulate", gsrc.triangulate, "Add one diagonal per box square");
    opts.add(graph, gcheck, "--out", gout, "Output path");

    // bessel
    CLI::App* bessel = app.add_subcommand("bessel", "Bessel values, Turan margins, thresholds");
    std::vector<int> bks = {0, 1, 2, 3, 4, 5};
    std::vector<double> bbetas = {0.5, 1.0, 2.0, 4.0};
    std::string bout;
    opts.add(bessel, bessel, "--k", bks, "Orders")->delimiter(',');
    opts.add(bessel, bessel, "--betas", bbetas, "Arguments")->delimiter(',');
    opts.add(bessel, bessel, "--out", bout, "Output path");

    // exact
    CLI::App* exact = app.add_subcommand("exact", "Correlators from truncated current sums");
    GraphSource esrc;
    double ebeta = 1.0, etol = 1e-6;
    std::string ea = "0", eb = "1", eout;
    int epower = 1, ecutoff = 0;
    add_graph_options(opts, exact, esrc);
    opts.add(exact, exact, "--beta", ebeta, "Inverse temperature");
    opts.add(exact, exact, "--a", ea, "First vertex");
    opts.add(exact, exact, "--b", eb, "Second vertex");
    opts.add(exact, exact, "--power", epower, "Spin power k in <s_a^k conj(s_b)^k>");
    opts.add(exact, exact, "--cutoff", ecutoff, "Per half-edge cutoff (0: automatic)");
    opts.add(exact, exact, "--tolerance", etol, "Required enclosure width");
    opts.add(exact, exact, "--out", eout, "Output path");

    // verify
    CLI::App* verify = app.add_subcommand("verify", "Run identity and inequality batteries");
    verify->require_subcommand(1);
    std::uint64_t vseed = 0;
    int vtrials = 20;
    std::vector<double> vbetas = {0.5, 1.0, 2.0};
    std::string vout, vsuite;
    CLI::Option* vseed_opt = opts.add(verify, verify, "--seed", vseed, "Seed for randomized and Monte Carlo checks");
    opts.add(verify, verify, "--trials", vtrials, "Randomized instances per beta");
    opts.add(verify, verify, "--betas", vbetas, "Betas for the randomized inequalities")->delimiter(',');
    opts.add(verify, verify, "--out", vout, "Output path");
    for (const char* s : {"loops", "coloured", "inequalities", "bessel", "oracles", "samplers", "all"}) {
        CLI::App* sub = verify->add_subcommand(s, std::string("Battery: ") + s);
        sub->callback([&vsuite, s] { vsuite = s; });
        sub->fallthrough();
    }
    verify->fallthrough();

    // sample
    CLI::App* sample = app.add_subcommand("sample", "Monte Carlo estimates");
    SampleArgs sargs;
    add_graph_options(opts, sample, sargs.src);
    opts.add(sample, sample, "--beta", sargs.beta, "Inverse temperature");
    CLI::Option* sseed_opt = opts.add(sample, sample, "--seed", sargs.seed, "Random seed (required)");
    opts.add(sample, sample, "--burnin", sargs.burn_in, "Burn-in sweeps");
    opts.add(sample, sample, "--samples", sargs.samples, "Recorded samples");
    opts.add(sample, sample, "--thin", sargs.thin, "Sweeps between samples");
    opts.add(sample, sample, "--observables", sargs.observables,
             "phi, energy, corr:A:B, corr2:A:B, absh[:FACE], loopsq:A:B");
    opts.add(sample, sample, "--trace", sargs.trace, "Per-sample JSONL trace of spin observables");
    opts.add(sample, sample, "--out", sargs.out, "CSV output path");

    // bkt
    CLI::App* bkt = app.add_subcommand("bkt", "Finite-size BKT diagnostics on boxes");
    BktArgs bargs;
    opts.add(bkt, bkt, "--boxes", bargs.boxes, "Box sizes (sites per side)")->delimiter(',');
    opts.add(bkt, bkt, "--betas", bargs.betas, "Betas")->delimiter(',');
    opts.add(bkt, bkt, "--epsilon", bargs.epsilon, "Exponent offset in the cut sum");
    opts.add(bkt, bkt, "--cut", bargs.cut, "center or none");
    opts.add(bkt, bkt, "--rmax", bargs.r_max, "Largest axis distance in the decay fit");
    CLI::Option* bseed_opt = opts.add(bkt, bkt, "--seed", bargs.seed, "Random seed (required)");
    opts.add(bkt, bkt, "--burnin", bargs.burn_in, "Burn-in sweeps");
    opts.add(bkt, bkt, "--samples", bargs.samples, "Recorded samples");
    opts.add(bkt, bkt, "--thin", bargs.thin, "Sweeps between samples");
    opts.add(bkt, bkt, "--out", bargs.out, "CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        opts.apply(config_path, active);
        if (active == graph) return run_graph_check(gsrc, gout);
        if (active == bessel) return run_bessel(bks, bbetas, bout);
        if (active == exact) return run_exact(esrc, ebeta, ea, eb, epower, ecutoff, etol, eout);
        if (active == verify) {
            bool stochastic = vsuite == "all" || vsuite == "inequalities" || vsuite == "samplers";
            if (stochastic && !opts.given(vseed_opt, "seed")) throw ConfigError("--seed is required for this battery");
            return run_verify(vsuite, vseed, vtrials, vbetas, vout);
        }
        if (active == sample) {
            if (!opts.given(sseed_opt, "seed")) throw ConfigError("--seed is required");
            return run_sample(sargs);
        }
        if (active == bkt) {
            if (!opts.given(bseed_opt, "seed")) throw ConfigError("--seed is required");
            return run_bkt(bargs);
        }
    } catch (const std::exception& e) {
        // configuration, validation and guard errors alike
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
