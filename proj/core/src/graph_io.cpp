#include "xyloops/graph_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>

namespace xyl {

namespace {

std::string id_string(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw ValidationError("vertex ids must be strings or integers");
}

}  // namespace

PlanarGraph graph_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("graph file must hold a JSON object");
    if (!j.contains("vertices") || !j["vertices"].is_array()) throw ValidationError("missing \"vertices\" array");
    if (!j.contains("rotation") || !j["rotation"].is_object()) throw ValidationError("missing \"rotation\" object");
    RotationSpec spec;
    std::map<std::string, int> index;
    for (const auto& v : j["vertices"]) {
        std::string s = id_string(v);
        if (index.count(s)) throw ValidationError("duplicate vertex id " + s);
        index[s] = spec.num_vertices++;
        spec.labels.push_back(s);
    }
    auto lookup = [&](const std::string& s) {
        auto it = index.find(s);
        if (it == index.end()) throw EmbeddingError("unknown vertex id " + s);
        return it->second;
    };
    spec.neighbors.assign(spec.num_vertices, {});
    for (auto it = j["rotation"].begin(); it != j["rotation"].end(); ++it) {
        int v = lookup(it.key());
        if (!it.value().is_array()) throw ValidationError("rotation of " + it.key() + " must be an array");
        for (const auto& w : it.value()) spec.neighbors[v].push_back(lookup(id_string(w)));
    }
    if (j.contains("couplings")) {
        for (auto it = j["couplings"].begin(); it != j["couplings"].end(); ++it) {
            const std::string& key = it.key();
            auto dash = key.find('-');
            if (dash == std::string::npos) throw ValidationError("coupling key " + key + " must look like v-w");
            int a = lookup(key.substr(0, dash)), b = lookup(key.substr(dash + 1));
            std::vector<double> vals;
            if (it.value().is_number())
                vals.push_back(it.value().get<double>());
            else if (it.value().is_array())
                for (const auto& x : it.value()) vals.push_back(x.get<double>());
            else
                throw ValidationError("coupling on edge " + key + " must be a number or array");
            for (double x : vals)
                if (!(x > 0)) throw ValidationError("coupling on edge " + key + " must be positive");
            if (a > b) std::reverse(vals.begin(), vals.end());
            spec.couplings[{std::min(a, b), std::max(a, b)}] = vals;
        }
    }
    if (j.contains("outer_face") && !j["outer_face"].is_null()) {
        const auto& o = j["outer_face"];
        if (!o.is_array() || o.size() != 2) throw ValidationError("outer_face must be a pair [u, v]");
        spec.outer_hint = std::make_pair(lookup(id_string(o[0])), lookup(id_string(o[1])));
    }
    if (j.contains("coords")) {
        spec.coords.assign(spec.num_vertices, Point{});
        std::vector<char> have(spec.num_vertices, 0);
        for (auto it = j["coords"].begin(); it != j["coords"].end(); ++it) {
            int v = lookup(it.key());
            spec.coords[v] = {it.value().at(0).get<double>(), it.value().at(1).get<double>()};
            have[v] = 1;
        }
        for (int v = 0; v < spec.num_vertices; ++v)
            if (!have[v]) throw ValidationError("coords missing for vertex " + spec.labels[v]);
    }
    return build_from_rotation(spec);
}

PlanarGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open graph file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("graph file is not valid JSON: ") + e.what());
    }
    return graph_from_json(j);
}

nlohmann::json graph_to_json(const PlanarGraph& g) {
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    for (int v = 0; v < g.num_vertices(); ++v) j["vertices"].push_back(g.label(v));
    j["rotation"] = nlohmann::json::object();
    std::map<std::string, std::vector<double>> coup;
    for (int v = 0; v < g.num_vertices(); ++v) {
        auto& r = j["rotation"][g.label(v)];
        r = nlohmann::json::array();
        for (int h : g.rotation(v)) r.push_back(g.label(g.target(h)));
    }
    for (int e = 0; e < g.num_edges(); ++e) {
        int a = g.edge(e).u, b = g.edge(e).v;
        if (a > b) std::swap(a, b);
        coup[g.label(a) + "-" + g.label(b)].push_back(g.coupling(e));
    }
    j["couplings"] = nlohmann::json::object();
    for (auto& [k, v] : coup) {
        bool uniform = std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
        if (uniform)
            j["couplings"][k] = v[0];
        else
            j["couplings"][k] = v;
    }
    if (g.num_faces() > 0) {
        int h = g.face_walk(g.outer_face()).front();
        j["outer_face"] = {g.label(g.origin(h)), g.label(g.target(h))};
    }
    if (g.has_coords()) {
        j["coords"] = nlohmann::json::object();
        for (int v = 0; v < g.num_vertices(); ++v) j["coords"][g.label(v)] = {g.coord(v).x, g.coord(v).y};
    }
    return j;
}

}  // namespace xyl
