#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "xyloops/planar_graph.hpp"

namespace xyl {

// {"vertices": [ids], "rotation": {v: [neighbor ids, counterclockwise]},
//  "couplings": {"v-w": J or [J per parallel copy]}, "outer_face": optional
//  [u, v] meaning the face left of u->v}. Optional "coords": {v: [x, y]}.
PlanarGraph graph_from_json(const nlohmann::json& j);
PlanarGraph load_graph(const std::string& path);
nlohmann::json graph_to_json(const PlanarGraph& g);

}  // namespace xyl
