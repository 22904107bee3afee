#pragma once

#include <vector>

namespace xyl {

// `count` parallel copies of a directed edge from `from` to `to`.
struct StrandBundle {
    int from;
    int to;
    int count;
};

// Exact law of how edge copies link up when, at every vertex outside `kept`,
// incoming ends are paired with outgoing ends uniformly at random. A vertex
// with phi > 0 leaves phi outgoing ends unpaired (paths start there); phi < 0
// leaves -phi incoming ends unpaired (paths end there). Kept vertices are cut.
//
// An outcome is a strand count matrix T: T(x, y) strands run from type x to
// type y without touching a resolved vertex in between. Types are the vertices,
// one path-start type per vertex with phi > 0 and one path-end type per vertex
// with phi < 0. Closed loops through resolved vertices only are dropped.
class StrandLaw {
public:
    struct Outcome {
        std::vector<short> counts;  // num_types x num_types, row = start type
        double prob;
    };

    StrandLaw(int num_vertices, const std::vector<StrandBundle>& bundles, const std::vector<int>& phi,
              const std::vector<int>& kept, double max_states = 2e6);

    int num_types() const { return K_; }
    int vertex_type(int v) const { return v; }
    int start_type(int v) const;  // -1 when v has no path starts
    int end_type(int v) const;    // -1 when v has no path ends

    const std::vector<Outcome>& outcomes() const { return outcomes_; }
    int count(const Outcome& o, int from_type, int to_type) const { return o.counts[from_type * K_ + to_type]; }

private:
    int V_;
    int K_;
    std::vector<int> start_, end_;
    std::vector<Outcome> outcomes_;
};

// Law of m_{a,b} (strands from a to b with all other vertices paired uniformly)
// for the multigraph given by `bundles`. Entry k is P(m = k).
std::vector<double> strand_count_law(int num_vertices, const std::vector<StrandBundle>& bundles, int a, int b);

}  // namespace xyl
