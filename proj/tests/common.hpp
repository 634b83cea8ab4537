#pragma once

// Shared fixtures for the test suites: the small named graphs the frozen
// constants refer to, plus seeded generators for the randomized properties.

#include "graphck/graph.hpp"
#include "graphck/trace.hpp"

#include <random>
#include <string>
#include <vector>

namespace graphck::testing {

inline Graph diamond() {
    return parse_graph("v v a b s\n"
                       "e va: v -> a\n"
                       "e vb: v -> b\n"
                       "e as: a -> s\n"
                       "e bs: b -> s\n");
}

inline Graph vw_sink() {
    return parse_graph("v v w\ne a: v -> w\n");
}

inline Graph loopexit() {
    return parse_graph("v v s\ne l: v -> v\ne x: v -> s\n");
}

inline Graph docycle() {
    return parse_graph("v v a b w\n"
                       "e va: v -> a\n"
                       "e vb: v -> b\n"
                       "e aw: a -> w\n"
                       "e bw: b -> w\n"
                       "e wv: w -> v\n");
}

inline Graph fork() {
    return parse_graph("v c s l\ne cs: c -> s\ne cl: c -> l\ne ll: l -> l\n");
}

inline Graph twosinks() {
    return parse_graph("v v s1 s2\ne a: v -> s1\ne b: v -> s2\n");
}

inline Graph eight() {
    return parse_graph("v c a b\n"
                       "e ca: c -> a\n"
                       "e ac: a -> c\n"
                       "e cb: c -> b\n"
                       "e bc: b -> c\n");
}

inline Graph twoloops() {
    return parse_graph("v a b\ne la: a -> a\ne lb: b -> b\n");
}

inline Graph chainloops() {
    return parse_graph("v a b\ne la: a -> a\ne ab: a -> b\ne lb: b -> b\n");
}

inline GraphTrace ones_trace(const Graph& g) {
    return GraphTrace{&g, std::vector<Rational>(g.vertex_count(), Rational(1))};
}

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(uint64_t seed) : eng(seed) {}
    int pick(int lo, int hi) {  // inclusive
        return std::uniform_int_distribution<int>(lo, hi)(eng);
    }
    bool coin() { return pick(0, 1) == 1; }
};

// Random graph on which a faithful trace always exists: a layered acyclic
// part draining into ends (sinks and exitless loops). Every vertex keeps a
// route to an end, no cycle has an exit, and entry-path counts stay finite.
inline Graph random_end_graph(Rng& rng) {
    Graph g;
    int ndag = rng.pick(0, 4);
    int nsinks = rng.pick(0, 2);
    int nloops = rng.pick(0, 2);
    if (nsinks + nloops == 0) nsinks = 1;

    std::vector<std::string> dag, entries;
    for (int i = 0; i < ndag; ++i) {
        dag.push_back("d" + std::to_string(i));
        g.add_vertex(dag.back());
    }
    for (int i = 0; i < nsinks; ++i) {
        entries.push_back("s" + std::to_string(i));
        g.add_vertex(entries.back());
    }
    int eid = 0;
    for (int i = 0; i < nloops; ++i) {
        int len = rng.pick(1, 3);
        std::string first = "l" + std::to_string(i) + "_0";
        for (int j = 0; j < len; ++j)
            g.add_vertex("l" + std::to_string(i) + "_" + std::to_string(j));
        for (int j = 0; j < len; ++j)
            g.add_edge("c" + std::to_string(eid++),
                       "l" + std::to_string(i) + "_" + std::to_string(j),
                       "l" + std::to_string(i) + "_" + std::to_string((j + 1) % len));
        entries.push_back(first);
    }
    // each acyclic vertex points only at strictly later layers or at an end
    for (int i = 0; i < ndag; ++i) {
        int fanout = rng.pick(1, 3);
        for (int k = 0; k < fanout; ++k) {
            std::vector<std::string> targets(entries);
            for (int j = i + 1; j < ndag; ++j) targets.push_back(dag[j]);
            const std::string& to = targets[rng.pick(0, (int)targets.size() - 1)];
            g.add_edge("x" + std::to_string(eid++), dag[i], to);
        }
    }
    return g;
}

inline GraphTrace random_faithful_trace(Rng& rng, const Graph& g) {
    std::vector<End> ends = graph_ends(g);
    std::vector<Rational> w;
    for (size_t i = 0; i < ends.size(); ++i) w.push_back(Rational(rng.pick(1, 4)));
    return construct_from_ends(g, w);
}

inline GaussianRational random_coeff(Rng& rng) {
    Rational re(rng.pick(-2, 2), rng.pick(1, 3));
    Rational im = rng.coin() ? Rational(rng.pick(-1, 1)) : Rational(0);
    re.canonicalize();
    return {re, im};
}

// small random element from paths of length <= maxlen, optionally with an
// adjoined-unit part
inline AlgebraElement random_element(Rng& rng, const Graph& g, int maxlen, int nterms,
                                     bool allow_unit) {
    std::vector<Path> ps = all_paths_up_to(g, maxlen);
    AlgebraElement a(g);
    for (int t = 0; t < nterms; ++t) {
        const Path& mu = ps[rng.pick(0, (int)ps.size() - 1)];
        std::vector<Path> mates;
        for (const Path& nu : ps)
            if (path_range(g, nu) == path_range(g, mu)) mates.push_back(nu);
        const Path& nu = mates[rng.pick(0, (int)mates.size() - 1)];
        a.add_term(Term{mu, nu}, random_coeff(rng));
    }
    if (allow_unit && rng.coin()) a.add_unit(random_coeff(rng));
    return a;
}

} // namespace graphck::testing
