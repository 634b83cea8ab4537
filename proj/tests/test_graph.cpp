#include "doctest.h"

#include "common.hpp"
#include "graphck/graph.hpp"

#include <algorithm>

using namespace graphck;
using namespace graphck::testing;

TEST_CASE("graph text parses and round-trips") {
    Graph g = diamond();
    CHECK(g.vertex_count() == 4);
    CHECK(g.edge_count() == 4);
    CHECK(g.vertex_index("v") == 0);
    CHECK(g.vertex_index("nope") == -1);
    CHECK(g.edge(g.edge_index("va")).src == g.vertex_index("v"));
    CHECK(g.is_sink(g.vertex_index("s")));
    CHECK(g.is_source(g.vertex_index("v")));

    Graph h = parse_graph(graph_to_text(g));
    CHECK(h.vertex_count() == 4);
    CHECK(h.edge_count() == 4);
    CHECK(h.edge(h.edge_index("bs")).dst == h.vertex_index("s"));
}

TEST_CASE("parse errors carry line numbers") {
    CHECK_THROWS_AS(parse_graph("v a\nwhat\n"), ParseError);
    try {
        parse_graph("v a\ne x a -> a\n");
        FAIL("missing colon accepted");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
    CHECK_THROWS_AS(parse_graph("v a\ne x: a -> b\n"), ParseError);  // unknown vertex
    CHECK_THROWS_AS(parse_graph("v a a\n"), ParseError);             // duplicate id
    CHECK_THROWS_AS(parse_graph("v a\ne x: a -> a\ne x: a -> a\n"), ParseError);
    CHECK_THROWS_AS(parse_graph("v\n"), ParseError);
    // comments and edges declared before their vertices are both fine
    Graph g = parse_graph("# header\ne x: a -> b\nv a b\n");
    CHECK(g.edge_count() == 1);
}

TEST_CASE("generator specs") {
    CHECK(is_generator_spec("@loop:3"));
    CHECK(!is_generator_spec("loop.txt"));
    Graph g = make_generator("@loop:3");
    CHECK(g.vertex_count() == 3);
    CHECK(g.edge_count() == 3);
    Graph p = make_generator("@fryingpan:2,3");
    CHECK(p.vertex_count() == 5);
    CHECK(p.edge_count() == 5);
    CHECK(p.is_source(p.vertex_index("w3")));
    CHECK_THROWS_AS(make_generator("@loop:0"), std::invalid_argument);
    CHECK_THROWS_AS(make_generator("@loop:x"), std::invalid_argument);
    CHECK_THROWS_AS(make_generator("@fryingpan:2"), std::invalid_argument);
    CHECK_THROWS_AS(make_generator("@ring:4"), std::invalid_argument);
}

TEST_CASE("path enumeration matches the frozen counts") {
    CHECK(all_paths_up_to(make_loop(3), 4).size() == 15);
    CHECK(all_paths_up_to(make_fryingpan(2, 3), 4).size() == 25);
    CHECK(all_paths_up_to(diamond(), 4).size() == 10);
    CHECK(all_paths_up_to(docycle(), 4).size() == 33);
    CHECK(all_paths_up_to(eight(), 4).size() == 33);
    CHECK(all_paths_up_to(chainloops(), 4).size() == 20);

    Graph pan = make_fryingpan(1, 3);
    int v1 = pan.vertex_index("v1");
    std::vector<size_t> into;
    for (int k = 0; k <= 4; ++k) into.push_back(paths_into(pan, v1, k).size());
    CHECK(into == std::vector<size_t>{1, 2, 3, 4, 4});
}

TEST_CASE("path composition and ordering") {
    Graph g = make_loop(3);
    Path e1{0, {g.edge_index("e1")}};
    Path e2{1, {g.edge_index("e2")}};
    CHECK(is_valid_path(g, e1));
    CHECK(path_source(g, e1) == 0);
    CHECK(path_range(g, e1) == 1);

    Path e12 = concat(g, e1, e2);
    CHECK(e12.length() == 2);
    CHECK(path_range(g, e12) == 2);
    CHECK(path_str(g, e12) == "e1 e2");
    CHECK_THROWS_AS(concat(g, e2, e1), std::invalid_argument);

    Path tail;
    CHECK(path_prefix(g, e1, e12, &tail));
    CHECK(tail == e2);
    CHECK(!path_prefix(g, e2, e12, nullptr));

    Path v0{0, {}};
    CHECK(path_less(g, v0, e1));    // shorter first
    CHECK(path_less(g, e1, e12));
    CHECK(!path_less(g, e1, e1));

    Path bogus{0, {g.edge_index("e1"), g.edge_index("e1")}};  // e1 cannot follow e1
    CHECK(!is_valid_path(g, bogus));
    // base only matters at length 0; a nonempty path starts at its first edge
    CHECK(path_source(g, Path{2, {g.edge_index("e1")}}) == 0);
}

TEST_CASE("simple cycle detection matches the frozen counts") {
    auto exits = [](const Graph& g) {
        auto cs = simple_cycles(g);
        int n = 0;
        for (const Cycle& c : cs) n += cycle_has_exit(g, c) ? 1 : 0;
        return std::pair<size_t, int>{cs.size(), n};
    };
    CHECK(exits(make_loop(3)) == std::pair<size_t, int>{1, 0});
    CHECK(exits(make_fryingpan(2, 3)) == std::pair<size_t, int>{1, 0});
    CHECK(exits(diamond()) == std::pair<size_t, int>{0, 0});
    CHECK(exits(docycle()) == std::pair<size_t, int>{2, 2});
    CHECK(exits(eight()) == std::pair<size_t, int>{2, 2});
    CHECK(exits(chainloops()) == std::pair<size_t, int>{2, 1});

    // stored rotation starts at the lexicographically smallest edge sequence
    Graph g = make_loop(3);
    Cycle c = simple_cycles(g).at(0);
    CHECK(g.edge(c.edges[0]).id == "e1");
    CHECK(cycle_vertices(g, c).size() == 3);
}

TEST_CASE("ends are sinks and exitless cycles") {
    Graph f = fork();
    auto ends = graph_ends(f);
    REQUIRE(ends.size() == 2);
    int sinks = 0, loops = 0;
    for (const End& e : ends) {
        if (e.sink) {
            ++sinks;
            CHECK(e.sink_vertex == f.vertex_index("s"));
        } else {
            ++loops;
            CHECK(e.vertices == std::vector<int>{f.vertex_index("l")});
        }
    }
    CHECK(sinks == 1);
    CHECK(loops == 1);

    CHECK(graph_ends(twosinks()).size() == 2);
    CHECK(graph_ends(make_loop(5)).at(0).vertices.size() == 5);
    // a cycle with an exit is not an end
    CHECK(graph_ends(loopexit()).size() == 1);
}

TEST_CASE("path counting and entry paths") {
    Graph d = diamond();
    PathCount c = count_vw_paths(d, d.vertex_index("v"), d.vertex_index("s"));
    CHECK(!c.infinite);
    CHECK(c.value == 2);

    Graph pan = make_fryingpan(1, 3);
    CHECK(count_vw_paths(pan, pan.vertex_index("w3"), pan.vertex_index("v1")).infinite);
    End loop_end = graph_ends(pan).at(0);
    PathCount entry = count_entry_paths(pan, pan.vertex_index("w3"), loop_end);
    CHECK(!entry.infinite);
    CHECK(entry.value == 1);

    Graph le = loopexit();
    End sink_end = graph_ends(le).at(0);
    CHECK(count_entry_paths(le, le.vertex_index("v"), sink_end).infinite);
}

TEST_CASE("boundary paths stop early on sinks") {
    Graph d = diamond();
    auto bp = boundary_paths(d, d.vertex_index("v"), 3);
    REQUIRE(bp.size() == 2);
    for (const Path& p : bp) {
        CHECK(p.length() == 2);
        CHECK(d.is_sink(path_range(d, p)));
    }
    Graph l = make_loop(1);
    auto lp = boundary_paths(l, 0, 3);
    REQUIRE(lp.size() == 1);
    CHECK(lp[0].length() == 3);
}

TEST_CASE("reachability cones") {
    Graph f = fork();
    auto fwd = reachable_from(f, f.vertex_index("c"));
    CHECK(std::count(fwd.begin(), fwd.end(), true) == 3);
    auto back = coreachable_to(f, f.vertex_index("s"));
    CHECK(back[f.vertex_index("c")]);
    CHECK(back[f.vertex_index("s")]);
    CHECK(!back[f.vertex_index("l")]);
}

TEST_CASE("graph report aggregates the pieces") {
    GraphReport r = graph_report(make_fryingpan(1, 3));
    CHECK(r.sinks.empty());
    CHECK(r.sources.size() == 1);
    CHECK(r.cycles.size() == 1);
    CHECK(!r.cycle_exit[0]);
    CHECK(r.ends.size() == 1);
    CHECK(!r.no_sources);
    CHECK(graph_report(make_loop(2)).no_sources);
}
