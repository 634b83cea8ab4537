#include "doctest.h"

#include "common.hpp"
#include "graphck/trace.hpp"

#include <algorithm>

using namespace graphck;
using namespace graphck::testing;

namespace {

bool has_tag(const std::vector<Obstruction>& obs, const std::string& tag) {
    return std::any_of(obs.begin(), obs.end(), [&](const Obstruction& o) {
        return obstruction_tag(o.kind) == tag;
    });
}

AlgebraElement edge_isometry(const Graph& g, const char* id) {
    int e = g.edge_index(id);
    return AlgebraElement::path_isometry(g, Path{g.edge(e).src, {e}});
}

} // namespace

TEST_CASE("trace files parse, round-trip and validate") {
    Graph g = make_loop(3);
    GraphTrace tr = parse_trace(g, "# weights\nt v1 1\nt v2 1\nt v3 1\n");
    CHECK(check_graph_trace(tr));
    CHECK(is_faithful(tr));
    GraphTrace again = parse_trace(g, trace_to_text(tr));
    CHECK(again.values == tr.values);

    CHECK_THROWS_AS(parse_trace(g, "t v1 1\nt v2 1\n"), ParseError);  // v3 missing
    CHECK_THROWS_AS(parse_trace(g, "t v1 1\nt v1 2\nt v2 1\nt v3 1\n"), ParseError);
    CHECK_THROWS_AS(parse_trace(g, "t v1 one\nt v2 1\nt v3 1\n"), ParseError);
    CHECK_THROWS_AS(parse_trace(g, "t bogus 1\nt v1 1\nt v2 1\nt v3 1\n"), ParseError);
    try {
        parse_trace(g, "t v1 1\nwat\n");
        FAIL("garbage line accepted");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("flow violations are itemized") {
    Graph d = diamond();
    GraphTrace good = parse_trace(d, "t v 2\nt a 1\nt b 1\nt s 1\n");
    CHECK(check_graph_trace(good));

    GraphTrace off = parse_trace(d, "t v 1\nt a 1\nt b 1\nt s 1\n");
    std::vector<TraceViolation> viols;
    CHECK(!check_graph_trace(off, &viols));
    REQUIRE(viols.size() == 1);
    CHECK(viols[0].kind == TraceViolation::FlowMismatch);
    CHECK(viols[0].vertex == d.vertex_index("v"));

    GraphTrace neg = parse_trace(d, "t v -2\nt a -1\nt b -1\nt s -1\n");
    viols.clear();
    CHECK(!check_graph_trace(neg, &viols));
    CHECK(viols.size() == 4);
    CHECK(viols[0].kind == TraceViolation::Negative);

    // zero on a single vertex is valid but kills faithfulness
    Graph le = loopexit();
    GraphTrace z = parse_trace(le, "t v 1\nt s 0\n");
    CHECK(check_graph_trace(z));
    CHECK(!is_faithful(z));
}

TEST_CASE("solver finds the known witnesses") {
    TraceSolution l3 = solve_graph_traces(make_loop(3));
    CHECK(l3.status == TraceSolution::FaithfulWitness);
    CHECK(l3.basis.size() == 1);
    REQUIRE(l3.witness.has_value());
    CHECK(l3.witness->values == std::vector<Rational>{1, 1, 1});
    CHECK(l3.obstructions.empty());

    TraceSolution pan = solve_graph_traces(make_fryingpan(5, 6));
    CHECK(pan.basis.size() == 1);
    REQUIRE(pan.witness.has_value());
    for (const Rational& x : pan.witness->values) CHECK(x == 1);

    Graph d = diamond();
    TraceSolution ds = solve_graph_traces(d);
    CHECK(ds.basis.size() == 1);
    REQUIRE(ds.witness.has_value());
    CHECK(ds.witness->at(d.vertex_index("v")) == 2);
    CHECK(ds.witness->at(d.vertex_index("a")) == 1);
    CHECK(ds.witness->at(d.vertex_index("s")) == 1);

    TraceSolution ts = solve_graph_traces(twosinks());
    CHECK(ts.basis.size() == 2);
    REQUIRE(ts.witness.has_value());
    CHECK(is_faithful(*ts.witness));
    CHECK(*std::min_element(ts.witness->values.begin(), ts.witness->values.end()) == 1);

    TraceSolution fs = solve_graph_traces(fork());
    CHECK(fs.basis.size() == 2);
    CHECK(fs.witness.has_value());
}

TEST_CASE("solver reports the structural obstructions") {
    TraceSolution le = solve_graph_traces(loopexit());
    CHECK(le.status == TraceSolution::None);
    CHECK(!le.witness.has_value());
    CHECK(has_tag(le.obstructions, "loop-with-exit"));
    CHECK(has_tag(le.obstructions, "infinite-paths-to-end"));
    CHECK(le.basis.size() == 1);  // the degenerate ray survives the linear system

    TraceSolution dc = solve_graph_traces(docycle());
    CHECK(dc.status == TraceSolution::None);
    CHECK(has_tag(dc.obstructions, "unbounded-path-multiplicity"));
    CHECK(has_tag(dc.obstructions, "loop-with-exit"));
    CHECK(dc.basis.empty());

    TraceSolution e8 = solve_graph_traces(eight());
    CHECK(e8.status == TraceSolution::None);
    CHECK(has_tag(e8.obstructions, "unbounded-path-multiplicity"));

    TraceSolution cl = solve_graph_traces(chainloops());
    CHECK(cl.status == TraceSolution::None);
    CHECK(has_tag(cl.obstructions, "loop-with-exit"));
}

TEST_CASE("obstruction tags are stable") {
    CHECK(obstruction_tag(Obstruction::LoopWithExit) == "loop-with-exit");
    CHECK(obstruction_tag(Obstruction::UnboundedPathMultiplicity) ==
          "unbounded-path-multiplicity");
    CHECK(obstruction_tag(Obstruction::InfinitePathsToEnd) == "infinite-paths-to-end");
    CHECK(obstruction_tag(Obstruction::NoPositiveSolution) == "no-positive-solution");
}

TEST_CASE("solution span membership") {
    TraceSolution l3 = solve_graph_traces(make_loop(3));
    CHECK(in_solution_span(l3.basis, {2, 2, 2}));
    CHECK(!in_solution_span(l3.basis, {1, 0, 0}));

    TraceSolution fs = solve_graph_traces(fork());
    CHECK(in_solution_span(fs.basis, {5, 2, 3}));  // c = l + s in some order
}

TEST_CASE("end weights construct traces inside the solution space") {
    Graph f = fork();
    auto ends = graph_ends(f);
    REQUIRE(ends.size() == 2);
    std::vector<Rational> w(2);
    for (size_t i = 0; i < ends.size(); ++i) w[i] = ends[i].sink ? 3 : 2;
    GraphTrace tr = construct_from_ends(f, w);
    CHECK(check_graph_trace(tr));
    CHECK(is_faithful(tr));
    CHECK(tr.at(f.vertex_index("c")) == 5);
    CHECK(tr.at(f.vertex_index("s")) == 3);
    CHECK(tr.at(f.vertex_index("l")) == 2);
    CHECK(in_solution_span(solve_graph_traces(f).basis, tr.values));

    Graph d = diamond();
    GraphTrace dt = construct_from_ends(d, {Rational(2)});
    CHECK(dt.at(d.vertex_index("v")) == 4);
    CHECK(check_graph_trace(dt));

    // a cycle outside the chosen ends cannot be propagated across
    CHECK_THROWS_AS(construct_from_ends(loopexit(), {Rational(1)}), std::domain_error);
}

TEST_CASE("construct_from_ends agrees with the solver on random graphs") {
    Rng rng(20260817);
    for (int it = 0; it < 40; ++it) {
        Graph g = random_end_graph(rng);
        GraphTrace tr = random_faithful_trace(rng, g);
        CHECK(check_graph_trace(tr));
        CHECK(is_faithful(tr));
        TraceSolution sol = solve_graph_traces(g);
        CHECK(sol.status == TraceSolution::FaithfulWitness);
        CHECK(in_solution_span(sol.basis, tr.values));
    }
}

TEST_CASE("the trace functional on elements") {
    Graph g = make_loop(3);
    GraphTrace tr = ones_trace(g);
    AlgebraElement s1 = edge_isometry(g, "e1");
    AlgebraElement p1 = AlgebraElement::vertex_projection(g, 0);

    CHECK(tau(tr, p1) == GaussianRational(1));
    CHECK(tau(tr, s1 * s1.adjoint()) == GaussianRational(1));
    CHECK(tau(tr, s1) == GaussianRational(0));  // off-diagonal terms die
    CHECK(tau(tr, p1.scaled(GaussianRational::i())) == GaussianRational::i());
    CHECK_THROWS_AS(tau(tr, AlgebraElement::one(g)), std::invalid_argument);

    Graph h = make_loop(2);
    CHECK_THROWS_AS(tau(tr, AlgebraElement::one(h)), std::invalid_argument);

    CHECK(inner_product(tr, s1, s1) == GaussianRational(1));
    CHECK(inner_product(tr, s1, p1) == GaussianRational(0));
}

TEST_CASE("tau is tracial and gauge invariant") {
    Rng rng(5150);
    Graph g = make_fryingpan(1, 3);
    GraphTrace tr = construct_from_ends(g, {Rational(1)});
    for (int it = 0; it < 40; ++it) {
        AlgebraElement a = random_element(rng, g, 2, 3, false);
        AlgebraElement b = random_element(rng, g, 2, 3, false);
        CHECK(tau(tr, a * b) == tau(tr, b * a));
        CHECK(tau(tr, a) == tau(tr, degree_part(a, 0)));
        GaussianRational nn = tau(tr, a.adjoint() * a);
        CHECK(nn.im == 0);
        CHECK(nn.re >= 0);
    }
}

TEST_CASE("relation membership through a faithful trace") {
    Graph g = make_loop(3);
    GraphTrace tr = ones_trace(g);
    for (int v = 0; v < 3; ++v) {
        AlgebraElement ck = AlgebraElement::vertex_projection(g, v);
        for (int e : g.out_edges(v)) {
            AlgebraElement se =
                AlgebraElement::path_isometry(g, Path{g.edge(e).src, {e}});
            ck = ck - se * se.adjoint();
        }
        CHECK(relation_zero(tr, ck));
    }
    AlgebraElement s1 = edge_isometry(g, "e1");
    CHECK(!relation_zero(tr, s1));
    CHECK(relation_zero(tr, AlgebraElement::zero(g)));
    CHECK(!relation_zero(tr, AlgebraElement::one(g)));  // unit never cancels locally

    Graph vw = vw_sink();
    GraphTrace vt = ones_trace(vw);
    AlgebraElement sa = edge_isometry(vw, "a");
    AlgebraElement ck = AlgebraElement::vertex_projection(vw, 0) - sa * sa.adjoint();
    CHECK(relation_zero(vt, ck));
    // nothing forces the sink projection to vanish
    CHECK(!relation_zero(vt, AlgebraElement::vertex_projection(vw, 1)));

    Graph le = loopexit();
    GraphTrace bad = parse_trace(le, "t v 1\nt s 0\n");
    CHECK_THROWS_AS(relation_zero(bad, AlgebraElement::zero(le)),
                    std::invalid_argument);
}

TEST_CASE("projections and unitaries") {
    Graph g = make_loop(1);
    GraphTrace tr = ones_trace(g);
    AlgebraElement p = AlgebraElement::vertex_projection(g, 0);
    AlgebraElement s = edge_isometry(g, "e1");
    CHECK(is_projection(tr, p));
    CHECK(!is_projection(tr, s));
    CHECK(is_projection(tr, s * s.adjoint()));  // = p on the single vertex

    AlgebraElement u = AlgebraElement::one(g) + s - p;
    CHECK(is_unitary(tr, u));
    CHECK(!is_unitary(tr, s + AlgebraElement::one(g)));
    CHECK(is_unitary(tr, AlgebraElement::one(g)));
}
