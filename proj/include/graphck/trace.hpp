#pragma once

#include "graphck/algebra.hpp"
#include "graphck/graph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace graphck {

// nonnegative vertex weights with g(v) = sum of g(r(e)) over edges leaving v
// at every non-sink v (sinks carry no equation)
struct GraphTrace {
    const Graph* graph = nullptr;
    std::vector<Rational> values;

    const Rational& at(int v) const { return values.at(v); }
};

// Text format, one assignment per line: "t <vertex> <rational>", plus comments.
GraphTrace parse_trace(const Graph& g, const std::string& text);
std::string trace_to_text(const GraphTrace& tr);

struct TraceViolation {
    enum Kind { Negative, FlowMismatch, Missing } kind;
    int vertex;
    std::string detail;
};

bool check_graph_trace(const GraphTrace& tr, std::vector<TraceViolation>* out = nullptr);
bool is_faithful(const GraphTrace& tr);  // all values strictly positive

struct Obstruction {
    enum Kind {
        LoopWithExit,            // a cycle some vertex of which emits an extra edge
        UnboundedPathMultiplicity,  // two distinct cycles chained on one route
        InfinitePathsToEnd,      // some vertex has infinitely many entry paths to an end
        NoPositiveSolution,      // the linear system admits no strictly positive solution
    } kind;
    std::string detail;
};

std::string obstruction_tag(Obstruction::Kind k);

// necessary conditions for a faithful graph trace; any hit rules one out
std::vector<Obstruction> trace_obstructions(const Graph& g);

struct TraceSolution {
    enum Status { FaithfulWitness, OnlyDegenerate, None } status;
    // basis of the full rational solution space of the flow equations
    std::vector<std::vector<Rational>> basis;
    // strictly positive solution scaled so its minimum value is 1
    std::optional<GraphTrace> witness;
    std::vector<Obstruction> obstructions;
};

TraceSolution solve_graph_traces(const Graph& g);

// membership of a value vector in the span of a solution basis
bool in_solution_span(const std::vector<std::vector<Rational>>& basis,
                      const std::vector<Rational>& values);

// backward propagation of end weights across the off-end region (which the
// preconditions force to be acyclic); equals the entry-path weighted sum
GraphTrace construct_from_ends(const Graph& g, const std::vector<Rational>& end_weights);

// the trace functional: tau(S_mu S_nu^*) = [mu == nu] g(r(mu)), extended
// linearly; rejects elements with an adjoined-unit part
GaussianRational tau(const GraphTrace& tr, const AlgebraElement& a);
// <x, y> = tau(x^* y), linear in y
GaussianRational inner_product(const GraphTrace& tr, const AlgebraElement& x,
                               const AlgebraElement& y);

// zero in the relation quotient, decided by tau(a^* a) == 0; sound and
// complete when tr is faithful, hence the requirement
bool relation_zero(const GraphTrace& tr, const AlgebraElement& a);
bool is_projection(const GraphTrace& tr, const AlgebraElement& a);
bool is_unitary(const GraphTrace& tr, const AlgebraElement& a);

} // namespace graphck
