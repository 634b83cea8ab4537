#pragma once

#include "graphck/rational.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace graphck {

// Finite directed graph. Edges run s(e) -> r(e); paths compose left to right,
// so mu = m1 m2 ... requires r(m1) == s(m2), and a path of length 0 is a vertex.
class Graph {
public:
    struct Edge {
        std::string id;
        int src = -1;
        int dst = -1;
    };

    int add_vertex(const std::string& id);
    int add_edge(const std::string& id, const std::string& src, const std::string& dst);

    int vertex_count() const { return static_cast<int>(vertex_ids_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::string& vertex_id(int v) const { return vertex_ids_.at(v); }
    const Edge& edge(int e) const { return edges_.at(e); }
    int vertex_index(const std::string& id) const;  // -1 when absent
    int edge_index(const std::string& id) const;

    const std::vector<int>& out_edges(int v) const { return out_.at(v); }
    const std::vector<int>& in_edges(int v) const { return in_.at(v); }
    bool is_sink(int v) const { return out_.at(v).empty(); }
    bool is_source(int v) const { return in_.at(v).empty(); }

private:
    std::vector<std::string> vertex_ids_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> out_, in_;
    std::unordered_map<std::string, int> vid_, eid_;
};

// base is the source vertex; kept explicitly so length-0 paths stay distinct per vertex
struct Path {
    int base = -1;
    std::vector<int> edges;

    int length() const { return static_cast<int>(edges.size()); }
    bool operator==(const Path& o) const { return base == o.base && edges == o.edges; }
};

int path_source(const Graph& g, const Path& p);
int path_range(const Graph& g, const Path& p);
bool is_valid_path(const Graph& g, const Path& p);
Path concat(const Graph& g, const Path& a, const Path& b);
// a is a prefix of b; when so, *tail receives the remainder (based at r(a))
bool path_prefix(const Graph& g, const Path& a, const Path& b, Path* tail = nullptr);
std::string path_str(const Graph& g, const Path& p);

// total order used everywhere a deterministic term order is needed:
// length first, then edge ids lexicographically (base vertex id for length 0)
bool path_less(const Graph& g, const Path& a, const Path& b);

std::vector<Path> paths_from(const Graph& g, int v, int len);   // exactly len
std::vector<Path> paths_into(const Graph& g, int v, int len);
std::vector<Path> all_paths_up_to(const Graph& g, int maxlen);
// paths of length n, together with shorter ones that end early on a sink
std::vector<Path> boundary_paths(const Graph& g, int v, int n);

struct ParseError : std::runtime_error {
    int line;
    ParseError(int ln, const std::string& msg)
        : std::runtime_error("line " + std::to_string(ln) + ": " + msg), line(ln) {}
};

// Text format, one item per line:
//   # comment
//   v <id> [<id> ...]
//   e <id>: <src> -> <dst>
Graph parse_graph(const std::string& text);
std::string graph_to_text(const Graph& g);

Graph make_loop(int n);
// simple n-loop fed by a tail of t vertices; the tail head is a source
// (the finite stand-in for an infinite tail, so quantities that need
// arbitrarily long incoming paths are only meaningful away from the head)
Graph make_fryingpan(int n, int t);
// "@loop:n" | "@fryingpan:n,t", anything else is treated as file text
bool is_generator_spec(const std::string& s);
Graph make_generator(const std::string& spec);

// vertex-simple directed cycle, stored rotated so the edge-id sequence is
// lexicographically smallest
struct Cycle {
    std::vector<int> edges;
    bool operator==(const Cycle& o) const { return edges == o.edges; }
};

std::vector<int> cycle_vertices(const Graph& g, const Cycle& c);
std::vector<Cycle> simple_cycles(const Graph& g);
bool cycle_has_exit(const Graph& g, const Cycle& c);

// an end is a sink or an exitless cycle
struct End {
    bool sink = false;
    int sink_vertex = -1;
    Cycle loop;
    std::vector<int> vertices;  // the sink, or the cycle's vertices
};

std::vector<End> graph_ends(const Graph& g);

struct GraphReport {
    std::vector<int> sinks, sources;
    std::vector<Cycle> cycles;
    std::vector<bool> cycle_exit;
    std::vector<End> ends;
    bool no_sources = true;
};

GraphReport graph_report(const Graph& g);

// exact path count; infinite exactly when the v->w route region contains a cycle
struct PathCount {
    bool infinite = false;
    Integer value = 0;
};

PathCount count_vw_paths(const Graph& g, int v, int w);
// paths reaching the end, with end vertices allowed only as the final vertex
PathCount count_entry_paths(const Graph& g, int v, const End& end);

std::vector<bool> reachable_from(const Graph& g, int v);
std::vector<bool> coreachable_to(const Graph& g, int w);

} // namespace graphck
