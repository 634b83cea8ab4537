#include "graphck/graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace graphck {

int Graph::add_vertex(const std::string& id) {
    if (id.empty()) throw std::invalid_argument("empty vertex id");
    if (vid_.count(id)) throw std::invalid_argument("duplicate vertex id: " + id);
    int v = vertex_count();
    vid_[id] = v;
    vertex_ids_.push_back(id);
    out_.emplace_back();
    in_.emplace_back();
    return v;
}

int Graph::add_edge(const std::string& id, const std::string& src, const std::string& dst) {
    if (id.empty()) throw std::invalid_argument("empty edge id");
    if (eid_.count(id)) throw std::invalid_argument("duplicate edge id: " + id);
    int s = vertex_index(src), d = vertex_index(dst);
    if (s < 0) throw std::invalid_argument("unknown vertex: " + src);
    if (d < 0) throw std::invalid_argument("unknown vertex: " + dst);
    int e = edge_count();
    eid_[id] = e;
    edges_.push_back({id, s, d});
    out_[s].push_back(e);
    in_[d].push_back(e);
    return e;
}

int Graph::vertex_index(const std::string& id) const {
    auto it = vid_.find(id);
    return it == vid_.end() ? -1 : it->second;
}

int Graph::edge_index(const std::string& id) const {
    auto it = eid_.find(id);
    return it == eid_.end() ? -1 : it->second;
}

int path_source(const Graph& g, const Path& p) {
    return p.edges.empty() ? p.base : g.edge(p.edges.front()).src;
}

int path_range(const Graph& g, const Path& p) {
    return p.edges.empty() ? p.base : g.edge(p.edges.back()).dst;
}

bool is_valid_path(const Graph& g, const Path& p) {
    if (p.edges.empty()) return p.base >= 0 && p.base < g.vertex_count();
    for (size_t k = 0; k + 1 < p.edges.size(); ++k)
        if (g.edge(p.edges[k]).dst != g.edge(p.edges[k + 1]).src) return false;
    return true;
}

Path concat(const Graph& g, const Path& a, const Path& b) {
    if (path_range(g, a) != path_source(g, b))
        throw std::invalid_argument("paths do not compose");
    Path r = a;
    r.base = path_source(g, a);
    r.edges.insert(r.edges.end(), b.edges.begin(), b.edges.end());
    return r;
}

bool path_prefix(const Graph& g, const Path& a, const Path& b, Path* tail) {
    if (a.edges.size() > b.edges.size()) return false;
    if (a.edges.empty()) {
        if (path_source(g, a) != path_source(g, b)) return false;
    } else if (!std::equal(a.edges.begin(), a.edges.end(), b.edges.begin())) {
        return false;
    }
    if (tail) {
        tail->base = path_range(g, a);
        tail->edges.assign(b.edges.begin() + a.edges.size(), b.edges.end());
    }
    return true;
}

std::string path_str(const Graph& g, const Path& p) {
    if (p.edges.empty()) return "(" + g.vertex_id(p.base) + ")";
    std::string s;
    for (size_t k = 0; k < p.edges.size(); ++k) {
        if (k) s += " ";
        s += g.edge(p.edges[k]).id;
    }
    return s;
}

bool path_less(const Graph& g, const Path& a, const Path& b) {
    if (a.edges.size() != b.edges.size()) return a.edges.size() < b.edges.size();
    if (a.edges.empty()) return g.vertex_id(a.base) < g.vertex_id(b.base);
    for (size_t k = 0; k < a.edges.size(); ++k) {
        const std::string &x = g.edge(a.edges[k]).id, &y = g.edge(b.edges[k]).id;
        if (x != y) return x < y;
    }
    return false;
}

namespace {

// extends every path in `frontier` by one edge, in edge-id order
std::vector<Path> extend_all(const Graph& g, const std::vector<Path>& frontier) {
    std::vector<Path> out;
    for (const Path& p : frontier) {
        std::vector<int> es = g.out_edges(path_range(g, p));
        std::sort(es.begin(), es.end(),
                  [&](int a, int b) { return g.edge(a).id < g.edge(b).id; });
        for (int e : es) {
            Path q = p;
            q.edges.push_back(e);
            out.push_back(std::move(q));
        }
    }
    return out;
}

} // namespace

std::vector<Path> paths_from(const Graph& g, int v, int len) {
    std::vector<Path> cur = {Path{v, {}}};
    for (int k = 0; k < len; ++k) cur = extend_all(g, cur);
    return cur;
}

std::vector<Path> paths_into(const Graph& g, int v, int len) {
    std::vector<Path> all = all_paths_up_to(g, len), out;
    for (Path& p : all)
        if (p.length() == len && path_range(g, p) == v) out.push_back(std::move(p));
    return out;
}

std::vector<Path> all_paths_up_to(const Graph& g, int maxlen) {
    std::vector<Path> acc, frontier;
    for (int v = 0; v < g.vertex_count(); ++v) frontier.push_back(Path{v, {}});
    acc = frontier;
    for (int k = 0; k < maxlen; ++k) {
        frontier = extend_all(g, frontier);
        acc.insert(acc.end(), frontier.begin(), frontier.end());
    }
    return acc;
}

std::vector<Path> boundary_paths(const Graph& g, int v, int n) {
    std::vector<Path> out, cur = {Path{v, {}}};
    for (int k = 0; k < n; ++k) {
        std::vector<Path> nxt;
        for (Path& p : cur) {
            if (g.is_sink(path_range(g, p)))
                out.push_back(std::move(p));
            else
                nxt.push_back(std::move(p));
        }
        cur = extend_all(g, nxt);
    }
    out.insert(out.end(), cur.begin(), cur.end());
    return out;
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

Graph parse_graph(const std::string& text) {
    Graph g;
    std::istringstream is(text);
    std::string line;
    int ln = 0;
    // edges may reference vertices declared later, so collect first
    std::vector<std::tuple<int, std::string, std::string, std::string>> pending;
    while (std::getline(is, line)) {
        ++ln;
        line = strip(line);
        if (line.empty() || line[0] == '#') continue;
        if (line[0] == 'v' && (line.size() == 1 || isspace(static_cast<unsigned char>(line[1])))) {
            auto toks = split_ws(line.substr(1));
            if (toks.empty()) throw ParseError(ln, "vertex line lists no ids");
            for (auto& id : toks) {
                try {
                    g.add_vertex(id);
                } catch (const std::invalid_argument& ex) {
                    throw ParseError(ln, ex.what());
                }
            }
        } else if (line[0] == 'e' && line.size() > 1 && isspace(static_cast<unsigned char>(line[1]))) {
            size_t colon = line.find(':');
            if (colon == std::string::npos) throw ParseError(ln, "edge line missing ':'");
            std::string id = strip(line.substr(1, colon - 1));
            std::string rest = line.substr(colon + 1);
            size_t arrow = rest.find("->");
            if (arrow == std::string::npos) throw ParseError(ln, "edge line missing '->'");
            std::string src = strip(rest.substr(0, arrow));
            std::string dst = strip(rest.substr(arrow + 2));
            if (id.empty() || src.empty() || dst.empty())
                throw ParseError(ln, "edge line needs '<id>: <src> -> <dst>'");
            pending.emplace_back(ln, id, src, dst);
        } else {
            throw ParseError(ln, "expected 'v ...', 'e ...' or comment");
        }
    }
    for (auto& [eln, id, src, dst] : pending) {
        try {
            g.add_edge(id, src, dst);
        } catch (const std::invalid_argument& ex) {
            throw ParseError(eln, ex.what());
        }
    }
    return g;
}

std::string graph_to_text(const Graph& g) {
    std::string s = "v";
    for (int v = 0; v < g.vertex_count(); ++v) s += " " + g.vertex_id(v);
    s += "\n";
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& ed = g.edge(e);
        s += "e " + ed.id + ": " + g.vertex_id(ed.src) + " -> " + g.vertex_id(ed.dst) + "\n";
    }
    return s;
}

Graph make_loop(int n) {
    if (n < 1) throw std::invalid_argument("loop size must be >= 1");
    Graph g;
    for (int i = 1; i <= n; ++i) g.add_vertex("v" + std::to_string(i));
    for (int i = 1; i <= n; ++i)
        g.add_edge("e" + std::to_string(i), "v" + std::to_string(i),
                   "v" + std::to_string(i % n + 1));
    return g;
}

Graph make_fryingpan(int n, int t) {
    if (t < 1) throw std::invalid_argument("tail length must be >= 1");
    Graph g = make_loop(n);
    for (int j = 1; j <= t; ++j) g.add_vertex("w" + std::to_string(j));
    g.add_edge("f1", "w1", "v1");
    for (int j = 2; j <= t; ++j)
        g.add_edge("f" + std::to_string(j), "w" + std::to_string(j),
                   "w" + std::to_string(j - 1));
    return g;
}

bool is_generator_spec(const std::string& s) {
    return !s.empty() && s[0] == '@';
}

Graph make_generator(const std::string& spec) {
    auto bad = [&]() -> std::invalid_argument {
        return std::invalid_argument("unknown generator '" + spec +
                                     "' (expected @loop:n or @fryingpan:n,t)");
    };
    if (!is_generator_spec(spec)) throw bad();
    size_t colon = spec.find(':');
    if (colon == std::string::npos) throw bad();
    std::string name = spec.substr(1, colon - 1), args = spec.substr(colon + 1);
    try {
        if (name == "loop") return make_loop(std::stoi(args));
        if (name == "fryingpan") {
            size_t comma = args.find(',');
            if (comma == std::string::npos) throw bad();
            return make_fryingpan(std::stoi(args.substr(0, comma)),
                                  std::stoi(args.substr(comma + 1)));
        }
    } catch (const std::logic_error&) {
        throw bad();
    }
    throw bad();
}

std::vector<int> cycle_vertices(const Graph& g, const Cycle& c) {
    std::vector<int> vs;
    for (int e : c.edges) vs.push_back(g.edge(e).src);
    return vs;
}

namespace {

Cycle canonical_rotation(const Graph& g, std::vector<int> edges) {
    size_t best = 0;
    for (size_t i = 1; i < edges.size(); ++i) {
        for (size_t k = 0; k < edges.size(); ++k) {
            const std::string& a = g.edge(edges[(i + k) % edges.size()]).id;
            const std::string& b = g.edge(edges[(best + k) % edges.size()]).id;
            if (a < b) {
                best = i;
                break;
            }
            if (a > b) break;
        }
    }
    std::rotate(edges.begin(), edges.begin() + best, edges.end());
    return Cycle{std::move(edges)};
}

} // namespace

std::vector<Cycle> simple_cycles(const Graph& g) {
    // each cycle is found once, anchored at its smallest vertex index
    std::vector<Cycle> out;
    std::vector<int> trail;
    std::vector<bool> used(g.vertex_count(), false);
    std::function<void(int, int)> dfs = [&](int anchor, int here) {
        for (int e : g.out_edges(here)) {
            int nxt = g.edge(e).dst;
            if (nxt == anchor) {
                trail.push_back(e);
                out.push_back(canonical_rotation(g, trail));
                trail.pop_back();
            } else if (nxt > anchor && !used[nxt]) {
                used[nxt] = true;
                trail.push_back(e);
                dfs(anchor, nxt);
                trail.pop_back();
                used[nxt] = false;
            }
        }
    };
    for (int v = 0; v < g.vertex_count(); ++v) dfs(v, v);
    std::sort(out.begin(), out.end(), [&](const Cycle& a, const Cycle& b) {
        Path pa{g.edge(a.edges[0]).src, a.edges}, pb{g.edge(b.edges[0]).src, b.edges};
        return path_less(g, pa, pb);
    });
    return out;
}

bool cycle_has_exit(const Graph& g, const Cycle& c) {
    for (int e : c.edges)
        if (g.out_edges(g.edge(e).src).size() > 1) return true;
    return false;
}

std::vector<End> graph_ends(const Graph& g) {
    std::vector<End> ends;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (g.is_sink(v)) ends.push_back(End{true, v, {}, {v}});
    for (const Cycle& c : simple_cycles(g))
        if (!cycle_has_exit(g, c)) ends.push_back(End{false, -1, c, cycle_vertices(g, c)});
    return ends;
}

GraphReport graph_report(const Graph& g) {
    GraphReport r;
    for (int v = 0; v < g.vertex_count(); ++v) {
        if (g.is_sink(v)) r.sinks.push_back(v);
        if (g.is_source(v)) r.sources.push_back(v);
    }
    r.cycles = simple_cycles(g);
    for (const Cycle& c : r.cycles) r.cycle_exit.push_back(cycle_has_exit(g, c));
    r.ends = graph_ends(g);
    r.no_sources = r.sources.empty();
    return r;
}

std::vector<bool> reachable_from(const Graph& g, int v) {
    std::vector<bool> seen(g.vertex_count(), false);
    std::deque<int> q = {v};
    seen[v] = true;
    while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        for (int e : g.out_edges(x))
            if (!seen[g.edge(e).dst]) {
                seen[g.edge(e).dst] = true;
                q.push_back(g.edge(e).dst);
            }
    }
    return seen;
}

std::vector<bool> coreachable_to(const Graph& g, int w) {
    std::vector<bool> seen(g.vertex_count(), false);
    std::deque<int> q = {w};
    seen[w] = true;
    while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        for (int e : g.in_edges(x))
            if (!seen[g.edge(e).src]) {
                seen[g.edge(e).src] = true;
                q.push_back(g.edge(e).src);
            }
    }
    return seen;
}

PathCount count_vw_paths(const Graph& g, int v, int w) {
    std::vector<bool> fwd = reachable_from(g, v), bwd = coreachable_to(g, w);
    std::vector<bool> region(g.vertex_count());
    for (int x = 0; x < g.vertex_count(); ++x) region[x] = fwd[x] && bwd[x];
    if (!region[v] || !region[w]) return {false, 0};

    // a cycle inside the route region pumps arbitrarily many distinct paths
    std::vector<int> color(g.vertex_count(), 0);
    std::function<bool(int)> has_cycle = [&](int x) {
        color[x] = 1;
        for (int e : g.out_edges(x)) {
            int y = g.edge(e).dst;
            if (!region[y]) continue;
            if (color[y] == 1) return true;
            if (color[y] == 0 && has_cycle(y)) return true;
        }
        color[x] = 2;
        return false;
    };
    for (int x = 0; x < g.vertex_count(); ++x)
        if (region[x] && color[x] == 0 && has_cycle(x)) return {true, 0};

    // acyclic region: memoized count of x -> w paths
    std::vector<std::optional<Integer>> memo(g.vertex_count());
    std::function<Integer(int)> cnt = [&](int x) -> Integer {
        if (memo[x]) return *memo[x];
        Integer total = (x == w) ? 1 : 0;
        for (int e : g.out_edges(x))
            if (region[g.edge(e).dst]) total += cnt(g.edge(e).dst);
        memo[x] = total;
        return total;
    };
    return {false, cnt(v)};
}

PathCount count_entry_paths(const Graph& g, int v, const End& end) {
    // end vertices are terminal here, so paths can only touch the end once
    Graph h;
    for (int x = 0; x < g.vertex_count(); ++x) h.add_vertex(g.vertex_id(x));
    std::vector<bool> in_end(g.vertex_count(), false);
    for (int x : end.vertices) in_end[x] = true;
    for (int e = 0; e < g.edge_count(); ++e)
        if (!in_end[g.edge(e).src])
            h.add_edge(g.edge(e).id, g.vertex_id(g.edge(e).src), g.vertex_id(g.edge(e).dst));
    PathCount total;
    for (int x : end.vertices) {
        PathCount c = count_vw_paths(h, v, x);
        if (c.infinite) return {true, 0};
        total.value += c.value;
    }
    return total;
}

} // namespace graphck
