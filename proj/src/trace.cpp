#include "graphck/trace.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace graphck {

GraphTrace parse_trace(const Graph& g, const std::string& text) {
    GraphTrace tr{&g, std::vector<Rational>(g.vertex_count(), Rational(0))};
    std::vector<bool> seen(g.vertex_count(), false);
    std::istringstream is(text);
    std::string line;
    int ln = 0;
    while (std::getline(is, line)) {
        ++ln;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag != "t") throw ParseError(ln, "expected 't <vertex> <rational>'");
        std::string vid, val;
        if (!(ls >> vid >> val)) throw ParseError(ln, "expected 't <vertex> <rational>'");
        int v = g.vertex_index(vid);
        if (v < 0) throw ParseError(ln, "unknown vertex: " + vid);
        if (seen[v]) throw ParseError(ln, "vertex assigned twice: " + vid);
        seen[v] = true;
        try {
            tr.values[v] = parse_rational(val);
        } catch (const std::invalid_argument& ex) {
            throw ParseError(ln, ex.what());
        }
    }
    for (int v = 0; v < g.vertex_count(); ++v)
        if (!seen[v]) throw ParseError(ln, "no value for vertex " + g.vertex_id(v));
    return tr;
}

std::string trace_to_text(const GraphTrace& tr) {
    std::string s;
    for (int v = 0; v < tr.graph->vertex_count(); ++v)
        s += "t " + tr.graph->vertex_id(v) + " " + rational_str(tr.values[v]) + "\n";
    return s;
}

bool check_graph_trace(const GraphTrace& tr, std::vector<TraceViolation>* out) {
    const Graph& g = *tr.graph;
    bool ok = true;
    auto report = [&](TraceViolation::Kind k, int v, std::string d) {
        ok = false;
        if (out) out->push_back({k, v, std::move(d)});
    };
    if (static_cast<int>(tr.values.size()) != g.vertex_count()) {
        report(TraceViolation::Missing, -1, "value vector size mismatch");
        return false;
    }
    for (int v = 0; v < g.vertex_count(); ++v) {
        if (tr.values[v] < 0)
            report(TraceViolation::Negative, v,
                   g.vertex_id(v) + " carries " + rational_str(tr.values[v]));
        if (g.is_sink(v)) continue;
        Rational sum(0);
        for (int e : g.out_edges(v)) sum += tr.values[g.edge(e).dst];
        if (sum != tr.values[v])
            report(TraceViolation::FlowMismatch, v,
                   g.vertex_id(v) + ": " + rational_str(tr.values[v]) +
                       " != outgoing sum " + rational_str(sum));
    }
    return ok;
}

bool is_faithful(const GraphTrace& tr) {
    for (const Rational& x : tr.values)
        if (x <= 0) return false;
    return true;
}

std::string obstruction_tag(Obstruction::Kind k) {
    switch (k) {
        case Obstruction::LoopWithExit: return "loop-with-exit";
        case Obstruction::UnboundedPathMultiplicity: return "unbounded-path-multiplicity";
        case Obstruction::InfinitePathsToEnd: return "infinite-paths-to-end";
        case Obstruction::NoPositiveSolution: return "no-positive-solution";
    }
    return "?";
}

namespace {

std::string cycle_str(const Graph& g, const Cycle& c) {
    std::string s;
    for (int e : c.edges) s += (s.empty() ? "" : " ") + g.edge(e).id;
    return s;
}

} // namespace

std::vector<Obstruction> trace_obstructions(const Graph& g) {
    std::vector<Obstruction> out;
    std::vector<Cycle> cycles = simple_cycles(g);
    for (const Cycle& c : cycles)
        if (cycle_has_exit(g, c))
            out.push_back({Obstruction::LoopWithExit, "cycle [" + cycle_str(g, c) +
                                                          "] has an exit, forcing weight 0 beyond it"});

    // two distinct cycles on one route let equal-length path counts grow without
    // bound, which caps no faithful weight; one cycle alone never does
    for (size_t i = 0; i < cycles.size(); ++i) {
        for (size_t j = 0; j < cycles.size(); ++j) {
            if (i == j) continue;
            std::vector<bool> fwd = reachable_from(g, g.edge(cycles[i].edges[0]).src);
            bool chained = false;
            for (int v : cycle_vertices(g, cycles[j]))
                if (fwd[v]) chained = true;
            if (chained) {
                out.push_back({Obstruction::UnboundedPathMultiplicity,
                               "cycles [" + cycle_str(g, cycles[i]) + "] and [" +
                                   cycle_str(g, cycles[j]) +
                                   "] chain along one route; equal-length path counts "
                                   "between their vertices are unbounded"});
            }
        }
    }

    for (const End& end : graph_ends(g)) {
        for (int v = 0; v < g.vertex_count(); ++v) {
            PathCount c = count_entry_paths(g, v, end);
            if (c.infinite) {
                std::string target = end.sink ? g.vertex_id(end.sink_vertex)
                                              : "loop [" + cycle_str(g, end.loop) + "]";
                out.push_back({Obstruction::InfinitePathsToEnd,
                               g.vertex_id(v) + " has infinitely many entry paths to " + target});
            }
        }
    }
    return out;
}

namespace {

// reduced row echelon form over Q; returns pivot columns
std::vector<int> rref(std::vector<std::vector<Rational>>& rows, int ncols) {
    std::vector<int> piv;
    int r = 0;
    for (int c = 0; c < ncols && r < static_cast<int>(rows.size()); ++c) {
        int p = -1;
        for (int i = r; i < static_cast<int>(rows.size()); ++i)
            if (rows[i][c] != 0) {
                p = i;
                break;
            }
        if (p < 0) continue;
        std::swap(rows[r], rows[p]);
        Rational lead = rows[r][c];
        for (Rational& x : rows[r]) x /= lead;
        for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            Rational f = rows[i][c];
            for (int k = 0; k < static_cast<int>(rows[i].size()); ++k)
                rows[i][k] -= f * rows[r][k];
        }
        piv.push_back(c);
        ++r;
    }
    rows.resize(piv.size());
    return piv;
}

struct FMRow {
    std::vector<Rational> a;  // a . y >= b
    Rational b;
};

// Fourier-Motzkin elimination; returns a feasible point when one exists
std::optional<std::vector<Rational>> fm_feasible(std::vector<FMRow> rows, int nvars) {
    std::vector<std::vector<FMRow>> levels(nvars + 1);
    levels[nvars] = std::move(rows);
    for (int j = nvars - 1; j >= 0; --j) {
        std::vector<FMRow> next;
        std::vector<const FMRow*> pos, neg;
        for (const FMRow& r : levels[j + 1]) {
            if (r.a[j] > 0)
                pos.push_back(&r);
            else if (r.a[j] < 0)
                neg.push_back(&r);
            else
                next.push_back(r);
        }
        for (const FMRow* p : pos)
            for (const FMRow* n : neg) {
                FMRow c{std::vector<Rational>(j + 1, Rational(0)), Rational(0)};
                Rational mp = -n->a[j], mn = p->a[j];
                for (int k = 0; k <= j; ++k) c.a[k] = mp * p->a[k] + mn * n->a[k];
                c.b = mp * p->b + mn * n->b;
                next.push_back(std::move(c));
            }
        levels[j] = std::move(next);
    }
    for (const FMRow& r : levels[0])
        if (r.b > 0) return std::nullopt;
    std::vector<Rational> y(nvars, Rational(0));
    for (int j = 0; j < nvars; ++j) {
        bool has_lo = false, has_hi = false;
        Rational lo(0), hi(0);
        for (const FMRow& r : levels[j + 1]) {
            if (r.a[j] == 0) continue;
            Rational rest = r.b;
            for (int k = 0; k < j; ++k) rest -= r.a[k] * y[k];
            Rational bound = rest / r.a[j];
            if (r.a[j] > 0) {
                if (!has_lo || bound > lo) lo = bound;
                has_lo = true;
            } else {
                if (!has_hi || bound < hi) hi = bound;
                has_hi = true;
            }
        }
        if (has_lo && has_hi)
            y[j] = (lo + hi) / 2;
        else if (has_lo)
            y[j] = lo;
        else if (has_hi)
            y[j] = hi;
    }
    return y;
}

} // namespace

TraceSolution solve_graph_traces(const Graph& g) {
    const int n = g.vertex_count();
    std::vector<std::vector<Rational>> rows;
    for (int v = 0; v < n; ++v) {
        if (g.is_sink(v)) continue;
        std::vector<Rational> row(n, Rational(0));
        row[v] += 1;
        for (int e : g.out_edges(v)) row[g.edge(e).dst] -= 1;
        rows.push_back(std::move(row));
    }
    std::vector<int> piv = rref(rows, n);

    TraceSolution sol;
    std::vector<bool> is_piv(n, false);
    for (int c : piv) is_piv[c] = true;
    for (int f = 0; f < n; ++f) {
        if (is_piv[f]) continue;
        std::vector<Rational> vec(n, Rational(0));
        vec[f] = 1;
        for (size_t r = 0; r < piv.size(); ++r) vec[piv[r]] = -rows[r][f];
        sol.basis.push_back(std::move(vec));
    }
    sol.obstructions = trace_obstructions(g);

    // strict positivity over the solution coordinates, as A y >= 1
    std::optional<std::vector<Rational>> y;
    if (!sol.basis.empty()) {
        std::vector<FMRow> sys;
        for (int v = 0; v < n; ++v) {
            FMRow r{std::vector<Rational>(sol.basis.size()), Rational(1)};
            for (size_t j = 0; j < sol.basis.size(); ++j) r.a[j] = sol.basis[j][v];
            sys.push_back(std::move(r));
        }
        y = fm_feasible(std::move(sys), static_cast<int>(sol.basis.size()));
    }

    if (y) {
        if (!sol.obstructions.empty())
            throw std::logic_error("necessary-condition flags contradict a positive solution");
        std::vector<Rational> vals(n, Rational(0));
        for (size_t j = 0; j < sol.basis.size(); ++j)
            for (int v = 0; v < n; ++v) vals[v] += (*y)[j] * sol.basis[j][v];
        Rational mn = *std::min_element(vals.begin(), vals.end());
        for (Rational& x : vals) x /= mn;
        sol.witness = GraphTrace{&g, std::move(vals)};
        sol.status = TraceSolution::FaithfulWitness;
        return sol;
    }
    if (sol.obstructions.empty()) {
        sol.obstructions.push_back({Obstruction::NoPositiveSolution,
                                    "flow equations admit no strictly positive solution"});
        sol.status = sol.basis.empty() ? TraceSolution::None : TraceSolution::OnlyDegenerate;
        return sol;
    }
    sol.status = TraceSolution::None;
    return sol;
}

bool in_solution_span(const std::vector<std::vector<Rational>>& basis,
                      const std::vector<Rational>& values) {
    std::vector<std::vector<Rational>> rows = basis;
    const int n = static_cast<int>(values.size());
    rref(rows, n);
    std::vector<Rational> v = values;
    for (const auto& row : rows) {
        int lead = -1;
        for (int c = 0; c < n; ++c)
            if (row[c] != 0) {
                lead = c;
                break;
            }
        if (lead >= 0 && v[lead] != 0) {
            Rational f = v[lead] / row[lead];
            for (int c = 0; c < n; ++c) v[c] -= f * row[c];
        }
    }
    return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
}

GraphTrace construct_from_ends(const Graph& g, const std::vector<Rational>& end_weights) {
    std::vector<End> ends = graph_ends(g);
    if (end_weights.size() != ends.size())
        throw std::invalid_argument("need one weight per end (" +
                                    std::to_string(ends.size()) + ")");
    for (const Rational& w : end_weights)
        if (w <= 0) throw std::invalid_argument("end weights must be positive");

    const int n = g.vertex_count();
    std::vector<Rational> vals(n, Rational(0));
    std::vector<bool> on_end(n, false);
    for (size_t i = 0; i < ends.size(); ++i)
        for (int v : ends[i].vertices) {
            on_end[v] = true;
            vals[v] = end_weights[i];
        }
    for (size_t i = 0; i < ends.size(); ++i)
        for (int v = 0; v < n; ++v) {
            PathCount c = count_entry_paths(g, v, ends[i]);
            if (c.infinite)
                throw std::domain_error("infinitely many entry paths from " +
                                        g.vertex_id(v) + " to an end");
        }

    // off-end region must be acyclic or some weight could never settle
    std::vector<int> color(n, 0), order;
    std::function<void(int)> visit = [&](int v) {
        color[v] = 1;
        for (int e : g.out_edges(v)) {
            int w = g.edge(e).dst;
            if (on_end[w]) continue;
            if (color[w] == 1)
                throw std::domain_error("cycle outside the ends (it must have an exit)");
            if (color[w] == 0) visit(w);
        }
        color[v] = 2;
        order.push_back(v);
    };
    for (int v = 0; v < n; ++v)
        if (!on_end[v] && color[v] == 0) visit(v);
    for (int v : order) {
        Rational sum(0);
        for (int e : g.out_edges(v)) sum += vals[g.edge(e).dst];
        vals[v] = sum;
    }
    return GraphTrace{&g, std::move(vals)};
}

GaussianRational tau(const GraphTrace& tr, const AlgebraElement& a) {
    if (&a.graph() != tr.graph)
        throw std::invalid_argument("trace and element live over different graphs");
    if (!a.unit().is_zero())
        throw std::invalid_argument("trace is defined on the algebra, not its unitization");
    GaussianRational total;
    for (const auto& [t, c] : a.terms())
        if (t.mu == t.nu) total += c * GaussianRational(tr.at(path_range(*tr.graph, t.mu)));
    return total;
}

GaussianRational inner_product(const GraphTrace& tr, const AlgebraElement& x,
                               const AlgebraElement& y) {
    return tau(tr, x.adjoint() * y);
}

bool relation_zero(const GraphTrace& tr, const AlgebraElement& a) {
    if (!check_graph_trace(tr) || !is_faithful(tr))
        throw std::invalid_argument("relation test needs a faithful graph trace");
    if (!a.unit().is_zero()) return false;
    GaussianRational q = tau(tr, a.adjoint() * a);
    return q.is_zero();
}

bool is_projection(const GraphTrace& tr, const AlgebraElement& a) {
    return relation_zero(tr, a - a.adjoint()) && relation_zero(tr, a * a - a);
}

bool is_unitary(const GraphTrace& tr, const AlgebraElement& a) {
    AlgebraElement one = AlgebraElement::one(a.graph());
    return relation_zero(tr, a * a.adjoint() - one) &&
           relation_zero(tr, a.adjoint() * a - one);
}

} // namespace graphck
