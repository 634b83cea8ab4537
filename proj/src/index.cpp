#include "graphck/index.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace graphck {

std::optional<int> backward_depth(const Graph& g, int v) {
    std::vector<bool> cone = coreachable_to(g, v);
    const int n = g.vertex_count();

    // a cycle anywhere in the cone feeds v paths of every length
    std::vector<int> color(n, 0);
    std::function<bool(int)> cyclic = [&](int u) {
        color[u] = 1;
        for (int e : g.out_edges(u)) {
            int w = g.edge(e).dst;
            if (!cone[w]) continue;
            if (color[w] == 1) return true;
            if (color[w] == 0 && cyclic(w)) return true;
        }
        color[u] = 2;
        return false;
    };
    for (int u = 0; u < n; ++u)
        if (cone[u] && color[u] == 0 && cyclic(u)) return std::nullopt;

    std::vector<int> memo(n, -1);
    std::function<int(int)> depth_from = [&](int u) -> int {
        if (u == v) return 0;
        if (memo[u] >= 0) return memo[u];
        int best = 0;
        for (int e : g.out_edges(u)) {
            int w = g.edge(e).dst;
            if (cone[w]) best = std::max(best, 1 + depth_from(w));
        }
        return memo[u] = best;
    };
    int best = 0;
    for (int u = 0; u < n; ++u)
        if (cone[u]) best = std::max(best, depth_from(u));
    return best;
}

AlgebraElement degree_commutator(const AlgebraElement& a) {
    AlgebraElement out = AlgebraElement::zero(a.graph());
    for (const auto& [t, c] : a.terms()) {
        int d = term_degree(t);
        if (d != 0) out.add_term(t, c * GaussianRational(d));
    }
    return out;
}

GaussianRational path_state(const TruncatedModule& m, const OperatorMatrix& T,
                            const Path& mu) {
    const Graph& g = m.graph();
    if (!is_valid_path(g, mu)) throw std::invalid_argument("not a path of this graph");
    auto lift = [&](const AlgebraElement& e) {
        auto c = m.expand(e);
        if (!c) throw std::domain_error("vector leaks past the window");
        for (int j = 0; j < m.basis_size(); ++j)
            if (!(*c)[j].is_zero() && !T.col_exact[j])
                throw std::domain_error("operator is untrusted on the vector's support");
        return *c;
    };
    auto xs = lift(AlgebraElement::path_isometry(g, mu));
    GaussianRational acc = gram_pair(m, xs, mat_apply(T, xs));
    if (mu.length() > 0) {
        auto xa = lift(AlgebraElement::path_isometry(g, mu).adjoint());
        long cnt = static_cast<long>(paths_into(g, path_range(g, mu), mu.length()).size());
        acc += GaussianRational(Rational(1, cnt)) * gram_pair(m, xa, mat_apply(T, xa));
    }
    return acc;
}

GaussianRational endo_trace_rank_one(const GraphTrace& tr, const AlgebraElement& x,
                                     const AlgebraElement& y) {
    return tau(tr, y.adjoint() * x);
}

GaussianRational endo_trace_rank_one_sum(const GraphTrace& tr, const AlgebraElement& x,
                                         const AlgebraElement& y) {
    const Graph& g = *tr.graph;
    if (&x.graph() != &g || &y.graph() != &g)
        throw std::invalid_argument("mixed graphs");
    // paths longer than anything in y meet the degree-zero compression in 0,
    // so the formally infinite sum of states is this finite one
    GaussianRational acc;
    for (const Path& mu : all_paths_up_to(g, max_path_length(y))) {
        AlgebraElement smu = AlgebraElement::path_isometry(g, mu);
        acc += tau(tr, smu.adjoint() * (x * degree_part(y.adjoint() * smu, 0)));
        if (mu.length() > 0) {
            AlgebraElement sadj = smu.adjoint();
            long cnt =
                static_cast<long>(paths_into(g, path_range(g, mu), mu.length()).size());
            acc += GaussianRational(Rational(1, cnt)) *
                   tau(tr, smu * (x * degree_part(y.adjoint() * sadj, 0)));
        }
    }
    return acc;
}

Rational endo_trace_vertex_block(const Graph& g, const GraphTrace& tr, int v, int k) {
    if (v < 0 || v >= g.vertex_count()) throw std::invalid_argument("bad vertex");
    if (k <= 0) {
        std::optional<int> bd = backward_depth(g, v);
        if (bd && *bd < -k)
            throw std::domain_error("no paths of length " + std::to_string(-k) +
                                    " into " + g.vertex_id(v));
        return tr.at(v);
    }
    std::vector<Rational> mass(g.vertex_count(), Rational(0));
    mass[v] = 1;
    for (int step = 0; step < k; ++step) {
        std::vector<Rational> nxt(g.vertex_count(), Rational(0));
        for (int u = 0; u < g.vertex_count(); ++u) {
            if (mass[u] == 0) continue;
            for (int e : g.out_edges(u)) nxt[g.edge(e).dst] += mass[u];
        }
        mass = std::move(nxt);
    }
    Rational acc(0);
    for (int u = 0; u < g.vertex_count(); ++u) acc += mass[u] * tr.at(u);
    return acc;
}

namespace {

double to_double(const Rational& r) { return mpq_get_d(r.get_mpq_t()); }

// forward mass sequence up to one step past the stabilization bound |V|
std::vector<Rational> forward_masses(const Graph& g, const GraphTrace& tr, int v) {
    const int n = g.vertex_count();
    std::vector<Rational> out;
    std::vector<Rational> mass(n, Rational(0));
    mass[v] = 1;
    for (int k = 0; k <= n + 1; ++k) {
        Rational acc(0);
        for (int u = 0; u < n; ++u) acc += mass[u] * tr.at(u);
        out.push_back(acc);
        std::vector<Rational> nxt(n, Rational(0));
        for (int u = 0; u < n; ++u) {
            if (mass[u] == 0) continue;
            for (int e : g.out_edges(u)) nxt[g.edge(e).dst] += mass[u];
        }
        mass = std::move(nxt);
    }
    return out;
}

int stabilization_point(const std::vector<Rational>& masses) {
    // non-increasing and constant from |V| on; anything else is a bug
    const int last = static_cast<int>(masses.size()) - 1;
    if (masses[last] != masses[last - 1])
        throw std::logic_error("forward mass failed to stabilize");
    int s = last;
    while (s > 0 && masses[s - 1] == masses[last]) --s;
    return s;
}

} // namespace

DixmierValue dixmier_value(const Graph& g, const GraphTrace& tr, int v, long N) {
    if (!check_graph_trace(tr)) throw std::invalid_argument("needs a valid graph trace");
    if (N < 1) throw std::invalid_argument("partial sum needs N >= 1");
    std::vector<Rational> masses = forward_masses(g, tr, v);
    int stab = stabilization_point(masses);

    DixmierValue out;
    out.c_plus = masses.back();
    out.closed_form = tr.at(v) + out.c_plus;
    out.stabilization_index = stab;
    out.forward_mass.assign(masses.begin(), masses.begin() + stab + 1);

    std::vector<double> md(masses.size());
    for (size_t i = 0; i < masses.size(); ++i) md[i] = to_double(masses[i]);
    const double cplus = md.back();
    const double gv = to_double(tr.at(v));
    std::optional<int> bd = backward_depth(g, v);

    double sum = md[0];
    for (long j = 1; j <= N; ++j) {
        double w = 1.0 / std::sqrt(1.0 + static_cast<double>(j) * j);
        double pos = j < static_cast<long>(md.size()) ? md[j] : cplus;
        double neg = (!bd || j <= *bd) ? gv : 0.0;
        sum += (pos + neg) * w;
    }
    out.partial = sum / std::log(2.0 * static_cast<double>(N) + 1.0);
    return out;
}

ZetaResidue zeta_residue(const Graph& g, const GraphTrace& tr, int v) {
    if (!check_graph_trace(tr)) throw std::invalid_argument("needs a valid graph trace");
    std::vector<Rational> masses = forward_masses(g, tr, v);
    ZetaResidue out;
    out.stabilization_index = stabilization_point(masses);
    out.c_plus = masses.back();
    out.value = (tr.at(v) + out.c_plus) / 2;
    std::ostringstream d;
    d << "per-degree mass is " << rational_str(out.c_plus) << " from k = "
      << out.stabilization_index << " on and " << rational_str(tr.at(v))
      << " on the negative side; the two constant tails each carry residue 1/2 "
         "of their constant, the finite head is entire and contributes nothing";
    out.derivation = d.str();
    return out;
}

LoopUnitary loop_unitary(const Graph& g, const Cycle& loop) {
    if (loop.edges.empty()) throw std::invalid_argument("empty loop");
    if (cycle_has_exit(g, loop))
        throw std::invalid_argument("loop has an exit; no unitary over it");
    LoopUnitary u{loop, cycle_vertices(g, loop), AlgebraElement::one(g)};
    for (size_t i = 0; i < loop.edges.size(); ++i) {
        int e = loop.edges[i];
        u.element = u.element +
                    AlgebraElement::path_isometry(g, Path{g.edge(e).src, {e}}) -
                    AlgebraElement::vertex_projection(g, u.vertices[i]);
    }
    return u;
}

Rational spectral_flow(const LoopUnitary& u, const GraphTrace& tr) {
    const Graph& g = u.element.graph();
    if (!check_graph_trace(tr) || !is_faithful(tr))
        throw std::invalid_argument("spectral flow needs a faithful graph trace");
    AlgebraElement w = u.element * degree_commutator(u.element.adjoint());
    AlgebraElement sum_p = AlgebraElement::zero(g);
    for (int v : u.vertices) sum_p = sum_p + AlgebraElement::vertex_projection(g, v);
    if (!relation_zero(tr, w + sum_p))
        throw std::logic_error("u [deg, u*] did not collapse to -sum of projections");
    Rational sf(0);
    for (int v : u.vertices) sf -= zeta_residue(g, tr, v).value;
    return sf;
}

namespace {

Rational g_norm_sq(const GaussianRational& z) { return z.re * z.re + z.im * z.im; }

GaussianRational g_div(const GaussianRational& a, const GaussianRational& b) {
    Rational nn = g_norm_sq(b);
    GaussianRational num = a * b.conj();
    return {num.re / nn, num.im / nn};
}

// row-reduced span over the Gaussian rationals, for exact rank, membership,
// and independence tests
struct Span {
    std::vector<std::vector<GaussianRational>> rows;
    std::vector<int> leads;

    bool reduce(std::vector<GaussianRational>& v) const {
        for (size_t r = 0; r < rows.size(); ++r) {
            GaussianRational c = v[leads[r]];
            if (c.is_zero()) continue;
            for (size_t j = 0; j < v.size(); ++j) v[j] -= c * rows[r][j];
        }
        return std::all_of(v.begin(), v.end(),
                           [](const GaussianRational& z) { return z.is_zero(); });
    }

    bool contains(const std::vector<GaussianRational>& v) const {
        std::vector<GaussianRational> w = v;
        return reduce(w);
    }

    // returns false when v was already in the span
    bool add(std::vector<GaussianRational> v) {
        if (reduce(v)) return false;
        int lead = 0;
        while (v[lead].is_zero()) ++lead;
        GaussianRational inv = g_div(GaussianRational(1), v[lead]);
        for (auto& z : v) z = inv * z;
        for (size_t r = 0; r < rows.size(); ++r) {
            GaussianRational c = rows[r][lead];
            if (c.is_zero()) continue;
            for (size_t j = 0; j < v.size(); ++j) rows[r][j] -= c * v[j];
        }
        rows.push_back(std::move(v));
        leads.push_back(lead);
        return true;
    }
};

std::vector<GaussianRational> unit_vector(int n, int i) {
    std::vector<GaussianRational> v(n);
    v[i] = GaussianRational(1);
    return v;
}

} // namespace

ToeplitzReport toeplitz_index(const TruncatedModule& m, const AlgebraElement& u,
                              const std::vector<int>& loop_vertices) {
    if (m.depth() < 3)
        throw std::invalid_argument("compression needs window depth at least 3");
    const Graph& g = m.graph();
    const int n = m.basis_size();
    const int L = m.depth();
    std::set<int> on_loop(loop_vertices.begin(), loop_vertices.end());

    ToeplitzReport rep;
    Span range;
    int independent = 0, columns = 0;
    for (int i = 0; i < n; ++i) {
        int d = m.degree_of(i);
        if (d < 1 || d > L - 1) continue;
        auto c = m.expand(u * m.element_of(i));
        if (!c) {
            ++rep.excluded_columns;
            continue;
        }
        for (int j = 0; j < n; ++j)
            if (m.degree_of(j) < 1) (*c)[j] = GaussianRational();  // compress
        ++columns;
        if (range.add(*c)) ++independent;
    }
    rep.domain_size = columns;
    rep.kernel_dim = columns - independent;

    bool loop_cut = true, short_covered = true;
    Span extended = range;  // range plus the loop-started block-1 vectors
    for (int i = 0; i < n; ++i) {
        int d = m.degree_of(i);
        if (d < 1 || d > L - 1) continue;
        bool in = range.contains(unit_vector(n, i));
        if (d >= 2) {
            ++rep.interior_total;
            if (in) ++rep.interior_covered;
            continue;
        }
        ++rep.block1_dim;
        if (in) ++rep.block1_in_range;
        const Term& t = m.basis_term(i);
        if (on_loop.count(path_source(g, t.mu))) {
            // the structural cokernel: must stay clear of the range jointly
            if (in || !extended.add(unit_vector(n, i))) loop_cut = false;
        } else if (std::max(t.mu.length(), t.nu.length()) <= L - 1 && !in) {
            short_covered = false;
        }
    }
    rep.defect_dim = rep.block1_dim - rep.block1_in_range;
    rep.structure_ok = loop_cut && short_covered &&
                       rep.interior_covered == rep.interior_total;

    rep.tau_coker = 0;
    for (int v : loop_vertices)
        rep.tau_coker += endo_trace_vertex_block(g, m.trace(), v, 1);

    std::ostringstream d;
    d << "kernel " << rep.kernel_dim << "; degree-1 defect " << rep.defect_dim << " ("
      << loop_vertices.size() << " spanning the cokernel, "
      << rep.defect_dim - static_cast<int>(loop_vertices.size())
      << " window-boundary artifacts whose preimages fell outside); interior coverage "
      << rep.interior_covered << "/" << rep.interior_total;
    rep.description = d.str();
    return rep;
}

KTheoryRanks k_theory_ranks(const Graph& g) {
    GraphReport rep = graph_report(g);
    for (bool ex : rep.cycle_exit)
        if (ex)
            throw std::domain_error(
                "a cycle has an exit; the end/cycle rank count does not apply");
    return {static_cast<int>(rep.ends.size()), static_cast<int>(rep.cycles.size())};
}

IndexReport index_report(const TruncatedModule& m, const LoopUnitary& u) {
    const GraphTrace& tr = m.trace();
    IndexReport r;
    Rational closed(0), residues(0);
    for (int v : u.vertices) {
        closed -= tr.at(v);
        residues += zeta_residue(m.graph(), tr, v).value;
    }
    r.spectral_flow_closed = closed;
    r.flow_from_residues = spectral_flow(u, tr);
    r.residue_value = residues;
    r.toeplitz = toeplitz_index(m, u.element, u.vertices);
    r.agreement = closed == r.flow_from_residues && closed == -residues &&
                  r.toeplitz.kernel_dim == 0 && closed == -r.toeplitz.tau_coker &&
                  r.toeplitz.structure_ok;
    return r;
}

bool direct_sum_additivity(int n1, int n2, int depth) {
    if (n1 < 1 || n2 < 0 || depth < 3) throw std::invalid_argument("bad parameters");
    Graph g;
    auto add_loop = [&g](const std::string& p, int n) {
        for (int i = 1; i <= n; ++i) g.add_vertex(p + std::to_string(i));
        for (int i = 1; i <= n; ++i)
            g.add_edge(p + "e" + std::to_string(i), p + std::to_string(i),
                       p + std::to_string(i % n + 1));
    };
    add_loop("a", n1);
    add_loop("b", n2 == 0 ? 1 : n2);

    std::vector<Cycle> cycles = simple_cycles(g);
    if (cycles.size() != 2) throw std::logic_error("expected exactly two loops");
    int first_vertex = g.vertex_index("a1");
    const Cycle& ca =
        cycle_vertices(g, cycles[0])[0] == first_vertex ? cycles[0] : cycles[1];
    const Cycle& cb = &ca == &cycles[0] ? cycles[1] : cycles[0];

    TraceSolution sol = solve_graph_traces(g);
    if (!sol.witness) throw std::logic_error("two exitless loops must carry a witness");
    const GraphTrace tr{&g, sol.witness->values};
    TruncatedModule m = build_module(g, tr, depth);

    LoopUnitary ua = loop_unitary(g, ca);
    AlgebraElement ub = AlgebraElement::one(g);
    std::vector<int> verts_b;
    if (n2 > 0) {
        LoopUnitary wb = loop_unitary(g, cb);
        ub = wb.element;
        verts_b = wb.vertices;
    }
    std::vector<int> all_verts = ua.vertices;
    all_verts.insert(all_verts.end(), verts_b.begin(), verts_b.end());

    ToeplitzReport ta = toeplitz_index(m, ua.element, ua.vertices);
    ToeplitzReport tb = toeplitz_index(m, ub, verts_b);
    ToeplitzReport tsum = toeplitz_index(m, ua.element * ub, all_verts);

    Rational closed(0);
    for (int v : all_verts) closed -= tr.at(v);
    return ta.structure_ok && tb.structure_ok && tsum.structure_ok &&
           ta.kernel_dim == 0 && tb.kernel_dim == 0 && tsum.kernel_dim == 0 &&
           tsum.tau_coker == ta.tau_coker + tb.tau_coker &&
           closed == -tsum.tau_coker;
}

} // namespace graphck
