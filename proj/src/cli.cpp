#include "graphck/cli.hpp"

#include "graphck/exprparse.hpp"
#include "graphck/index.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <sstream>

namespace graphck {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kToolName = "graphck";
constexpr const char* kToolVersion = "0.1.0";
constexpr int kSchemaVersion = 1;

struct Options {
    std::string command;
    std::string graph_spec;
    std::string trace_file;
    bool solve = false;
    int depth = 4;
    bool json = false;
    long N = 100000;
    std::string vertex;
    std::string expr;
    std::string route = "all";
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string read_file_or(const std::string& path) {
    try {
        return read_file(path);
    } catch (const std::exception&) {
        return "@unreadable";
    }
}

std::string hex64(uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string obstruction_json_tag(Obstruction::Kind k) { return obstruction_tag(k); }

ordered_json obstructions_json(const std::vector<Obstruction>& obs) {
    ordered_json arr = ordered_json::array();
    for (const Obstruction& o : obs)
        arr.push_back({{"kind", obstruction_json_tag(o.kind)}, {"detail", o.detail}});
    return arr;
}

ordered_json trace_values_json(const GraphTrace& tr) {
    ordered_json vals = ordered_json::object();
    for (int v = 0; v < tr.graph->vertex_count(); ++v)
        vals[tr.graph->vertex_id(v)] = rational_str(tr.at(v));
    return vals;
}

std::string obstructions_text(const std::vector<Obstruction>& obs) {
    std::string s;
    for (const Obstruction& o : obs)
        s += "  obstruction [" + obstruction_json_tag(o.kind) + "]: " + o.detail + "\n";
    return s;
}

// either a usable trace or a ready-to-print failure
struct TraceOutcome {
    std::optional<GraphTrace> tr;
    ordered_json failure;
    std::string failure_text;
};

TraceOutcome acquire_trace(const Graph& g, const Options& opt) {
    TraceOutcome out;
    if (!opt.trace_file.empty()) {
        GraphTrace tr = parse_trace(g, read_file(opt.trace_file));
        std::vector<TraceViolation> viols;
        if (!check_graph_trace(tr, &viols)) {
            out.failure["error"] = "trace file fails the flow equations";
            ordered_json arr = ordered_json::array();
            out.failure_text = "trace file fails the flow equations\n";
            for (const TraceViolation& v : viols) {
                arr.push_back(v.detail);
                out.failure_text += "  " + v.detail + "\n";
            }
            out.failure["violations"] = arr;
            return out;
        }
        out.tr = std::move(tr);
        return out;
    }
    TraceSolution sol = solve_graph_traces(g);
    if (sol.status != TraceSolution::FaithfulWitness) {
        out.failure["error"] = "no faithful trace on this graph";
        out.failure["obstructions"] = obstructions_json(sol.obstructions);
        out.failure_text =
            "no faithful trace on this graph\n" + obstructions_text(sol.obstructions);
        return out;
    }
    out.tr = std::move(*sol.witness);
    return out;
}

ordered_json toeplitz_json(const ToeplitzReport& t) {
    return {{"domain_size", t.domain_size},
            {"excluded_columns", t.excluded_columns},
            {"kernel_dim", t.kernel_dim},
            {"interior_covered", t.interior_covered},
            {"interior_total", t.interior_total},
            {"block1_dim", t.block1_dim},
            {"block1_in_range", t.block1_in_range},
            {"defect_dim", t.defect_dim},
            {"tau_coker", rational_str(t.tau_coker)},
            {"structure_ok", t.structure_ok},
            {"description", t.description}};
}

struct CommandOutput {
    ordered_json payload;
    std::string text;
    int exit_code = 0;
};

CommandOutput cmd_validate(const Graph& g) {
    CommandOutput out;
    GraphReport rep = graph_report(g);
    auto ids = [&](const std::vector<int>& vs) {
        ordered_json a = ordered_json::array();
        for (int v : vs) a.push_back(g.vertex_id(v));
        return a;
    };
    out.payload["vertices"] = g.vertex_count();
    out.payload["edges"] = g.edge_count();
    out.payload["sinks"] = ids(rep.sinks);
    out.payload["sources"] = ids(rep.sources);
    ordered_json cyc = ordered_json::array();
    for (size_t i = 0; i < rep.cycles.size(); ++i) {
        ordered_json edges = ordered_json::array();
        for (int e : rep.cycles[i].edges) edges.push_back(g.edge(e).id);
        cyc.push_back({{"edges", edges}, {"has_exit", rep.cycle_exit[i]}});
    }
    out.payload["cycles"] = cyc;
    ordered_json ends = ordered_json::array();
    for (const End& e : rep.ends)
        ends.push_back({{"kind", e.sink ? "sink" : "loop"}, {"vertices", ids(e.vertices)}});
    out.payload["ends"] = ends;

    std::ostringstream t;
    t << "graph: " << g.vertex_count() << " vertices, " << g.edge_count() << " edges\n";
    t << "sinks: " << rep.sinks.size() << ", sources: " << rep.sources.size() << "\n";
    t << "cycles: " << rep.cycles.size() << " (";
    int exits = 0;
    for (bool b : rep.cycle_exit) exits += b ? 1 : 0;
    t << exits << " with an exit), ends: " << rep.ends.size() << "\n";
    out.text = t.str();
    return out;
}

CommandOutput cmd_traces(const Graph& g, const Options& opt) {
    CommandOutput out;
    if (!opt.trace_file.empty()) {
        GraphTrace tr = parse_trace(g, read_file(opt.trace_file));
        std::vector<TraceViolation> viols;
        bool valid = check_graph_trace(tr, &viols);
        bool faithful = valid && is_faithful(tr);
        out.payload["valid"] = valid;
        out.payload["faithful"] = faithful;
        ordered_json arr = ordered_json::array();
        for (const TraceViolation& v : viols) arr.push_back(v.detail);
        out.payload["violations"] = arr;
        out.payload["values"] = trace_values_json(tr);
        std::ostringstream t;
        t << (valid ? (faithful ? "valid faithful graph trace"
                                : "valid graph trace, not faithful")
                    : "not a graph trace")
          << "\n";
        for (const TraceViolation& v : viols) t << "  " << v.detail << "\n";
        out.text = t.str();
        out.exit_code = valid ? 0 : 1;
        return out;
    }
    TraceSolution sol = solve_graph_traces(g);
    const char* status = sol.status == TraceSolution::FaithfulWitness ? "faithful-witness"
                         : sol.status == TraceSolution::OnlyDegenerate ? "only-degenerate"
                                                                       : "none";
    out.payload["status"] = status;
    out.payload["solution_dimension"] = sol.basis.size();
    ordered_json basis = ordered_json::array();
    for (const auto& vec : sol.basis) {
        ordered_json row = ordered_json::object();
        for (int v = 0; v < g.vertex_count(); ++v)
            row[g.vertex_id(v)] = rational_str(vec[v]);
        basis.push_back(row);
    }
    out.payload["basis"] = basis;
    if (sol.witness) out.payload["witness"] = trace_values_json(*sol.witness);
    out.payload["obstructions"] = obstructions_json(sol.obstructions);

    std::ostringstream t;
    t << "status: " << status << " (solution space dimension " << sol.basis.size()
      << ")\n";
    if (sol.witness) t << "witness:\n" << trace_to_text(*sol.witness);
    t << obstructions_text(sol.obstructions);
    out.text = t.str();
    out.exit_code = sol.witness ? 0 : 1;
    return out;
}

CommandOutput cmd_eval(const Graph& g, const Options& opt) {
    CommandOutput out;
    if (opt.expr.empty()) throw CLI::ValidationError("--expr", "eval needs --expr");
    AlgebraElement a = parse_element(g, opt.expr);
    out.payload["expr"] = opt.expr;
    out.payload["canonical"] = element_str(a);
    out.payload["unit"] = gaussian_str(a.unit());
    out.payload["terms"] = a.term_count();
    auto deg = gauge_degree(a);
    if (deg)
        out.payload["degree"] = *deg;
    else
        out.payload["degree"] = nullptr;

    std::ostringstream t;
    t << element_str(a) << "\n";
    TraceOutcome tr;
    if (!opt.trace_file.empty() || opt.solve) {
        tr = acquire_trace(g, opt);
        if (!tr.tr) {
            out.payload = std::move(tr.failure);
            out.text = tr.failure_text;
            out.exit_code = 1;
            return out;
        }
        if (a.unit().is_zero()) {
            GaussianRational tv = tau(*tr.tr, a);
            GaussianRational nn = tau(*tr.tr, a.adjoint() * a);
            out.payload["trace"] = gaussian_str(tv);
            out.payload["norm_sq"] = rational_str(nn.re);
            t << "trace: " << gaussian_str(tv) << "\n";
            t << "norm_sq: " << rational_str(nn.re) << "\n";
        } else {
            out.payload["trace"] = nullptr;
            t << "trace: undefined on the adjoined unit\n";
        }
    }
    out.text = t.str();
    return out;
}

CommandOutput cmd_module(const Graph& g, const Options& opt) {
    CommandOutput out;
    TraceOutcome tro = acquire_trace(g, opt);
    if (!tro.tr) {
        out.payload = std::move(tro.failure);
        out.text = tro.failure_text;
        out.exit_code = 1;
        return out;
    }
    TruncatedModule m = build_module(g, *tro.tr, opt.depth);
    out.payload["depth"] = m.depth();
    out.payload["raw_terms"] = m.raw_size();
    out.payload["basis_size"] = m.basis_size();
    ordered_json blocks = ordered_json::array();
    for (const TruncatedModule::Block& blk : m.blocks()) {
        ordered_json o;
        o["degree"] = blk.degree;
        o["dimension"] = blk.members.size();
        ordered_json terms = ordered_json::array();
        for (int i : blk.members) terms.push_back(element_str(m.element_of(i)));
        o["basis"] = terms;
        ordered_json gram = ordered_json::array();
        for (const auto& row : blk.gram) {
            ordered_json r = ordered_json::array();
            for (const Rational& x : row) r.push_back(rational_str(x));
            gram.push_back(r);
        }
        o["gram"] = gram;
        blocks.push_back(o);
    }
    out.payload["blocks"] = blocks;

    std::ostringstream t;
    t << "depth " << m.depth() << ": " << m.raw_size() << " spanning terms, basis "
      << m.basis_size() << "\n";
    for (const TruncatedModule::Block& blk : m.blocks())
        t << "  degree " << blk.degree << ": " << blk.members.size() << "\n";
    out.text = t.str();
    return out;
}

CommandOutput cmd_pair(const Graph& g, const Options& opt) {
    CommandOutput out;
    TraceOutcome tro = acquire_trace(g, opt);
    if (!tro.tr) {
        out.payload = std::move(tro.failure);
        out.text = tro.failure_text;
        out.exit_code = 1;
        return out;
    }
    const GraphTrace& tr = *tro.tr;
    std::vector<Cycle> loops;
    for (const Cycle& c : simple_cycles(g))
        if (!cycle_has_exit(g, c)) loops.push_back(c);
    if (loops.empty())
        throw std::domain_error("no exitless loop to pair with");

    const bool want_toeplitz = opt.route == "toeplitz" || opt.route == "all";
    const bool want_residue = opt.route == "residue" || opt.route == "all";
    const bool want_closed = opt.route == "closed" || opt.route == "all";
    if (!want_toeplitz && !want_residue && !want_closed)
        throw CLI::ValidationError("--route", "route must be residue, closed, toeplitz or all");

    std::optional<TruncatedModule> m;
    if (want_toeplitz) m.emplace(build_module(g, tr, opt.depth));

    ordered_json loops_json = ordered_json::array();
    std::ostringstream t;
    bool all_agree = true;
    for (const Cycle& c : loops) {
        LoopUnitary u = loop_unitary(g, c);
        ordered_json lj;
        ordered_json edges = ordered_json::array();
        for (int e : c.edges) edges.push_back(g.edge(e).id);
        lj["edges"] = edges;
        Rational closed(0);
        for (int v : u.vertices) closed -= tr.at(v);
        lj["spectral_flow"] = rational_str(closed);
        t << "loop [";
        for (size_t i = 0; i < c.edges.size(); ++i)
            t << (i ? " " : "") << g.edge(c.edges[i]).id;
        t << "]: spectral flow " << rational_str(closed) << "\n";
        if (want_closed) lj["spectral_flow_closed"] = rational_str(closed);
        if (want_residue) {
            Rational res(0);
            for (int v : u.vertices) res += zeta_residue(g, tr, v).value;
            lj["residue_value"] = rational_str(res);
            lj["flow_from_residues"] = rational_str(spectral_flow(u, tr));
            t << "  residue route: " << rational_str(-res) << "\n";
        }
        if (want_toeplitz) {
            ToeplitzReport tp = toeplitz_index(*m, u.element, u.vertices);
            lj["toeplitz"] = toeplitz_json(tp);
            t << "  compression route: " << rational_str(-tp.tau_coker) << " ("
              << tp.description << ")\n";
        }
        if (opt.route == "all") {
            IndexReport rep = index_report(*m, u);
            lj["agreement"] = rep.agreement;
            all_agree = all_agree && rep.agreement;
            t << "  routes agree: " << (rep.agreement ? "yes" : "NO") << "\n";
        }
        loops_json.push_back(lj);
    }
    out.payload["route"] = opt.route;
    out.payload["loops"] = loops_json;
    KTheoryRanks kt = k_theory_ranks(g);
    out.payload["ktheory"] = {{"k0", kt.k0}, {"k1", kt.k1}};
    t << "k-theory ranks: (" << kt.k0 << ", " << kt.k1 << ")\n";
    out.text = t.str();
    out.exit_code = (opt.route == "all" && !all_agree) ? 1 : 0;
    return out;
}

CommandOutput cmd_dixmier(const Graph& g, const Options& opt) {
    CommandOutput out;
    if (opt.vertex.empty()) throw CLI::ValidationError("--vertex", "dixmier needs --vertex");
    int v = g.vertex_index(opt.vertex);
    if (v < 0) throw std::domain_error("unknown vertex: " + opt.vertex);
    TraceOutcome tro = acquire_trace(g, opt);
    if (!tro.tr) {
        out.payload = std::move(tro.failure);
        out.text = tro.failure_text;
        out.exit_code = 1;
        return out;
    }
    DixmierValue d = dixmier_value(g, *tro.tr, v, opt.N);
    ZetaResidue z = zeta_residue(g, *tro.tr, v);
    out.payload["vertex"] = opt.vertex;
    out.payload["N"] = opt.N;
    out.payload["closed_form"] = rational_str(d.closed_form);
    out.payload["c_plus"] = rational_str(d.c_plus);
    out.payload["stabilization_index"] = d.stabilization_index;
    ordered_json mass = ordered_json::array();
    for (const Rational& r : d.forward_mass) mass.push_back(rational_str(r));
    out.payload["forward_mass"] = mass;
    out.payload["partial"] = d.partial;
    out.payload["zeta_residue"] = rational_str(z.value);
    out.payload["derivation"] = z.derivation;

    std::ostringstream t;
    t << "closed form: " << rational_str(d.closed_form) << "\n";
    t << "partial F(" << opt.N << "): " << d.partial << "\n";
    t << "zeta residue: " << rational_str(z.value) << "\n";
    out.text = t.str();
    return out;
}

CommandOutput cmd_ktheory(const Graph& g) {
    CommandOutput out;
    KTheoryRanks kt = k_theory_ranks(g);
    out.payload["k0"] = kt.k0;
    out.payload["k1"] = kt.k1;
    std::ostringstream t;
    t << "k0 rank: " << kt.k0 << "\nk1 rank: " << kt.k1 << "\n";
    out.text = t.str();
    return out;
}

} // namespace

CliResult run_cli(const std::vector<std::string>& args) {
    Options opt;
    CLI::App app{"exact workbench for graph algebras: traces, modules, index pairings"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* c) {
        c->add_option("--graph", opt.graph_spec,
                      "graph file, or @loop:n / @fryingpan:n,t")
            ->required();
        CLI::Option* tr = c->add_option("--trace", opt.trace_file, "trace file");
        CLI::Option* so = c->add_flag("--solve", opt.solve, "use the canonical solved trace");
        tr->excludes(so);
        so->excludes(tr);
        c->add_option("--depth", opt.depth, "window depth (default 4)")
            ->check(CLI::PositiveNumber);
        c->add_flag("--json", opt.json, "machine-readable output");
    };

    CLI::App* validate = app.add_subcommand("validate", "parse and summarize a graph");
    CLI::App* traces = app.add_subcommand("traces", "check or solve the trace equations");
    CLI::App* eval = app.add_subcommand("eval", "evaluate an algebra expression");
    CLI::App* module = app.add_subcommand("module", "build the truncated module");
    CLI::App* pair = app.add_subcommand("pair", "index pairing over every exitless loop");
    CLI::App* dixmier = app.add_subcommand("dixmier", "Dixmier value at a vertex");
    CLI::App* ktheory = app.add_subcommand("ktheory", "end and loop ranks");
    for (CLI::App* c : {validate, traces, eval, module, pair, dixmier, ktheory})
        add_common(c);
    eval->add_option("--expr", opt.expr, "expression, e.g. 'S(e1) * adj(S(e1))'");
    pair->add_option("--route", opt.route, "residue | closed | toeplitz | all");
    dixmier->add_option("--vertex", opt.vertex, "vertex id");
    dixmier->add_option("--N", opt.N, "partial-sum cutoff (default 100000)")
        ->check(CLI::PositiveNumber);

    std::vector<const char*> argv;
    argv.push_back(kToolName);
    for (const std::string& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        std::ostringstream help;
        help << app.help();
        return {0, help.str()};
    } catch (const CLI::ParseError& e) {
        return {2, std::string("usage error: ") + e.what() + "\n"};
    }

    for (CLI::App* c : {validate, traces, eval, module, pair, dixmier, ktheory})
        if (app.got_subcommand(c)) opt.command = c->get_name();

    std::string graph_text;
    CommandOutput cmd;
    bool failed = false;
    try {
        Graph g = is_generator_spec(opt.graph_spec)
                      ? make_generator(opt.graph_spec)
                      : parse_graph(read_file(opt.graph_spec));
        graph_text = graph_to_text(g);

        if (opt.command == "traces" && opt.trace_file.empty() && !opt.solve)
            throw CLI::ValidationError("traces", "needs --trace or --solve");
        for (const char* needs : {"module", "pair", "dixmier"})
            if (opt.command == needs && opt.trace_file.empty() && !opt.solve)
                throw CLI::ValidationError(needs, "needs --trace or --solve");

        if (opt.command == "validate")
            cmd = cmd_validate(g);
        else if (opt.command == "traces")
            cmd = cmd_traces(g, opt);
        else if (opt.command == "eval")
            cmd = cmd_eval(g, opt);
        else if (opt.command == "module")
            cmd = cmd_module(g, opt);
        else if (opt.command == "pair")
            cmd = cmd_pair(g, opt);
        else if (opt.command == "dixmier")
            cmd = cmd_dixmier(g, opt);
        else
            cmd = cmd_ktheory(g);
    } catch (const CLI::ParseError& e) {
        return {2, std::string("usage error: ") + e.what() + "\n"};
    } catch (const std::exception& e) {
        cmd.payload = ordered_json{{"error", e.what()}};
        cmd.text = std::string("error: ") + e.what() + "\n";
        cmd.exit_code = 1;
        failed = true;
    }
    (void)failed;

    if (!opt.json) return {cmd.exit_code, cmd.text};

    std::string tracepart = !opt.trace_file.empty() ? read_file_or(opt.trace_file)
                            : opt.solve             ? std::string("@solve")
                                                    : std::string("@none");
    std::ostringstream hash_src;
    hash_src << opt.command << '\0' << graph_text << '\0' << tracepart << '\0'
             << opt.depth << '\0' << opt.N << '\0' << opt.vertex << '\0' << opt.expr
             << '\0' << opt.route;
    ordered_json envelope;
    envelope["schema_version"] = kSchemaVersion;
    envelope["tool"] = kToolName;
    envelope["version"] = kToolVersion;
    envelope["command"] = opt.command;
    envelope["input_hash"] = hex64(fnv1a64(hash_src.str()));
    envelope["report"] = cmd.payload;
    return {cmd.exit_code, envelope.dump(2) + "\n"};
}

} // namespace graphck
