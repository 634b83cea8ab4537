#pragma once

#include "graphck/module.hpp"

#include <optional>
#include <string>
#include <vector>

namespace graphck {

// largest k for which a length-k path into v exists; nullopt when every
// length occurs, which happens exactly when a cycle sits upstream of v
std::optional<int> backward_depth(const Graph& g, int v);

// [deg, a]: scales each term by its gauge degree (the unit drops out)
AlgebraElement degree_commutator(const AlgebraElement& a);

// vector state of T at the path mu: <S_mu, T S_mu> plus, for |mu| > 0,
// <S_mu^*, T S_mu^*> normalized by the number of length-|mu| paths into
// r(mu); throws when a needed column of T is untrusted or a vector leaks
GaussianRational path_state(const TruncatedModule& m, const OperatorMatrix& T,
                            const Path& mu);

// trace of the rank-one endomorphism z -> x (degree-zero part of y^* z):
// closed form tau(y^* x), and the definitional route summing vector states
// over every path short enough to contribute (all |mu| <= longest path of y)
GaussianRational endo_trace_rank_one(const GraphTrace& tr, const AlgebraElement& x,
                                     const AlgebraElement& y);
GaussianRational endo_trace_rank_one_sum(const GraphTrace& tr, const AlgebraElement& x,
                                         const AlgebraElement& y);

// mass the endomorphism trace assigns to p_v on degree block k: g(v) for
// k <= 0 (requires length-|k| paths into v to exist), the g-weighted count
// of length-k paths out of v for k > 0 (always <= g(v))
Rational endo_trace_vertex_block(const Graph& g, const GraphTrace& tr, int v, int k);

struct DixmierValue {
    Rational closed_form;  // g(v) plus the stabilized forward mass
    Rational c_plus;       // forward mass at large k
    int stabilization_index = 0;
    std::vector<Rational> forward_mass;  // k = 0 .. stabilization_index
    double partial = 0;                  // F(N), the logarithmic partial mean
};

// logarithmic-mean evaluation of p_v (1 + deg^2)^{-1/2}. The forward mass
// sequence is non-increasing and constant from k = |V| on (long routes to a
// positively weighted sink would force a cycle with an exit, which a valid
// trace kills), so the closed form is exact. The partial sum F(N) uses the
// honest truncated masses on both sides; it converges to the closed form
// only where the backward path supply never runs dry.
DixmierValue dixmier_value(const Graph& g, const GraphTrace& tr, int v, long N);

struct ZetaResidue {
    Rational value;
    int stabilization_index = 0;
    Rational c_plus;
    std::string derivation;
};

// residue at s = 0 of the zeta series of p_v (1+deg^2)^{-1/2-s}: half the
// Dixmier closed form, extracted symbolically from the stabilized sequence
ZetaResidue zeta_residue(const Graph& g, const GraphTrace& tr, int v);

struct LoopUnitary {
    Cycle loop;
    std::vector<int> vertices;  // source vertices of the loop edges, in order
    AlgebraElement element;     // 1 + sum of S_i - sum of p_i
};

LoopUnitary loop_unitary(const Graph& g, const Cycle& loop);  // loop must be exitless

// index pairing via the commutator route: u [deg, u^*] collapses to
// -sum p_i (verified against relation zero), then each p_i contributes its
// zeta residue; returns -sum of residues
Rational spectral_flow(const LoopUnitary& u, const GraphTrace& tr);

struct ToeplitzReport {
    int domain_size = 0;       // compression columns actually used
    int excluded_columns = 0;  // dropped because the image left the window
    int kernel_dim = 0;
    int interior_covered = 0;  // range coverage on degree blocks 2..L-1
    int interior_total = 0;
    int block1_dim = 0;
    int block1_in_range = 0;
    int defect_dim = 0;        // block-1 vectors outside the range
    Rational tau_coker;        // endo-trace of the structural cokernel
    bool structure_ok = false;
    std::string description;
};

// compression of u to positive degrees, mapped from blocks 1..L-1 into
// 1..L: exact kernel and range, then a structural audit: vectors starting
// on the loop span the cokernel at degree 1; everything in blocks 2..L-1 is
// covered; short vectors off the loop are covered. Block-1 vectors whose
// preimages fell past the window are reported as boundary artifacts, and
// tau_coker measures only the audited loop-started part.
ToeplitzReport toeplitz_index(const TruncatedModule& m, const AlgebraElement& u,
                              const std::vector<int>& loop_vertices);

struct KTheoryRanks {
    int k0 = 0;  // one per end
    int k1 = 0;  // one per cycle
};

KTheoryRanks k_theory_ranks(const Graph& g);  // errors when a cycle has an exit

struct IndexReport {
    Rational spectral_flow_closed;  // -sum of trace values around the loop
    Rational flow_from_residues;    // the commutator route
    Rational residue_value;         // +sum of zeta residues around the loop
    ToeplitzReport toeplitz;
    bool agreement = false;
};

IndexReport index_report(const TruncatedModule& m, const LoopUnitary& u);

// additivity across a disjoint union of two loops: lifts each loop unitary
// to the union (n2 = 0 pairs the first loop with the identity) and checks
// the compression index of the product against the sum of the parts
bool direct_sum_additivity(int n1, int n2, int depth);

} // namespace graphck
