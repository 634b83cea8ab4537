#pragma once

#include "graphck/algebra.hpp"
#include "graphck/trace.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace graphck {

// S_mu S_nu^* as an element
AlgebraElement term_element(const Graph& g, const Term& t);

// Finite window of the representation space: every spanning term with
// |mu|, |nu| <= depth, reduced to a linearly independent basis per degree
// block with exact Gram data. Everything down here is exact rational; the
// only floats in this header are the explicitly float diagonals and norms.
class TruncatedModule {
public:
    struct Block {
        int degree = 0;
        std::vector<int> members;  // global basis indices, in basis order
        // symmetric positive definite inner-product matrix on members, with
        // its unit lower-triangular factor and positive pivots
        std::vector<std::vector<Rational>> gram;
        std::vector<std::vector<Rational>> lfac;
        std::vector<Rational> dfac;
    };

    const Graph& graph() const { return *graph_; }
    const GraphTrace& trace() const { return trace_; }
    int depth() const { return depth_; }

    int raw_size() const { return raw_size_; }
    int basis_size() const { return static_cast<int>(basis_.size()); }
    const Term& basis_term(int i) const { return basis_.at(i); }
    int degree_of(int i) const { return basis_degree_.at(i); }
    const Block& block(int degree) const;
    const std::vector<Block>& blocks() const { return blocks_; }

    AlgebraElement element_of(int i) const { return term_element(*graph_, basis_term(i)); }
    Rational gram_entry(int i, int j) const;

    // exact basis coefficients of a raw spanning term
    const std::vector<std::pair<int, Rational>>& raw_expansion(const Term& t) const;

    // basis coordinates of an element, or nullopt when it is not expressible
    // inside the window (a leak); exact, decided per degree block by the
    // projection residual
    std::optional<std::vector<GaussianRational>> expand(const AlgebraElement& a) const;

private:
    friend TruncatedModule build_module(const Graph& g, const GraphTrace& tr, int depth);

    const Graph* graph_ = nullptr;
    GraphTrace trace_;
    int depth_ = 0;
    int raw_size_ = 0;
    std::vector<Term> basis_;
    std::vector<int> basis_degree_;
    std::vector<Block> blocks_;  // indexed by degree + depth
    std::map<Term, std::vector<std::pair<int, Rational>>, TermLess> expansion_;
};

// Enumerates raw terms in the fixed pivot order (degree, |mu|, mu, nu),
// selecting each term whose Gram residual against the already selected ones
// is positive. A term (mu.e, nu.e) whose final edge is the only edge out of
// its source collapses onto (mu, nu), which the pivot order has already
// placed. Throws std::logic_error if a residual turns negative, which a
// valid graph trace rules out.
TruncatedModule build_module(const Graph& g, const GraphTrace& tr, int depth);

// column c holds the image of basis vector c in basis coordinates;
// col_exact[c] is false when that image leaked past the window (the column
// is then zero and must not be trusted)
struct OperatorMatrix {
    int n = 0;
    std::vector<GaussianRational> a;
    std::vector<bool> col_exact;

    GaussianRational& at(int r, int c) { return a[static_cast<size_t>(r) * n + c]; }
    const GaussianRational& at(int r, int c) const { return a[static_cast<size_t>(r) * n + c]; }
};

OperatorMatrix zero_matrix(int n);
OperatorMatrix identity_matrix(int n);
OperatorMatrix mat_add(const OperatorMatrix& x, const OperatorMatrix& y);
OperatorMatrix mat_sub(const OperatorMatrix& x, const OperatorMatrix& y);
OperatorMatrix mat_mul(const OperatorMatrix& x, const OperatorMatrix& y);
OperatorMatrix mat_scale(const GaussianRational& c, const OperatorMatrix& x);
std::vector<GaussianRational> mat_apply(const OperatorMatrix& x,
                                        const std::vector<GaussianRational>& v);
// entrywise equality restricted to the given columns
bool mat_equal_on(const OperatorMatrix& x, const OperatorMatrix& y,
                  const std::vector<int>& cols);

// z -> a z
OperatorMatrix left_mult(const TruncatedModule& m, const AlgebraElement& a);

// diagonal operators of the grading: multiplication by k, |k|, and exact
// functions of them on each degree block
OperatorMatrix degree_matrix(const TruncatedModule& m);
OperatorMatrix abs_degree_matrix(const TruncatedModule& m);
OperatorMatrix block_projector(const TruncatedModule& m, int k);
OperatorMatrix positive_projector(const TruncatedModule& m);  // degrees >= 1
OperatorMatrix resolvent_power(const TruncatedModule& m, int s);  // (1 + k^2)^{-s}

// the square root in these two is the only irrational quantity anywhere in
// the module, so they are plain float diagonals
std::vector<double> resolvent_half_diagonal(const TruncatedModule& m);  // (1+k^2)^{-1/2}
std::vector<double> phase_diagonal(const TruncatedModule& m);           // k (1+k^2)^{-1/2}
OperatorMatrix phase_squared(const TruncatedModule& m);  // exact k^2 (1+k^2)^{-1}

// z -> x . (degree-zero part of y^* z)
OperatorMatrix rank_one(const TruncatedModule& m, const AlgebraElement& x,
                        const AlgebraElement& y);

// adjoint with respect to the module inner product, G^{-1} A^H G
OperatorMatrix gram_adjoint(const TruncatedModule& m, const OperatorMatrix& A);

// <x, y> of coordinate vectors, conjugate linear in x
GaussianRational gram_pair(const TruncatedModule& m, const std::vector<GaussianRational>& x,
                           const std::vector<GaussianRational>& y);

// basis indices whose paths leave room for operators that lengthen paths by
// up to `reach`; images of these vectors stay inside the window
std::vector<int> trusted_columns(const TruncatedModule& m, int reach);

struct NormCheck {
    double sigma_max = 0;
    double bound = 0;
    bool ok = false;
    int columns = 0;  // how many trusted columns entered the computation
};

// operator norm of [|deg|, a] restricted to trusted columns, computed as the
// largest singular value after exact Gram orthonormalization (floats appear
// only in the final diagonal square roots and the SVD itself); the bound is
// the coefficient-weighted degree spread of a, and ok allows 1e-9 slack
NormCheck commutator_norm_check(const TruncatedModule& m, const AlgebraElement& a);

} // namespace graphck
