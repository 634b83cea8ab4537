#pragma once

#include "graphck/graph.hpp"
#include "graphck/rational.hpp"

#include <map>
#include <optional>

namespace graphck {

// one spanning term S_mu S_nu^* with r(mu) == r(nu)
struct Term {
    Path mu, nu;
};

int term_degree(const Term& t);

// deterministic term order: degree, |mu|, mu lexicographically, then nu
struct TermLess {
    const Graph* g;
    bool operator()(const Term& a, const Term& b) const;
};

using TermMap = std::map<Term, GaussianRational, TermLess>;

// S_nu^* S_alpha collapses to an honest path or to zero, which makes the
// product of two spanning terms a single term or zero:
//   alpha = nu.sigma  ->  S_{mu.sigma} S_beta^*
//   nu = alpha.sigma  ->  S_mu S_{beta.sigma}^*
//   otherwise zero
std::optional<Term> term_product(const Graph& g, const Term& a, const Term& b);

// element of the span of spanning terms plus a formal adjoined unit
class AlgebraElement {
public:
    explicit AlgebraElement(const Graph& g) : graph_(&g), terms_(TermLess{&g}) {}

    static AlgebraElement zero(const Graph& g) { return AlgebraElement(g); }
    static AlgebraElement one(const Graph& g);
    static AlgebraElement vertex_projection(const Graph& g, int v);      // p_v
    static AlgebraElement path_isometry(const Graph& g, const Path& mu); // S_mu

    const Graph& graph() const { return *graph_; }
    const GaussianRational& unit() const { return unit_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero_raw() const { return unit_.is_zero() && terms_.empty(); }
    int term_count() const { return static_cast<int>(terms_.size()); }

    void add_term(const Term& t, const GaussianRational& c);
    void add_unit(const GaussianRational& c) { unit_ += c; }

    AlgebraElement operator+(const AlgebraElement& o) const;
    AlgebraElement operator-(const AlgebraElement& o) const;
    AlgebraElement operator*(const AlgebraElement& o) const;
    AlgebraElement scaled(const GaussianRational& c) const;
    AlgebraElement adjoint() const;

    friend bool operator==(const AlgebraElement& a, const AlgebraElement& b);

private:
    void check_same_graph(const AlgebraElement& o) const;
    const Graph* graph_;
    GaussianRational unit_;
    TermMap terms_;
};

// degree k part under the gauge grading deg(S_mu S_nu^*) = |mu| - |nu|;
// the unit sits in degree 0
AlgebraElement degree_part(const AlgebraElement& a, int k);
std::map<int, AlgebraElement> graded_parts(const AlgebraElement& a);
// the degree when a is homogeneous, otherwise nullopt (zero counts as every
// degree; reported as 0)
std::optional<int> gauge_degree(const AlgebraElement& a);

// finite sum of vertex projections acting as a unit for a on both sides;
// requires unit() == 0 since nothing local can absorb the adjoined unit
AlgebraElement local_unit(const AlgebraElement& a);

// longest mu or nu appearing in a term of a
int max_path_length(const AlgebraElement& a);

std::string element_str(const AlgebraElement& a);

} // namespace graphck
