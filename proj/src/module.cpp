#include "graphck/module.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace graphck {

AlgebraElement term_element(const Graph& g, const Term& t) {
    return AlgebraElement::path_isometry(g, t.mu) *
           AlgebraElement::path_isometry(g, t.nu).adjoint();
}

namespace {

Rational norm_sq(const GaussianRational& z) { return z.re * z.re + z.im * z.im; }

GaussianRational div_by(const GaussianRational& z, const Rational& d) {
    return {z.re / d, z.im / d};
}

double to_double(const Rational& r) { return mpq_get_d(r.get_mpq_t()); }

// <a, b> = tau(a^* b) for raw terms: the product is a single term or zero,
// and only a diagonal term survives the trace
Rational term_inner(const Graph& g, const GraphTrace& tr, const Term& a, const Term& b) {
    std::optional<Term> p = term_product(g, Term{a.nu, a.mu}, b);
    if (p && p->mu == p->nu) return tr.at(path_range(g, p->mu));
    return Rational(0);
}

// L z = rhs with L unit lower triangular
template <typename V>
std::vector<V> forward_subst(const std::vector<std::vector<Rational>>& lfac,
                             const std::vector<V>& rhs) {
    std::vector<V> z(rhs.size());
    for (size_t i = 0; i < rhs.size(); ++i) {
        V acc = rhs[i];
        for (size_t j = 0; j < i; ++j) acc -= V(lfac[i][j]) * z[j];
        z[i] = acc;
    }
    return z;
}

// L^T c = w
template <typename V>
std::vector<V> back_subst(const std::vector<std::vector<Rational>>& lfac,
                          const std::vector<V>& w) {
    std::vector<V> c(w.size());
    for (size_t ii = w.size(); ii-- > 0;) {
        V acc = w[ii];
        for (size_t j = ii + 1; j < w.size(); ++j) acc -= V(lfac[j][ii]) * c[j];
        c[ii] = acc;
    }
    return c;
}

// symmetric positive definite factorization G = L D L^T; pivots must stay
// positive, anything else means the caller fed a dependent family
void ldl_factor(const std::vector<std::vector<Rational>>& gram,
                std::vector<std::vector<Rational>>& lfac, std::vector<Rational>& dfac) {
    const size_t n = gram.size();
    lfac.assign(n, {});
    dfac.assign(n, Rational(0));
    for (size_t i = 0; i < n; ++i) {
        lfac[i].resize(i);
        for (size_t j = 0; j < i; ++j) {
            Rational acc = gram[i][j];
            for (size_t k = 0; k < j; ++k) acc -= lfac[i][k] * dfac[k] * lfac[j][k];
            lfac[i][j] = acc / dfac[j];
        }
        Rational acc = gram[i][i];
        for (size_t k = 0; k < i; ++k) acc -= lfac[i][k] * lfac[i][k] * dfac[k];
        if (acc <= 0) throw std::logic_error("inner-product matrix is not positive definite");
        dfac[i] = acc;
    }
}

} // namespace

const TruncatedModule::Block& TruncatedModule::block(int degree) const {
    if (degree < -depth_ || degree > depth_)
        throw std::out_of_range("no degree block " + std::to_string(degree) +
                                " at depth " + std::to_string(depth_));
    return blocks_[degree + depth_];
}

Rational TruncatedModule::gram_entry(int i, int j) const {
    if (degree_of(i) != degree_of(j)) return Rational(0);
    const Block& blk = block(degree_of(i));
    auto pos = [&](int idx) {
        return static_cast<size_t>(
            std::find(blk.members.begin(), blk.members.end(), idx) - blk.members.begin());
    };
    return blk.gram[pos(i)][pos(j)];
}

const std::vector<std::pair<int, Rational>>& TruncatedModule::raw_expansion(
    const Term& t) const {
    auto it = expansion_.find(t);
    if (it == expansion_.end())
        throw std::invalid_argument("term is not in the raw spanning set of this window");
    return it->second;
}

std::optional<std::vector<GaussianRational>> TruncatedModule::expand(
    const AlgebraElement& a) const {
    if (!a.unit().is_zero())
        throw std::invalid_argument("the adjoined unit has no module coordinates");
    std::vector<GaussianRational> coords(basis_size());
    for (auto& [k, part] : graded_parts(a)) {
        if (part.is_zero_raw()) continue;
        if (k < -depth_ || k > depth_) return std::nullopt;
        const Block& blk = blocks_[k + depth_];
        std::vector<GaussianRational> rhs(blk.members.size());
        for (size_t i = 0; i < blk.members.size(); ++i)
            rhs[i] = tau(trace_, element_of(blk.members[i]).adjoint() * part);
        std::vector<GaussianRational> z = forward_subst(blk.lfac, rhs);
        GaussianRational nn = tau(trace_, part.adjoint() * part);
        if (!nn.is_real()) throw std::logic_error("norm of an element came out complex");
        Rational resid = nn.re;
        for (size_t i = 0; i < z.size(); ++i) resid -= norm_sq(z[i]) / blk.dfac[i];
        if (resid < 0) throw std::logic_error("negative projection residual");
        if (resid > 0) return std::nullopt;  // the part leaks past the window
        std::vector<GaussianRational> w(z.size());
        for (size_t i = 0; i < z.size(); ++i) w[i] = div_by(z[i], blk.dfac[i]);
        std::vector<GaussianRational> c = back_subst(blk.lfac, w);
        for (size_t i = 0; i < c.size(); ++i) coords[blk.members[i]] += c[i];
    }
    return coords;
}

TruncatedModule build_module(const Graph& g, const GraphTrace& tr, int depth) {
    if (depth < 1) throw std::invalid_argument("window depth must be at least 1");
    if (tr.graph != &g || !check_graph_trace(tr))
        throw std::invalid_argument("build_module needs a valid graph trace on the same graph");

    TruncatedModule m;
    m.graph_ = &g;
    m.trace_ = tr;
    m.depth_ = depth;
    m.blocks_.resize(2 * depth + 1);
    for (int k = -depth; k <= depth; ++k) m.blocks_[k + depth].degree = k;
    m.expansion_ = std::map<Term, std::vector<std::pair<int, Rational>>, TermLess>(TermLess{&g});

    std::vector<Path> paths = all_paths_up_to(g, depth);
    std::vector<Term> raw;
    for (const Path& mu : paths)
        for (const Path& nu : paths)
            if (path_range(g, mu) == path_range(g, nu)) raw.push_back({mu, nu});
    std::sort(raw.begin(), raw.end(), [&](const Term& a, const Term& b) {
        return TermLess{&g}(a, b);
    });
    m.raw_size_ = static_cast<int>(raw.size());

    for (const Term& t : raw) {
        // a last edge that is the only one out of its source retracts away:
        // S_{mu e} S_{nu e}^* = S_mu p_{s(e)} S_nu^*, and the pivot order has
        // already placed the shorter term
        if (t.mu.length() >= 1 && t.nu.length() >= 1 &&
            t.mu.edges.back() == t.nu.edges.back() &&
            g.out_edges(g.edge(t.mu.edges.back()).src).size() == 1) {
            Term shorter{Path{t.mu.base, {t.mu.edges.begin(), t.mu.edges.end() - 1}},
                         Path{t.nu.base, {t.nu.edges.begin(), t.nu.edges.end() - 1}}};
            m.expansion_[t] = m.expansion_.at(shorter);
            continue;
        }

        TruncatedModule::Block& blk = m.blocks_[term_degree(t) + depth];
        std::vector<Rational> rhs(blk.members.size());
        for (size_t i = 0; i < blk.members.size(); ++i)
            rhs[i] = term_inner(g, tr, m.basis_[blk.members[i]], t);
        Rational tt = term_inner(g, tr, t, t);
        std::vector<Rational> z = forward_subst(blk.lfac, rhs);
        Rational resid = tt;
        for (size_t i = 0; i < z.size(); ++i) resid -= z[i] * z[i] / blk.dfac[i];
        if (resid < 0)
            throw std::logic_error("negative Gram residual while selecting the basis");
        if (resid > 0) {
            int gidx = m.basis_size();
            const size_t s = blk.members.size();
            for (size_t i = 0; i < s; ++i) blk.gram[i].push_back(rhs[i]);
            blk.gram.emplace_back(rhs);
            blk.gram.back().push_back(tt);
            std::vector<Rational> lrow(s);
            for (size_t i = 0; i < s; ++i) lrow[i] = z[i] / blk.dfac[i];
            blk.lfac.push_back(std::move(lrow));
            blk.dfac.push_back(resid);
            blk.members.push_back(gidx);
            m.basis_.push_back(t);
            m.basis_degree_.push_back(term_degree(t));
            m.expansion_[t] = {{gidx, Rational(1)}};
        } else {
            std::vector<Rational> w(z.size());
            for (size_t i = 0; i < z.size(); ++i) w[i] = z[i] / blk.dfac[i];
            std::vector<Rational> c = back_subst(blk.lfac, w);
            std::vector<std::pair<int, Rational>> expn;
            for (size_t i = 0; i < c.size(); ++i)
                if (c[i] != 0) expn.emplace_back(blk.members[i], c[i]);
            m.expansion_[t] = std::move(expn);
        }
    }
    return m;
}

OperatorMatrix zero_matrix(int n) {
    return {n, std::vector<GaussianRational>(static_cast<size_t>(n) * n),
            std::vector<bool>(n, true)};
}

OperatorMatrix identity_matrix(int n) {
    OperatorMatrix x = zero_matrix(n);
    for (int i = 0; i < n; ++i) x.at(i, i) = GaussianRational(1);
    return x;
}

OperatorMatrix mat_add(const OperatorMatrix& x, const OperatorMatrix& y) {
    OperatorMatrix r = x;
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
    for (int c = 0; c < r.n; ++c) r.col_exact[c] = x.col_exact[c] && y.col_exact[c];
    return r;
}

OperatorMatrix mat_sub(const OperatorMatrix& x, const OperatorMatrix& y) {
    OperatorMatrix r = x;
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
    for (int c = 0; c < r.n; ++c) r.col_exact[c] = x.col_exact[c] && y.col_exact[c];
    return r;
}

OperatorMatrix mat_mul(const OperatorMatrix& x, const OperatorMatrix& y) {
    OperatorMatrix r = zero_matrix(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int k = 0; k < x.n; ++k) {
            const GaussianRational& v = x.at(i, k);
            if (v.is_zero()) continue;
            for (int j = 0; j < x.n; ++j) {
                const GaussianRational& w = y.at(k, j);
                if (!w.is_zero()) r.at(i, j) += v * w;
            }
        }
    for (int j = 0; j < r.n; ++j) {
        bool ok = y.col_exact[j];
        if (ok)
            for (int k = 0; k < x.n && ok; ++k)
                if (!y.at(k, j).is_zero() && !x.col_exact[k]) ok = false;
        r.col_exact[j] = ok;
    }
    return r;
}

OperatorMatrix mat_scale(const GaussianRational& c, const OperatorMatrix& x) {
    OperatorMatrix r = x;
    for (auto& v : r.a) v = c * v;
    return r;
}

std::vector<GaussianRational> mat_apply(const OperatorMatrix& x,
                                        const std::vector<GaussianRational>& v) {
    std::vector<GaussianRational> r(x.n);
    for (int j = 0; j < x.n; ++j) {
        if (v[j].is_zero()) continue;
        for (int i = 0; i < x.n; ++i)
            if (!x.at(i, j).is_zero()) r[i] += x.at(i, j) * v[j];
    }
    return r;
}

bool mat_equal_on(const OperatorMatrix& x, const OperatorMatrix& y,
                  const std::vector<int>& cols) {
    for (int c : cols)
        for (int i = 0; i < x.n; ++i)
            if (x.at(i, c) != y.at(i, c)) return false;
    return true;
}

OperatorMatrix left_mult(const TruncatedModule& m, const AlgebraElement& a) {
    OperatorMatrix r = zero_matrix(m.basis_size());
    for (int j = 0; j < m.basis_size(); ++j) {
        auto coords = m.expand(a * m.element_of(j));
        if (!coords) {
            r.col_exact[j] = false;
            continue;
        }
        for (int i = 0; i < m.basis_size(); ++i) r.at(i, j) = (*coords)[i];
    }
    return r;
}

namespace {

OperatorMatrix diagonal_of_degree(const TruncatedModule& m,
                                  const std::function<GaussianRational(int)>& f) {
    OperatorMatrix r = zero_matrix(m.basis_size());
    for (int i = 0; i < m.basis_size(); ++i) r.at(i, i) = f(m.degree_of(i));
    return r;
}

} // namespace

OperatorMatrix degree_matrix(const TruncatedModule& m) {
    return diagonal_of_degree(m, [](int k) { return GaussianRational(k); });
}

OperatorMatrix abs_degree_matrix(const TruncatedModule& m) {
    return diagonal_of_degree(m, [](int k) { return GaussianRational(std::abs(k)); });
}

OperatorMatrix block_projector(const TruncatedModule& m, int k) {
    return diagonal_of_degree(m, [k](int d) { return GaussianRational(d == k ? 1 : 0); });
}

OperatorMatrix positive_projector(const TruncatedModule& m) {
    return diagonal_of_degree(m, [](int d) { return GaussianRational(d >= 1 ? 1 : 0); });
}

OperatorMatrix resolvent_power(const TruncatedModule& m, int s) {
    return diagonal_of_degree(m, [s](int k) {
        Rational base(1 + static_cast<long>(k) * k);
        Rational p(1);
        for (int i = 0; i < std::abs(s); ++i) p *= base;
        return GaussianRational(s >= 0 ? Rational(1) / p : p);
    });
}

std::vector<double> resolvent_half_diagonal(const TruncatedModule& m) {
    std::vector<double> d(m.basis_size());
    for (int i = 0; i < m.basis_size(); ++i) {
        double k = m.degree_of(i);
        d[i] = 1.0 / std::sqrt(1.0 + k * k);
    }
    return d;
}

std::vector<double> phase_diagonal(const TruncatedModule& m) {
    std::vector<double> d(m.basis_size());
    for (int i = 0; i < m.basis_size(); ++i) {
        double k = m.degree_of(i);
        d[i] = k / std::sqrt(1.0 + k * k);
    }
    return d;
}

OperatorMatrix phase_squared(const TruncatedModule& m) {
    return diagonal_of_degree(m, [](int k) {
        Rational kk(static_cast<long>(k) * k);
        return GaussianRational(kk / (1 + kk));
    });
}

OperatorMatrix rank_one(const TruncatedModule& m, const AlgebraElement& x,
                        const AlgebraElement& y) {
    if (!x.unit().is_zero() || !y.unit().is_zero())
        throw std::invalid_argument("rank-one factors must be unit-free");
    OperatorMatrix r = zero_matrix(m.basis_size());
    for (int j = 0; j < m.basis_size(); ++j) {
        AlgebraElement scal = degree_part(y.adjoint() * m.element_of(j), 0);
        auto coords = m.expand(x * scal);
        if (!coords) {
            r.col_exact[j] = false;
            continue;
        }
        for (int i = 0; i < m.basis_size(); ++i) r.at(i, j) = (*coords)[i];
    }
    return r;
}

OperatorMatrix gram_adjoint(const TruncatedModule& m, const OperatorMatrix& A) {
    const int n = m.basis_size();
    bool all_exact =
        std::all_of(A.col_exact.begin(), A.col_exact.end(), [](bool b) { return b; });
    OperatorMatrix r = zero_matrix(n);
    for (const TruncatedModule::Block& blk : m.blocks()) {
        for (size_t cpos = 0; cpos < blk.members.size(); ++cpos) {
            const int c = blk.members[cpos];
            // v = G e_c, supported on c's block
            // w = A^H v over all rows, then solve G x = w blockwise
            std::vector<GaussianRational> w(n);
            for (int i = 0; i < n; ++i) {
                GaussianRational acc;
                for (size_t jpos = 0; jpos < blk.members.size(); ++jpos) {
                    const int j = blk.members[jpos];
                    if (!A.at(j, i).is_zero())
                        acc += A.at(j, i).conj() * GaussianRational(blk.gram[jpos][cpos]);
                }
                w[i] = acc;
            }
            for (const TruncatedModule::Block& rb : m.blocks()) {
                if (rb.members.empty()) continue;
                std::vector<GaussianRational> rhs(rb.members.size());
                for (size_t i = 0; i < rb.members.size(); ++i) rhs[i] = w[rb.members[i]];
                std::vector<GaussianRational> z = forward_subst(rb.lfac, rhs);
                for (size_t i = 0; i < z.size(); ++i) z[i] = div_by(z[i], rb.dfac[i]);
                std::vector<GaussianRational> xx = back_subst(rb.lfac, z);
                for (size_t i = 0; i < xx.size(); ++i) r.at(rb.members[i], c) = xx[i];
            }
        }
    }
    for (int c = 0; c < n; ++c) r.col_exact[c] = all_exact;
    return r;
}

GaussianRational gram_pair(const TruncatedModule& m, const std::vector<GaussianRational>& x,
                           const std::vector<GaussianRational>& y) {
    GaussianRational acc;
    for (const TruncatedModule::Block& blk : m.blocks())
        for (size_t i = 0; i < blk.members.size(); ++i) {
            if (x[blk.members[i]].is_zero()) continue;
            for (size_t j = 0; j < blk.members.size(); ++j)
                acc += x[blk.members[i]].conj() * GaussianRational(blk.gram[i][j]) *
                       y[blk.members[j]];
        }
    return acc;
}

std::vector<int> trusted_columns(const TruncatedModule& m, int reach) {
    std::vector<int> cols;
    for (int i = 0; i < m.basis_size(); ++i) {
        const Term& t = m.basis_term(i);
        if (std::max(t.mu.length(), t.nu.length()) <= m.depth() - reach) cols.push_back(i);
    }
    return cols;
}

NormCheck commutator_norm_check(const TruncatedModule& m, const AlgebraElement& a) {
    OperatorMatrix A = left_mult(m, a);
    OperatorMatrix absd = abs_degree_matrix(m);
    OperatorMatrix C = mat_sub(mat_mul(absd, A), mat_mul(A, absd));

    std::vector<int> cols;
    for (int c : trusted_columns(m, max_path_length(a)))
        if (A.col_exact[c]) cols.push_back(c);

    double bound = 0;
    for (const auto& [t, coef] : a.terms())
        bound += std::sqrt(to_double(norm_sq(coef))) * std::abs(term_degree(t));

    NormCheck out{0.0, bound, true, static_cast<int>(cols.size())};
    if (cols.empty()) return out;

    // factor the Gram of the chosen columns, and assemble the global factor
    std::vector<std::vector<Rational>> gs(cols.size(), std::vector<Rational>(cols.size()));
    for (size_t i = 0; i < cols.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j) gs[i][j] = m.gram_entry(cols[i], cols[j]);
    std::vector<std::vector<Rational>> ls;
    std::vector<Rational> ds;
    ldl_factor(gs, ls, ds);

    const int n = m.basis_size();
    // M1 = Lglobal^T C[:, cols], exact
    std::vector<std::vector<GaussianRational>> m1(
        n, std::vector<GaussianRational>(cols.size()));
    for (const TruncatedModule::Block& blk : m.blocks()) {
        for (size_t i = 0; i < blk.members.size(); ++i) {
            for (size_t c = 0; c < cols.size(); ++c) {
                GaussianRational acc = C.at(blk.members[i], cols[c]);
                for (size_t j = i + 1; j < blk.members.size(); ++j)
                    acc += GaussianRational(blk.lfac[j][i]) * C.at(blk.members[j], cols[c]);
                m1[blk.members[i]][c] = acc;
            }
        }
    }
    // M2 = M1 Ls^{-T}: forward substitution along each row
    for (int i = 0; i < n; ++i) m1[i] = forward_subst(ls, m1[i]);

    // float scalings D^{1/2} on rows, Ds^{-1/2} on columns, then the SVD
    std::vector<double> rowscale(n, 1.0);
    for (const TruncatedModule::Block& blk : m.blocks())
        for (size_t i = 0; i < blk.members.size(); ++i)
            rowscale[blk.members[i]] = std::sqrt(to_double(blk.dfac[i]));
    Eigen::MatrixXcd M(n, static_cast<int>(cols.size()));
    for (int i = 0; i < n; ++i)
        for (size_t c = 0; c < cols.size(); ++c)
            M(i, static_cast<int>(c)) =
                std::complex<double>(to_double(m1[i][c].re), to_double(m1[i][c].im)) *
                rowscale[i] / std::sqrt(to_double(ds[c]));
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    out.sigma_max = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    out.ok = out.sigma_max <= bound + 1e-9;
    return out;
}

} // namespace graphck
