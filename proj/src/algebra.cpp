#include "graphck/algebra.hpp"

#include <set>

namespace graphck {

int term_degree(const Term& t) {
    return t.mu.length() - t.nu.length();
}

bool TermLess::operator()(const Term& a, const Term& b) const {
    int da = term_degree(a), db = term_degree(b);
    if (da != db) return da < db;
    if (a.mu.length() != b.mu.length()) return a.mu.length() < b.mu.length();
    if (path_less(*g, a.mu, b.mu)) return true;
    if (path_less(*g, b.mu, a.mu)) return false;
    return path_less(*g, a.nu, b.nu);
}

std::optional<Term> term_product(const Graph& g, const Term& a, const Term& b) {
    Path sigma;
    if (path_prefix(g, a.nu, b.mu, &sigma))
        return Term{concat(g, a.mu, sigma), b.nu};
    if (path_prefix(g, b.mu, a.nu, &sigma))
        return Term{a.mu, concat(g, b.nu, sigma)};
    return std::nullopt;
}

AlgebraElement AlgebraElement::one(const Graph& g) {
    AlgebraElement a(g);
    a.unit_ = GaussianRational(1);
    return a;
}

AlgebraElement AlgebraElement::vertex_projection(const Graph& g, int v) {
    AlgebraElement a(g);
    Path p{v, {}};
    a.add_term(Term{p, p}, GaussianRational(1));
    return a;
}

AlgebraElement AlgebraElement::path_isometry(const Graph& g, const Path& mu) {
    if (!is_valid_path(g, mu)) throw std::invalid_argument("invalid path");
    AlgebraElement a(g);
    a.add_term(Term{mu, Path{path_range(g, mu), {}}}, GaussianRational(1));
    return a;
}

void AlgebraElement::add_term(const Term& t, const GaussianRational& c) {
    if (!is_valid_path(*graph_, t.mu) || !is_valid_path(*graph_, t.nu))
        throw std::invalid_argument("invalid path in term");
    if (path_range(*graph_, t.mu) != path_range(*graph_, t.nu))
        throw std::invalid_argument("term paths must share their range vertex");
    if (c.is_zero()) return;
    auto [it, fresh] = terms_.try_emplace(t, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

void AlgebraElement::check_same_graph(const AlgebraElement& o) const {
    if (graph_ != o.graph_)
        throw std::invalid_argument("operands live over different graphs");
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
    check_same_graph(o);
    AlgebraElement r = *this;
    r.unit_ += o.unit_;
    for (const auto& [t, c] : o.terms_) r.add_term(t, c);
    return r;
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const {
    check_same_graph(o);
    AlgebraElement r = *this;
    r.unit_ -= o.unit_;
    for (const auto& [t, c] : o.terms_) r.add_term(t, -c);
    return r;
}

AlgebraElement AlgebraElement::operator*(const AlgebraElement& o) const {
    check_same_graph(o);
    AlgebraElement r(*graph_);
    r.unit_ = unit_ * o.unit_;
    for (const auto& [t, c] : o.terms_)
        if (!unit_.is_zero()) r.add_term(t, unit_ * c);
    for (const auto& [t, c] : terms_)
        if (!o.unit_.is_zero()) r.add_term(t, c * o.unit_);
    for (const auto& [ta, ca] : terms_)
        for (const auto& [tb, cb] : o.terms_)
            if (auto p = term_product(*graph_, ta, tb)) r.add_term(*p, ca * cb);
    return r;
}

AlgebraElement AlgebraElement::scaled(const GaussianRational& c) const {
    AlgebraElement r(*graph_);
    r.unit_ = unit_ * c;
    for (const auto& [t, x] : terms_) r.add_term(t, x * c);
    return r;
}

AlgebraElement AlgebraElement::adjoint() const {
    AlgebraElement r(*graph_);
    r.unit_ = unit_.conj();
    for (const auto& [t, c] : terms_) r.add_term(Term{t.nu, t.mu}, c.conj());
    return r;
}

bool operator==(const AlgebraElement& a, const AlgebraElement& b) {
    if (a.graph_ != b.graph_ || a.unit_ != b.unit_ || a.terms_.size() != b.terms_.size())
        return false;
    auto ia = a.terms_.begin();
    for (const auto& [t, c] : b.terms_) {
        if (ia->first.mu == t.mu && ia->first.nu == t.nu && ia->second == c)
            ++ia;
        else
            return false;
    }
    return true;
}

AlgebraElement degree_part(const AlgebraElement& a, int k) {
    AlgebraElement r(a.graph());
    if (k == 0) r.add_unit(a.unit());
    for (const auto& [t, c] : a.terms())
        if (term_degree(t) == k) r.add_term(t, c);
    return r;
}

std::map<int, AlgebraElement> graded_parts(const AlgebraElement& a) {
    std::map<int, AlgebraElement> out;
    if (!a.unit().is_zero()) out.emplace(0, degree_part(a, 0));
    for (const auto& [t, c] : a.terms()) {
        int k = term_degree(t);
        if (!out.count(k)) out.emplace(k, degree_part(a, k));
    }
    return out;
}

std::optional<int> gauge_degree(const AlgebraElement& a) {
    auto parts = graded_parts(a);
    if (parts.empty()) return 0;
    if (parts.size() > 1) return std::nullopt;
    return parts.begin()->first;
}

AlgebraElement local_unit(const AlgebraElement& a) {
    if (!a.unit().is_zero())
        throw std::invalid_argument("local unit undefined with adjoined-unit part");
    std::set<int> vs;
    for (const auto& [t, c] : a.terms()) {
        vs.insert(path_source(a.graph(), t.mu));
        vs.insert(path_source(a.graph(), t.nu));
    }
    AlgebraElement r(a.graph());
    for (int v : vs) r = r + AlgebraElement::vertex_projection(a.graph(), v);
    return r;
}

int max_path_length(const AlgebraElement& a) {
    int m = 0;
    for (const auto& [t, c] : a.terms())
        m = std::max({m, t.mu.length(), t.nu.length()});
    return m;
}

std::string element_str(const AlgebraElement& a) {
    const Graph& g = a.graph();
    std::string s;
    auto append = [&](const std::string& coeff, const std::string& body) {
        if (!s.empty()) s += " + ";
        if (coeff == "1" && !body.empty())
            s += body;
        else if (body.empty())
            s += coeff;
        else
            s += "(" + coeff + ")*" + body;
    };
    if (!a.unit().is_zero()) append(gaussian_str(a.unit()), "one");
    for (const auto& [t, c] : a.terms()) {
        std::string body;
        if (t.mu.length() == 0 && t.nu.length() == 0) {
            body = "p(" + g.vertex_id(t.mu.base) + ")";
        } else {
            if (t.mu.length() > 0) body = "S(" + path_str(g, t.mu) + ")";
            if (t.nu.length() > 0) {
                if (!body.empty()) body += "*";
                body += "adj(S(" + path_str(g, t.nu) + "))";
            }
        }
        append(gaussian_str(c), body);
    }
    return s.empty() ? "0" : s;
}

} // namespace graphck
