#include "graphck/exprparse.hpp"

#include <cctype>
#include <vector>

namespace graphck {

namespace {

struct Token {
    enum Kind { Id, Num, Sym, End } kind;
    std::string text;
    size_t pos;
};

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            out.push_back({Token::Id, s.substr(i, j - i), i});
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({Token::Num, s.substr(i, j - i), i});
            i = j;
        } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '(' || c == ')') {
            out.push_back({Token::Sym, std::string(1, c), i});
            ++i;
        } else {
            throw ExprError(i, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Token::End, "", s.size()});
    return out;
}

class Parser {
public:
    Parser(const Graph& g, std::vector<Token> toks) : g_(g), toks_(std::move(toks)) {}

    AlgebraElement parse() {
        AlgebraElement e = sum();
        if (!at_end()) throw ExprError(cur().pos, "trailing input");
        return e;
    }

private:
    const Token& cur() const { return toks_[i_]; }
    bool at_end() const { return cur().kind == Token::End; }
    bool is_sym(const char* s) const { return cur().kind == Token::Sym && cur().text == s; }
    void advance() { ++i_; }
    void expect_sym(const char* s) {
        if (!is_sym(s)) throw ExprError(cur().pos, std::string("expected '") + s + "'");
        advance();
    }

    AlgebraElement sum() {
        AlgebraElement e = product();
        while (is_sym("+") || is_sym("-")) {
            bool plus = cur().text == "+";
            advance();
            AlgebraElement r = product();
            e = plus ? e + r : e - r;
        }
        return e;
    }

    AlgebraElement product() {
        AlgebraElement e = factor();
        while (is_sym("*")) {
            advance();
            e = e * factor();
        }
        return e;
    }

    AlgebraElement factor() {
        if (is_sym("-")) {
            advance();
            return factor().scaled(GaussianRational(-1));
        }
        if (is_sym("(")) {
            advance();
            AlgebraElement e = sum();
            expect_sym(")");
            return e;
        }
        if (cur().kind == Token::Num) return number();
        if (cur().kind != Token::Id) throw ExprError(cur().pos, "expected a factor");
        const std::string name = cur().text;
        const size_t pos = cur().pos;
        advance();
        if (name == "one") return AlgebraElement::one(g_);
        if (name == "i") return AlgebraElement::one(g_).scaled(GaussianRational::i());
        if (name == "p") return projection(pos);
        if (name == "S") return isometry(pos);
        if (name == "adj") {
            expect_sym("(");
            AlgebraElement e = sum();
            expect_sym(")");
            return e.adjoint();
        }
        throw ExprError(pos, "unknown name '" + name + "'");
    }

    AlgebraElement number() {
        Rational num(cur().text);
        advance();
        if (is_sym("/")) {
            advance();
            if (cur().kind != Token::Num) throw ExprError(cur().pos, "expected a denominator");
            Rational den(cur().text);
            if (den == 0) throw ExprError(cur().pos, "division by zero");
            advance();
            num /= den;
        }
        num.canonicalize();
        return AlgebraElement::one(g_).scaled(GaussianRational(num));
    }

    AlgebraElement projection(size_t pos) {
        expect_sym("(");
        if (cur().kind != Token::Id) throw ExprError(cur().pos, "expected a vertex");
        int v = g_.vertex_index(cur().text);
        if (v < 0) throw ExprError(cur().pos, "unknown vertex '" + cur().text + "'");
        advance();
        expect_sym(")");
        (void)pos;
        return AlgebraElement::vertex_projection(g_, v);
    }

    AlgebraElement isometry(size_t pos) {
        expect_sym("(");
        std::vector<int> edges;
        while (cur().kind == Token::Id || cur().kind == Token::Num) {
            int e = g_.edge_index(cur().text);
            if (e < 0) throw ExprError(cur().pos, "unknown edge '" + cur().text + "'");
            edges.push_back(e);
            advance();
        }
        expect_sym(")");
        if (edges.empty()) throw ExprError(pos, "S needs at least one edge");
        Path p{g_.edge(edges[0]).src, edges};
        if (!is_valid_path(g_, p)) throw ExprError(pos, "edges do not compose into a path");
        return AlgebraElement::path_isometry(g_, p);
    }

    const Graph& g_;
    std::vector<Token> toks_;
    size_t i_ = 0;
};

} // namespace

AlgebraElement parse_element(const Graph& g, const std::string& text) {
    return Parser(g, lex(text)).parse();
}

} // namespace graphck
