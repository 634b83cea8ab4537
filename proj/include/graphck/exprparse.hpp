#pragma once

#include "graphck/algebra.hpp"

#include <stdexcept>
#include <string>

namespace graphck {

struct ExprError : std::runtime_error {
    size_t pos;
    ExprError(size_t p, const std::string& msg)
        : std::runtime_error("position " + std::to_string(p) + ": " + msg), pos(p) {}
};

// Grammar, in precedence order: sums of products of factors, where a factor
// is `one`, `i`, a rational like 2/3, p(v), S(e1 e2 ...), adj(expr), a
// parenthesized expr, or a negation. Example:
//   S(e1 e2) * adj(S(e3)) + 2/3 * p(v) - i * one
AlgebraElement parse_element(const Graph& g, const std::string& text);

} // namespace graphck
