#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace ma_radial {

/*
 * A tiny single-variable arithmetic language used to ingest nonlinearities
 * from the command line and problem files.
 *
 *   expr    := term (('+' | '-') term)*
 *   term    := unary (('*' | '/') unary)*
 *   unary   := ('+' | '-') unary | power
 *   power   := primary ('^' unary)?          right-associative, binds tightest
 *   primary := number | 'x' | 'pi' | func '(' expr ')' | '(' expr ')'
 *   func    := exp | expm1 | log | sin | cos | sqrt | abs
 *
 * Unary minus binds looser than '^', so -x^2 == -(x^2).
 */
class Expression {
public:
    struct Node;

    static Expression parse(std::string_view text);

    double operator()(double x) const;

    /// Fully parenthesised canonical form; re-parses to the same tree.
    std::string to_string() const;

    const std::string& source() const noexcept { return source_; }

private:
    Expression(std::shared_ptr<const Node> root, std::string source)
        : root_(std::move(root)), source_(std::move(source)) {}

    std::shared_ptr<const Node> root_;
    std::string source_;
};

} // namespace ma_radial
