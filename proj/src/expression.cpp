#include "ma_radial/expression.hpp"

#include "ma_radial/error.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <variant>

namespace ma_radial {

enum class Func { exp, expm1, log, sin, cos, sqrt, abs };

namespace {

constexpr std::array<std::pair<std::string_view, Func>, 7> kFunctions{{
    {"exp", Func::exp},
    {"expm1", Func::expm1},
    {"log", Func::log},
    {"sin", Func::sin},
    {"cos", Func::cos},
    {"sqrt", Func::sqrt},
    {"abs", Func::abs},
}};

std::string_view func_name(Func f) {
    for (const auto& [name, id] : kFunctions)
        if (id == f) return name;
    return "?";
}

} // namespace

struct Expression::Node {
    struct Number { double value; };
    struct Variable {};
    struct Negate { std::shared_ptr<const Node> arg; };
    struct Binary { char op; std::shared_ptr<const Node> lhs, rhs; };
    struct Call { Func fn; std::shared_ptr<const Node> arg; };

    std::variant<Number, Variable, Negate, Binary, Call> v;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

template <class T>
NodePtr make(T t) {
    return std::make_shared<const Expression::Node>(Expression::Node{std::move(t)});
}

double apply(Func f, double a) {
    switch (f) {
    case Func::exp: return std::exp(a);
    case Func::expm1: return std::expm1(a);
    case Func::log: return std::log(a);
    case Func::sin: return std::sin(a);
    case Func::cos: return std::cos(a);
    case Func::sqrt: return std::sqrt(a);
    case Func::abs: return std::fabs(a);
    }
    return std::nan("");
}

double evaluate(const Expression::Node& n, double x) {
    using N = Expression::Node;
    return std::visit(
        [x](const auto& e) -> double {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, N::Number>) {
                return e.value;
            } else if constexpr (std::is_same_v<T, N::Variable>) {
                return x;
            } else if constexpr (std::is_same_v<T, N::Negate>) {
                return -evaluate(*e.arg, x);
            } else if constexpr (std::is_same_v<T, N::Call>) {
                return apply(e.fn, evaluate(*e.arg, x));
            } else {
                const double a = evaluate(*e.lhs, x);
                const double b = evaluate(*e.rhs, x);
                switch (e.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
                default: return std::pow(a, b);
                }
            }
        },
        n.v);
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string render(const Expression::Node& n) {
    using N = Expression::Node;
    return std::visit(
        [](const auto& e) -> std::string {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, N::Number>) {
                return "(" + format_number(e.value) + ")";
            } else if constexpr (std::is_same_v<T, N::Variable>) {
                return "x";
            } else if constexpr (std::is_same_v<T, N::Negate>) {
                return "(-" + render(*e.arg) + ")";
            } else if constexpr (std::is_same_v<T, N::Call>) {
                return std::string(func_name(e.fn)) + "(" + render(*e.arg) + ")";
            } else {
                return "(" + render(*e.lhs) + e.op + render(*e.rhs) + ")";
            }
        },
        n.v);
}

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    NodePtr parse_all() {
        NodePtr root = parse_expr();
        skip_ws();
        if (pos_ < s_.size())
            throw SyntaxError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        return root;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+')) lhs = make(Expression::Node::Binary{'+', lhs, parse_term()});
            else if (accept('-')) lhs = make(Expression::Node::Binary{'-', lhs, parse_term()});
            else return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = make(Expression::Node::Binary{'*', lhs, parse_unary()});
            else if (accept('/')) lhs = make(Expression::Node::Binary{'/', lhs, parse_unary()});
            else return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make(Expression::Node::Negate{parse_unary()});
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (accept('^')) return make(Expression::Node::Binary{'^', base, parse_unary()});
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= s_.size()) throw SyntaxError("unexpected end of input", pos_);
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_expr();
            if (!accept(')')) throw SyntaxError("expected ')'", pos_);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), value);
        if (ec != std::errc{}) throw SyntaxError("malformed number", start);
        pos_ = static_cast<std::size_t>(ptr - s_.data());
        return make(Expression::Node::Number{value});
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        const std::string_view name = s_.substr(start, pos_ - start);
        if (name == "x") return make(Expression::Node::Variable{});
        if (name == "pi") return make(Expression::Node::Number{std::numbers::pi});
        for (const auto& [fname, id] : kFunctions) {
            if (fname != name) continue;
            if (!accept('(')) throw SyntaxError("expected '(' after " + std::string(name), pos_);
            NodePtr arg = parse_expr();
            if (!accept(')')) throw SyntaxError("expected ')'", pos_);
            return make(Expression::Node::Call{id, arg});
        }
        throw SyntaxError("unknown identifier '" + std::string(name) + "'", start);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

} // namespace

Expression Expression::parse(std::string_view text) {
    Parser p(text);
    return Expression(p.parse_all(), std::string(text));
}

double Expression::operator()(double x) const { return evaluate(*root_, x); }

std::string Expression::to_string() const { return render(*root_); }

} // namespace ma_radial
