// Copyright 2026 The qcompat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file expr.hpp
 * A small closed-form expression language over named real parameters,
 * evaluated either on doubles or on forward-mode dual numbers.
 *
 * Grammar (precedence high to low: ^, unary -, * /, + -):
 *
 *     expr  := term (('+'|'-') term)*
 *     term  := unary (('*'|'/') unary)*
 *     unary := '-' unary | power
 *     power := atom ('^' unary)?
 *     atom  := number | ident | ident '(' expr ')' | '(' expr ')'
 *
 * Exponents must be parameter-free and integer valued.
 */
#pragma once

#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstring>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "qcompat/core.hpp"

namespace qcompat {

enum class Func { Sin, Cos, Exp, Sqrt };
enum class BinOp { Add, Sub, Mul, Div };

inline std::string_view func_name(Func f) {
    switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Sqrt: return "sqrt";
    }
    return "?";
}

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Number { double value; };
struct Param { std::size_t index; };
struct Negate { NodePtr arg; };
struct Binary { BinOp op; NodePtr lhs, rhs; };
struct Power { NodePtr base; int exponent; };
struct Call { Func func; NodePtr arg; };

struct Node {
    std::variant<Number, Param, Negate, Binary, Power, Call> v;
};

bool operator==(const Node &a, const Node &b);

inline bool same(const NodePtr &a, const NodePtr &b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

inline bool operator==(const Node &a, const Node &b) {
    if (a.v.index() != b.v.index()) return false;
    return std::visit(
        [&](const auto &x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const T &y = std::get<T>(b.v);
            if constexpr (std::is_same_v<T, Number>) {
                // bitwise identity, so -0.0 != 0.0 and NaN == NaN
                return std::memcmp(&x.value, &y.value, sizeof(double)) == 0;
            } else if constexpr (std::is_same_v<T, Param>) {
                return x.index == y.index;
            } else if constexpr (std::is_same_v<T, Negate>) {
                return same(x.arg, y.arg);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return x.op == y.op && same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
            } else if constexpr (std::is_same_v<T, Power>) {
                return x.exponent == y.exponent && same(x.base, y.base);
            } else {
                return x.func == y.func && same(x.arg, y.arg);
            }
        },
        a.v);
}

/// Forward-mode dual number: a value and its gradient w.r.t. all parameters.
struct Dual {
    double value = 0.0;
    RVector partials;

    static Dual constant(double v, Eigen::Index m) { return {v, RVector::Zero(m)}; }
    static Dual variable(double v, Eigen::Index m, Eigen::Index i) {
        Dual d{v, RVector::Zero(m)};
        d.partials[i] = 1.0;
        return d;
    }
};

inline Dual operator+(const Dual &a, const Dual &b) { return {a.value + b.value, a.partials + b.partials}; }
inline Dual operator-(const Dual &a, const Dual &b) { return {a.value - b.value, a.partials - b.partials}; }
inline Dual operator-(const Dual &a) { return {-a.value, -a.partials}; }
inline Dual operator*(const Dual &a, const Dual &b) {
    return {a.value * b.value, b.value * a.partials + a.value * b.partials};
}
inline Dual operator/(const Dual &a, const Dual &b) {
    return {a.value / b.value, (a.partials * b.value - a.value * b.partials) / (b.value * b.value)};
}

namespace detail {

inline double value_of(double x) { return x; }
inline double value_of(const Dual &x) { return x.value; }

inline double apply(Func f, double x) {
    switch (f) {
    case Func::Sin: return std::sin(x);
    case Func::Cos: return std::cos(x);
    case Func::Exp: return std::exp(x);
    case Func::Sqrt: return std::sqrt(x);
    }
    return 0.0;
}

inline Dual apply(Func f, const Dual &x) {
    const double v = apply(f, x.value);
    double d = 0.0;
    switch (f) {
    case Func::Sin: d = std::cos(x.value); break;
    case Func::Cos: d = -std::sin(x.value); break;
    case Func::Exp: d = v; break;
    case Func::Sqrt:
        if (v == 0.0) {
            if (x.partials.cwiseAbs().maxCoeff() == 0.0) return {v, x.partials};
            throw DomainError("sqrt is not differentiable at 0");
        }
        d = 0.5 / v;
        break;
    }
    return {v, d * x.partials};
}

inline double ipow(double x, int n) { return std::pow(x, n); }
inline Dual ipow(const Dual &x, int n) {
    if (n == 0) return {1.0, RVector::Zero(x.partials.size())};
    return {std::pow(x.value, n), (n * std::pow(x.value, n - 1)) * x.partials};
}

template <class T>
T make_constant(double v, Eigen::Index m) {
    if constexpr (std::is_same_v<T, double>) {
        (void)m;
        return v;
    } else {
        return Dual::constant(v, m);
    }
}

}  // namespace detail

/**
 * @brief Evaluates a tree on doubles or duals.
 *
 * `args[i]` is the value of parameter i. Throws DomainError on division by
 * zero and square roots of negative numbers.
 */
template <class T>
T evaluate(const Node &node, std::span<const T> args, Eigen::Index nparams) {
    return std::visit(
        [&](const auto &x) -> T {
            using N = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<N, Number>) {
                return detail::make_constant<T>(x.value, nparams);
            } else if constexpr (std::is_same_v<N, Param>) {
                return args[x.index];
            } else if constexpr (std::is_same_v<N, Negate>) {
                return -evaluate<T>(*x.arg, args, nparams);
            } else if constexpr (std::is_same_v<N, Binary>) {
                T l = evaluate<T>(*x.lhs, args, nparams);
                T r = evaluate<T>(*x.rhs, args, nparams);
                switch (x.op) {
                case BinOp::Add: return l + r;
                case BinOp::Sub: return l - r;
                case BinOp::Mul: return l * r;
                case BinOp::Div:
                    if (detail::value_of(r) == 0.0) throw DomainError("division by zero");
                    return l / r;
                }
                return l;
            } else if constexpr (std::is_same_v<N, Power>) {
                T b = evaluate<T>(*x.base, args, nparams);
                if (x.exponent < 0 && detail::value_of(b) == 0.0) {
                    throw DomainError("division by zero (negative power of 0)");
                }
                return detail::ipow(b, x.exponent);
            } else {
                T a = evaluate<T>(*x.arg, args, nparams);
                if (x.func == Func::Sqrt && detail::value_of(a) < 0.0) {
                    throw DomainError("sqrt of negative number");
                }
                return detail::apply(x.func, a);
            }
        },
        node.v);
}

/// Parsed expression bound to a parameter list. Immutable; cheap to copy.
class Expr {
  public:
    Expr() = default;
    explicit Expr(NodePtr root) : root_(std::move(root)) {}

    [[nodiscard]] const Node &root() const { return *root_; }
    [[nodiscard]] const NodePtr &ptr() const noexcept { return root_; }

    [[nodiscard]] double eval(std::span<const double> x) const {
        return evaluate<double>(*root_, x, static_cast<Eigen::Index>(x.size()));
    }
    [[nodiscard]] Dual eval(std::span<const Dual> x) const {
        return evaluate<Dual>(*root_, x, static_cast<Eigen::Index>(x.size()));
    }

    friend bool operator==(const Expr &a, const Expr &b) { return same(a.root_, b.root_); }

  private:
    NodePtr root_;
};

namespace detail {

inline NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

class Parser {
  public:
    Parser(std::string_view text, std::span<const std::string> params)
        : text_(text), params_(params) {}

    NodePtr parse() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
        NodePtr e = expr();
        skip_ws();
        if (pos_ < text_.size()) {
            throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        }
        return e;
    }

  private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) {
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make({Binary{BinOp::Add, lhs, term()}});
            } else if (accept('-')) {
                lhs = make({Binary{BinOp::Sub, lhs, term()}});
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make({Binary{BinOp::Mul, lhs, unary()}});
            } else if (accept('/')) {
                lhs = make({Binary{BinOp::Div, lhs, unary()}});
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return make({Negate{unary()}});
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        skip_ws();
        const std::size_t at = pos_;
        if (!accept('^')) return base;
        NodePtr ex = unary();
        if (depends_on_params(*ex)) throw ParseError("exponent must not depend on parameters", at);
        double value = 0.0;
        try {
            value = evaluate<double>(*ex, std::span<const double>(), 0);
        } catch (const DomainError &e) {
            throw ParseError(std::string("exponent is undefined: ") + e.what(), at);
        }
        if (!std::isfinite(value) || value != std::round(value) || std::abs(value) > 1e6) {
            throw ParseError("exponent must be an integer", at);
        }
        return make({Power{base, static_cast<int>(value)}});
    }

    static bool depends_on_params(const Node &n) {
        return std::visit(
            [](const auto &x) -> bool {
                using N = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<N, Number>) return false;
                else if constexpr (std::is_same_v<N, Param>) return true;
                else if constexpr (std::is_same_v<N, Negate>) return depends_on_params(*x.arg);
                else if constexpr (std::is_same_v<N, Binary>)
                    return depends_on_params(*x.lhs) || depends_on_params(*x.rhs);
                else if constexpr (std::is_same_v<N, Power>) return depends_on_params(*x.base);
                else return depends_on_params(*x.arg);
            },
            n.v);
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    NodePtr number() {
        const std::size_t start = pos_;
        double value = 0.0;
        const char *first = text_.data() + pos_;
        const char *last = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
        if (ec != std::errc()) throw ParseError("malformed number", start);
        pos_ += static_cast<std::size_t>(ptr - first);
        return make({Number{value}});
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        static constexpr std::array<Func, 4> funcs{Func::Sin, Func::Cos, Func::Exp, Func::Sqrt};
        for (Func f : funcs) {
            if (name == func_name(f)) {
                if (!accept('(')) {
                    throw ParseError("function '" + std::string(name) + "' takes exactly one argument", pos_);
                }
                NodePtr arg = expr();
                if (accept(',')) {
                    throw ParseError("function '" + std::string(name) + "' takes exactly one argument", pos_ - 1);
                }
                expect(')');
                return make({Call{f, arg}});
            }
        }
        for (std::size_t i = 0; i < params_.size(); ++i) {
            if (params_[i] == name) {
                skip_ws();
                if (pos_ < text_.size() && text_[pos_] == '(') {
                    throw ParseError("parameter '" + std::string(name) + "' is not a function", pos_);
                }
                return make({Param{i}});
            }
        }
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }

    std::string_view text_;
    std::span<const std::string> params_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `text` against the parameter names. Throws ParseError.
inline Expr parse_expression(std::string_view text, std::span<const std::string> params) {
    return Expr(detail::Parser(text, params).parse());
}

/// Shortest decimal string that reads back to the same double.
inline std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), ptr);
}

/// Canonical fully parenthesized rendering; re-parses to an identical tree.
inline std::string to_string(const Node &node, std::span<const std::string> params) {
    return std::visit(
        [&](const auto &x) -> std::string {
            using N = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<N, Number>) {
                std::string s = format_double(x.value);
                return x.value < 0 || std::signbit(x.value) ? "(" + s + ")" : s;
            } else if constexpr (std::is_same_v<N, Param>) {
                return params[x.index];
            } else if constexpr (std::is_same_v<N, Negate>) {
                return "(-" + to_string(*x.arg, params) + ")";
            } else if constexpr (std::is_same_v<N, Binary>) {
                static constexpr std::array<char, 4> sym{'+', '-', '*', '/'};
                return "(" + to_string(*x.lhs, params) + " " + sym[static_cast<int>(x.op)] + " " +
                       to_string(*x.rhs, params) + ")";
            } else if constexpr (std::is_same_v<N, Power>) {
                return "(" + to_string(*x.base, params) + "^" + std::to_string(x.exponent) + ")";
            } else {
                return std::string(func_name(x.func)) + "(" + to_string(*x.arg, params) + ")";
            }
        },
        node.v);
}

inline std::string to_string(const Expr &e, std::span<const std::string> params) {
    return to_string(e.root(), params);
}

}  // namespace qcompat
