#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lsinf/jet.hpp"

namespace lsinf {

/* Expression grammar (see docs/grammar.ebnf for the authoritative copy):
 *
 *   expr    ::= term { ("+" | "-") term }                left-assoc
 *   term    ::= unary { ("*" | "/") unary }              left-assoc
 *   unary   ::= "-" unary | power
 *   power   ::= atom [ "^" exponent ]
 *   exponent::= integer | "(" [-] integer ")"
 *   atom    ::= number | ident | ident "(" expr ")" | "(" expr ")"
 *   ident   ::= letter { letter | digit }
 *   number  ::= digit { digit } [ "." { digit } ]
 *
 * Identifiers are either chart coordinates (x1..xk, y1..y_{n-k}) or the
 * function names exp, log, sin, cos, sqrt. "^" takes integer literal
 * exponents only; fractional powers must be spelled via exp/log.
 */

struct parse_error : std::runtime_error {
    std::size_t offset;
    std::string expected;
    parse_error(std::size_t off, const std::string& what, const std::string& exp)
        : std::runtime_error(what + " at offset " + std::to_string(off) +
                             (exp.empty() ? "" : " (expected " + exp + ")")),
          offset(off),
          expected(exp) {}
};

enum class FunKind { Exp, Log, Sin, Cos, Sqrt };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum Kind { Num, Var, Add, Sub, Mul, Div, Neg, Pow, Fun } kind;
    double num = 0.0;           // Num
    int var = -1;               // Var: index into the variable table
    std::string var_name;       // Var: name as written
    long exponent = 0;          // Pow
    FunKind fun = FunKind::Exp; // Fun
    ExprPtr a, b;
};

/// Immutable arithmetic expression over named chart coordinates.
class Expr {
public:
    Expr() = default;
    explicit Expr(ExprPtr n) : node_(std::move(n)) {}

    static Expr number(double v) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Num;
        n->num = v;
        return Expr(n);
    }
    static Expr var(int index, std::string name) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Var;
        n->var = index;
        n->var_name = std::move(name);
        return Expr(n);
    }
    static Expr fun(FunKind f, Expr arg) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Fun;
        n->fun = f;
        n->a = arg.node_;
        return Expr(n);
    }
    static Expr pow(Expr base, long e) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Pow;
        n->a = base.node_;
        n->exponent = e;
        return Expr(n);
    }

    friend Expr operator+(const Expr& a, const Expr& b) { return binary(ExprNode::Add, a, b); }
    friend Expr operator-(const Expr& a, const Expr& b) { return binary(ExprNode::Sub, a, b); }
    friend Expr operator*(const Expr& a, const Expr& b) { return binary(ExprNode::Mul, a, b); }
    friend Expr operator/(const Expr& a, const Expr& b) { return binary(ExprNode::Div, a, b); }
    Expr operator-() const {
        // fold literal negation so "-2.5" and Num(-2.5) are the same tree
        if (node_ && node_->kind == ExprNode::Num) return number(-node_->num);
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Neg;
        n->a = node_;
        return Expr(n);
    }

    bool empty() const { return node_ == nullptr; }
    const ExprNode& root() const { return *node_; }

    bool operator==(const Expr& o) const { return equal(node_.get(), o.node_.get()); }

    std::string print() const { return print_prec(node_.get(), 0); }

    /// Evaluate to a plain value.
    double value(const std::vector<double>& xs) const { return eval<double>(node_.get(), xs, 0); }

    /// Evaluate to a jet of the given order.
    Jet jet(const std::vector<double>& xs, int order) const {
        const JetSpace& sp = JetSpace::get(static_cast<int>(xs.size()), order);
        return eval<Jet>(node_.get(), xs, &sp);
    }

private:
    static Expr binary(ExprNode::Kind k, const Expr& a, const Expr& b) {
        auto n = std::make_shared<ExprNode>();
        n->kind = k;
        n->a = a.node_;
        n->b = b.node_;
        return Expr(n);
    }

    static bool equal(const ExprNode* a, const ExprNode* b) {
        if (a == b) return true;
        if (!a || !b || a->kind != b->kind) return false;
        switch (a->kind) {
            case ExprNode::Num: return a->num == b->num;
            case ExprNode::Var: return a->var_name == b->var_name;
            case ExprNode::Pow: return a->exponent == b->exponent && equal(a->a.get(), b->a.get());
            case ExprNode::Fun: return a->fun == b->fun && equal(a->a.get(), b->a.get());
            case ExprNode::Neg: return equal(a->a.get(), b->a.get());
            default: return equal(a->a.get(), b->a.get()) && equal(a->b.get(), b->b.get());
        }
    }

    // precedence levels: 0 add, 1 mul, 2 unary, 3 pow, 4 atom
    static std::string print_prec(const ExprNode* n, int parent) {
        std::string s;
        int prec = 4;
        switch (n->kind) {
            case ExprNode::Num: {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", n->num);
                s = buf;
                if (std::signbit(n->num)) prec = 2;
                break;
            }
            case ExprNode::Var: s = n->var_name; break;
            case ExprNode::Add:
                s = print_prec(n->a.get(), 0) + "+" + print_prec(n->b.get(), 1);
                prec = 0;
                break;
            case ExprNode::Sub:
                s = print_prec(n->a.get(), 0) + "-" + print_prec(n->b.get(), 1);
                prec = 0;
                break;
            case ExprNode::Mul:
                s = print_prec(n->a.get(), 1) + "*" + print_prec(n->b.get(), 2);
                prec = 1;
                break;
            case ExprNode::Div:
                s = print_prec(n->a.get(), 1) + "/" + print_prec(n->b.get(), 2);
                prec = 1;
                break;
            case ExprNode::Neg:
                s = "-" + print_prec(n->a.get(), 2);
                prec = 2;
                break;
            case ExprNode::Pow:
                s = print_prec(n->a.get(), 4) + "^" +
                    (n->exponent < 0 ? "(" + std::to_string(n->exponent) + ")"
                                     : std::to_string(n->exponent));
                prec = 3;
                break;
            case ExprNode::Fun: {
                static const char* names[] = {"exp", "log", "sin", "cos", "sqrt"};
                s = std::string(names[static_cast<int>(n->fun)]) + "(" + print_prec(n->a.get(), 0) + ")";
                break;
            }
        }
        if (prec < parent) return "(" + s + ")";
        return s;
    }

    template <typename T, typename Ctx>
    static T eval(const ExprNode* n, const std::vector<double>& xs, Ctx ctx) {
        switch (n->kind) {
            case ExprNode::Num: return make_const<T>(n->num, xs, ctx);
            case ExprNode::Var: return make_var<T>(n->var, xs, ctx);
            case ExprNode::Add: return eval<T>(n->a.get(), xs, ctx) + eval<T>(n->b.get(), xs, ctx);
            case ExprNode::Sub: return eval<T>(n->a.get(), xs, ctx) - eval<T>(n->b.get(), xs, ctx);
            case ExprNode::Mul: return eval<T>(n->a.get(), xs, ctx) * eval<T>(n->b.get(), xs, ctx);
            case ExprNode::Div: {
                T den = eval<T>(n->b.get(), xs, ctx);
                check_nonzero(den);
                return eval<T>(n->a.get(), xs, ctx) / den;
            }
            case ExprNode::Neg: return -eval<T>(n->a.get(), xs, ctx);
            case ExprNode::Pow: return pow_t(eval<T>(n->a.get(), xs, ctx), n->exponent);
            case ExprNode::Fun: {
                T u = eval<T>(n->a.get(), xs, ctx);
                switch (n->fun) {
                    case FunKind::Exp: return exp(u);
                    case FunKind::Log: check_positive(u, "log"); return log(u);
                    case FunKind::Sin: return sin(u);
                    case FunKind::Cos: return cos(u);
                    case FunKind::Sqrt: check_positive(u, "sqrt"); return sqrt(u);
                }
            }
        }
        throw std::logic_error("Expr: bad node");
    }

    template <typename T>
    static T make_const(double v, const std::vector<double>&, const JetSpace* sp) {
        return Jet::constant(*sp, v);
    }
    template <typename T>
    static T make_const(double v, const std::vector<double>&, int) {
        return v;
    }
    template <typename T>
    static T make_var(int idx, const std::vector<double>& xs, const JetSpace* sp) {
        return Jet::variable(*sp, idx, xs[idx]);
    }
    template <typename T>
    static T make_var(int idx, const std::vector<double>& xs, int) {
        return xs[idx];
    }

    static void check_nonzero(double v) {
        if (v == 0.0) throw eval_error("division by zero");
    }
    static void check_nonzero(const Jet&) {}  // recip() reports
    static void check_positive(double v, const char* fn) {
        if (!(v > 0.0)) throw eval_error(std::string(fn) + " of non-positive value");
    }
    static void check_positive(const Jet&, const char*) {}

    static double pow_t(double b, long e) {
        if (e < 0) {
            if (b == 0.0) throw eval_error("division by zero");
            return 1.0 / pow_t(b, -e);
        }
        double r = 1.0;
        while (e-- > 0) r *= b;
        return r;
    }
    static Jet pow_t(const Jet& b, long e) { return powi(b, e); }

    ExprPtr node_;
};

/// Maps identifier -> variable index. Charts provide one; tests can build
/// ad-hoc tables.
struct VarTable {
    std::vector<std::string> names;
    int find(const std::string& s) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == s) return static_cast<int>(i);
        return -1;
    }
};

namespace detail {

class Parser {
public:
    Parser(std::string_view text, const VarTable& vars) : s_(text), vars_(vars) {}

    Expr run() {
        if (s_.empty()) throw parse_error(0, "empty expression", "expression");
        Expr e = expr();
        skip_ws();
        if (pos_ != s_.size()) throw parse_error(pos_, "trailing input", "end of input");
        return e;
    }

private:
    Expr expr() {
        Expr e = term();
        for (;;) {
            skip_ws();
            if (peek() == '+') {
                ++pos_;
                e = e + term();
            } else if (peek() == '-') {
                ++pos_;
                e = e - term();
            } else {
                return e;
            }
        }
    }

    Expr term() {
        Expr e = unary();
        for (;;) {
            skip_ws();
            if (peek() == '*') {
                ++pos_;
                e = e * unary();
            } else if (peek() == '/') {
                ++pos_;
                e = e / unary();
            } else {
                return e;
            }
        }
    }

    Expr unary() {
        skip_ws();
        if (peek() == '-') {
            ++pos_;
            return -unary();
        }
        return power();
    }

    Expr power() {
        Expr base = atom();
        skip_ws();
        if (peek() == '^') {
            ++pos_;
            return Expr::pow(base, exponent());
        }
        return base;
    }

    long exponent() {
        skip_ws();
        bool paren = false, neg = false;
        if (peek() == '(') {
            paren = true;
            ++pos_;
            skip_ws();
        }
        if (peek() == '-') {
            neg = true;
            ++pos_;
        }
        if (!std::isdigit(peek())) throw parse_error(pos_, "bad exponent", "integer");
        long e = 0;
        while (std::isdigit(peek())) {
            e = e * 10 + (s_[pos_] - '0');
            if (e > 64) throw parse_error(pos_, "exponent too large", "integer |e| <= 64");
            ++pos_;
        }
        if (paren) {
            skip_ws();
            expect(')');
        }
        return neg ? -e : e;
    }

    Expr atom() {
        skip_ws();
        char c = peek();
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            skip_ws();
            expect(')');
            return e;
        }
        if (std::isdigit(c) || c == '.') return number();
        if (std::isalpha(c)) return ident();
        throw parse_error(pos_, "unexpected token", "number, identifier or '('");
    }

    Expr number() {
        std::size_t start = pos_;
        while (std::isdigit(peek())) ++pos_;
        if (peek() == '.') {
            ++pos_;
            while (std::isdigit(peek())) ++pos_;
        }
        if (pos_ == start) throw parse_error(pos_, "bad number", "digits");
        if (peek() == 'e' || peek() == 'E') {
            std::size_t mark = pos_;
            ++pos_;
            if (peek() == '+' || peek() == '-') ++pos_;
            if (!std::isdigit(peek()))
                pos_ = mark;  // not an exponent; leave it for the identifier lexer
            else
                while (std::isdigit(peek())) ++pos_;
        }
        return Expr::number(std::stod(std::string(s_.substr(start, pos_ - start))));
    }

    Expr ident() {
        std::size_t start = pos_;
        while (std::isalnum(peek()) || peek() == '_') ++pos_;
        std::string name(s_.substr(start, pos_ - start));
        skip_ws();
        if (peek() == '(') {
            FunKind f;
            if (name == "exp") f = FunKind::Exp;
            else if (name == "log") f = FunKind::Log;
            else if (name == "sin") f = FunKind::Sin;
            else if (name == "cos") f = FunKind::Cos;
            else if (name == "sqrt") f = FunKind::Sqrt;
            else throw parse_error(start, "unknown function '" + name + "'", "exp|log|sin|cos|sqrt");
            ++pos_;
            Expr arg = expr();
            skip_ws();
            expect(')');
            return Expr::fun(f, arg);
        }
        int idx = vars_.find(name);
        if (idx < 0) throw parse_error(start, "unknown identifier '" + name + "'", "chart coordinate");
        return Expr::var(idx, name);
    }

    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    void expect(char c) {
        if (peek() != c) throw parse_error(pos_, "unexpected token", std::string(1, c));
        ++pos_;
    }

    std::string_view s_;
    const VarTable& vars_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse_expr(std::string_view text, const VarTable& vars) {
    return detail::Parser(text, vars).run();
}

}  // namespace lsinf
