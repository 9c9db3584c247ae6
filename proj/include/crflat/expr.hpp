#pragma once

// Graphing-function expressions: parsing and jet evaluation.
//
// Grammar (whitespace-insensitive):
//   expr   := term { ("+"|"-") term }
//   term   := factor { ("*"|"/") factor }
//   factor := "-" factor | power
//   power  := atom [ "^" factor ]          exponent must fold to a literal
//   atom   := number | "i" | "pi" | ident | ident "(" expr ")" | "(" expr ")"
//
// Variables depend on the domain: (t1, t2) for tubes, (z1, z1b, z2, z2b)
// for rigid graphing functions, (v) for one-variable profiles. The literal
// "i" exists only in the rigid domain.

#include "jet.hpp"

#include <charconv>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace crflat {

enum class expr_domain { tube, rigid, profile };

inline const std::vector<std::string>& domain_vars(expr_domain d) {
    static const std::vector<std::string> tube{"t1", "t2"};
    static const std::vector<std::string> rigid{"z1", "z1b", "z2", "z2b"};
    static const std::vector<std::string> profile{"v"};
    switch (d) {
        case expr_domain::tube: return tube;
        case expr_domain::rigid: return rigid;
        default: return profile;
    }
}

struct parse_error : std::runtime_error {
    parse_error(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
    std::size_t position;
};
struct syntax_error : parse_error { using parse_error::parse_error; };
struct unknown_variable : parse_error { using parse_error::parse_error; };
struct unknown_function : parse_error { using parse_error::parse_error; };
struct domain_mix : parse_error { using parse_error::parse_error; };

// Evaluation failure tagged with the source position of the offending node.
struct eval_error : std::runtime_error {
    enum class cause { division, branch_cut, other };
    eval_error(const std::string& msg, std::size_t pos, cause c)
        : std::runtime_error(msg + " (expression position " + std::to_string(pos) + ")"),
          position(pos), why(c) {}
    std::size_t position;
    cause why;
};

enum class func_id { f_exp, f_log, f_sin, f_cos, f_tan, f_sqrt };

struct ast_node {
    enum class kind { literal, variable, neg, add, sub, mul, div, pow_int, pow_real, call };

    kind k;
    std::size_t pos = 0;
    std::complex<double> lit;
    int var = -1;
    func_id func = func_id::f_exp;
    int ipow = 0;
    double rpow = 0;
    std::unique_ptr<ast_node> lhs, rhs;

    std::unique_ptr<ast_node> clone() const {
        auto n = std::make_unique<ast_node>();
        n->k = k; n->pos = pos; n->lit = lit; n->var = var;
        n->func = func; n->ipow = ipow; n->rpow = rpow;
        if (lhs) n->lhs = lhs->clone();
        if (rhs) n->rhs = rhs->clone();
        return n;
    }
};

struct expr_ast {
    expr_domain domain = expr_domain::tube;
    std::string source;
    std::unique_ptr<ast_node> root;

    expr_ast() = default;
    expr_ast(expr_ast&&) = default;
    expr_ast& operator=(expr_ast&&) = default;
    expr_ast(const expr_ast& o) : domain(o.domain), source(o.source),
                                  root(o.root ? o.root->clone() : nullptr) {}
    expr_ast& operator=(const expr_ast& o) {
        domain = o.domain; source = o.source;
        root = o.root ? o.root->clone() : nullptr;
        return *this;
    }
};

namespace detail {

struct lexer {
    std::string_view src;
    std::size_t at = 0;

    void skip_ws() {
        while (at < src.size() && (src[at] == ' ' || src[at] == '\t' || src[at] == '\n' || src[at] == '\r'))
            ++at;
    }
    char peek() {
        skip_ws();
        return at < src.size() ? src[at] : '\0';
    }
    bool eat(char c) {
        if (peek() == c) { ++at; return true; }
        return false;
    }
};

inline double parse_number(lexer& lx) {
    lx.skip_ws();
    const std::size_t start = lx.at;
    while (lx.at < lx.src.size() && (std::isdigit((unsigned char)lx.src[lx.at]) || lx.src[lx.at] == '.'))
        ++lx.at;
    if (lx.at < lx.src.size() && (lx.src[lx.at] == 'e' || lx.src[lx.at] == 'E')) {
        std::size_t e = lx.at + 1;
        if (e < lx.src.size() && (lx.src[e] == '+' || lx.src[e] == '-')) ++e;
        if (e < lx.src.size() && std::isdigit((unsigned char)lx.src[e])) {
            ++e;
            while (e < lx.src.size() && std::isdigit((unsigned char)lx.src[e])) ++e;
            lx.at = e;
        }
    }
    double value = 0;
    const auto* first = lx.src.data() + start;
    const auto* last = lx.src.data() + lx.at;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw syntax_error("malformed number", start);
    return value;
}

struct parser {
    lexer lx;
    expr_domain domain;

    std::unique_ptr<ast_node> make(ast_node::kind k, std::size_t pos) {
        auto n = std::make_unique<ast_node>();
        n->k = k;
        n->pos = pos;
        return n;
    }
    std::unique_ptr<ast_node> literal(std::complex<double> v, std::size_t pos) {
        auto n = make(ast_node::kind::literal, pos);
        n->lit = v;
        return n;
    }

    // constant arithmetic folds so that printed literals reparse to literals
    std::unique_ptr<ast_node> binary(ast_node::kind k, std::size_t pos,
                                     std::unique_ptr<ast_node> a, std::unique_ptr<ast_node> b) {
        if (a->k == ast_node::kind::literal && b->k == ast_node::kind::literal) {
            std::complex<double> v;
            switch (k) {
                case ast_node::kind::add: v = a->lit + b->lit; break;
                case ast_node::kind::sub: v = a->lit - b->lit; break;
                case ast_node::kind::mul: v = a->lit * b->lit; break;
                default: v = b->lit == std::complex<double>(0) ? std::complex<double>(
                                 std::numeric_limits<double>::infinity())
                                                               : a->lit / b->lit;
            }
            if (std::isfinite(v.real()) && std::isfinite(v.imag()))
                return literal(v, a->pos);
        }
        auto n = make(k, pos);
        n->lhs = std::move(a);
        n->rhs = std::move(b);
        return n;
    }

    std::unique_ptr<ast_node> expression() {
        auto a = term();
        while (true) {
            const std::size_t pos = lx.at;
            if (lx.eat('+')) a = binary(ast_node::kind::add, pos, std::move(a), term());
            else if (lx.eat('-')) a = binary(ast_node::kind::sub, pos, std::move(a), term());
            else return a;
        }
    }

    std::unique_ptr<ast_node> term() {
        auto a = factor();
        while (true) {
            const std::size_t pos = lx.at;
            if (lx.eat('*')) a = binary(ast_node::kind::mul, pos, std::move(a), factor());
            else if (lx.eat('/')) a = binary(ast_node::kind::div, pos, std::move(a), factor());
            else return a;
        }
    }

    std::unique_ptr<ast_node> factor() {
        const std::size_t pos = lx.at;
        if (lx.eat('-')) {
            auto inner = factor();
            if (inner->k == ast_node::kind::literal) {   // fold -literal
                inner->lit = -inner->lit;
                return inner;
            }
            auto n = make(ast_node::kind::neg, pos);
            n->lhs = std::move(inner);
            return n;
        }
        return power();
    }

    std::unique_ptr<ast_node> power() {
        auto base = atom();
        const std::size_t pos = lx.at;
        if (!lx.eat('^')) return base;
        auto ex = factor();
        if (ex->k != ast_node::kind::literal)
            throw syntax_error("exponent must be a numeric literal", ex->pos);
        if (std::abs(ex->lit.imag()) > 0)
            throw syntax_error("exponent must be real", ex->pos);
        const double e = ex->lit.real();
        if (base->k == ast_node::kind::literal) {        // fold literal^literal
            if (std::abs(base->lit.imag()) > 0)
                throw syntax_error("complex base with '^' is not supported", base->pos);
            const double folded = std::pow(base->lit.real(), e);
            if (!std::isfinite(folded))
                throw syntax_error("literal power does not evaluate to a finite number", base->pos);
            return literal(folded, base->pos);
        }
        const double r = std::round(e);
        if (std::abs(e - r) < 1e-9 && std::abs(r) <= 64) {
            auto n = make(ast_node::kind::pow_int, pos);
            n->ipow = int(r);
            n->lhs = std::move(base);
            return n;
        }
        auto n = make(ast_node::kind::pow_real, pos);
        n->rpow = e;
        n->lhs = std::move(base);
        return n;
    }

    std::unique_ptr<ast_node> atom() {
        const std::size_t pos = lx.at;
        const char c = lx.peek();
        if (c == '(') {
            lx.eat('(');
            auto inner = expression();
            if (!lx.eat(')')) throw syntax_error("expected ')'", lx.at);
            return inner;
        }
        if (std::isdigit((unsigned char)c) || c == '.')
            return literal(parse_number(lx), pos);
        if (std::isalpha((unsigned char)c)) {
            std::string id;
            lx.skip_ws();
            while (lx.at < lx.src.size() &&
                   (std::isalnum((unsigned char)lx.src[lx.at]) || lx.src[lx.at] == '_'))
                id += lx.src[lx.at++];
            return ident(id, pos);
        }
        throw syntax_error(c == '\0' ? "unexpected end of expression"
                                     : std::string("unexpected character '") + c + "'", pos);
    }

    std::unique_ptr<ast_node> ident(const std::string& id, std::size_t pos) {
        static const std::map<std::string, func_id> funcs = {
            {"exp", func_id::f_exp}, {"log", func_id::f_log}, {"sin", func_id::f_sin},
            {"cos", func_id::f_cos}, {"tan", func_id::f_tan}, {"sqrt", func_id::f_sqrt}};
        if (auto it = funcs.find(id); it != funcs.end()) {
            if (!lx.eat('(')) throw syntax_error("expected '(' after function name", lx.at);
            auto n = make(ast_node::kind::call, pos);
            n->func = it->second;
            n->lhs = expression();
            if (!lx.eat(')')) throw syntax_error("expected ')'", lx.at);
            return n;
        }
        if (id == "pi") return literal(3.14159265358979323846, pos);
        if (id == "i") {
            if (domain != expr_domain::rigid)
                throw domain_mix("imaginary literal 'i' is only valid for rigid expressions", pos);
            return literal(std::complex<double>(0, 1), pos);
        }
        const auto& vars = domain_vars(domain);
        for (int v = 0; v < int(vars.size()); ++v) {
            if (vars[std::size_t(v)] == id) {
                auto n = make(ast_node::kind::variable, pos);
                n->var = v;
                return n;
            }
        }
        // a variable of one of the other domains is a domain mix, anything
        // else is simply unknown
        for (auto other : {expr_domain::tube, expr_domain::rigid, expr_domain::profile}) {
            if (other == domain) continue;
            for (const auto& name : domain_vars(other))
                if (name == id)
                    throw domain_mix("variable '" + id + "' does not belong to this domain", pos);
        }
        if (lx.peek() == '(')
            throw unknown_function("unknown function '" + id + "'", pos);
        throw unknown_variable("unknown variable '" + id + "'", pos);
    }
};

} // namespace detail

inline expr_ast parse(std::string_view text, expr_domain domain) {
    if (text.empty()) throw syntax_error("empty expression", 0);
    detail::parser p{{text, 0}, domain};
    expr_ast ast;
    ast.domain = domain;
    ast.source = std::string(text);
    ast.root = p.expression();
    p.lx.skip_ws();
    if (p.lx.at != text.size())
        throw syntax_error("trailing input after expression", p.lx.at);
    return ast;
}

namespace detail {

inline void print_literal(std::string& out, std::complex<double> v) {
    char buf[40];
    auto fmt = [&](double x) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
        (void)ec;
        return std::string(buf, p);
    };
    if (v.imag() == 0) {
        if (v.real() < 0) out += "(" + fmt(v.real()) + ")";
        else out += fmt(v.real());
    } else {
        out += "(";
        out += fmt(v.real());
        out += v.imag() < 0 ? "-" : "+";
        out += fmt(std::abs(v.imag()));
        out += "*i)";
    }
}

inline void print_node(std::string& out, const ast_node& n, const std::vector<std::string>& vars) {
    using k = ast_node::kind;
    switch (n.k) {
        case k::literal: print_literal(out, n.lit); break;
        case k::variable: out += vars[std::size_t(n.var)]; break;
        case k::neg:
            out += "(-";
            print_node(out, *n.lhs, vars);
            out += ")";
            break;
        case k::add: case k::sub: case k::mul: case k::div: {
            const char op = n.k == k::add ? '+' : n.k == k::sub ? '-' : n.k == k::mul ? '*' : '/';
            out += "(";
            print_node(out, *n.lhs, vars);
            out += op;
            print_node(out, *n.rhs, vars);
            out += ")";
            break;
        }
        case k::pow_int: case k::pow_real: {
            out += "(";
            print_node(out, *n.lhs, vars);
            out += "^";
            if (n.k == k::pow_int) out += std::to_string(n.ipow);
            else print_literal(out, n.rpow);
            out += ")";
            break;
        }
        case k::call: {
            static const char* names[] = {"exp", "log", "sin", "cos", "tan", "sqrt"};
            out += names[int(n.func)];
            out += "(";
            print_node(out, *n.lhs, vars);
            out += ")";
            break;
        }
    }
}

} // namespace detail

inline std::string print(const expr_ast& ast) {
    std::string out;
    detail::print_node(out, *ast.root, domain_vars(ast.domain));
    return out;
}

/// AST of the conjugate function: paired variables swapped, literals
/// conjugated. Rigid domain only.
inline expr_ast ast_conjugate(const expr_ast& ast) {
    if (ast.domain != expr_domain::rigid)
        throw domain_mix("ast_conjugate needs a rigid-domain expression", 0);
    expr_ast out = ast;
    auto walk = [](auto&& self, ast_node& n) -> void {
        if (n.k == ast_node::kind::literal) n.lit = std::conj(n.lit);
        if (n.k == ast_node::kind::variable) n.var ^= 1;  // z1<->z1b, z2<->z2b
        if (n.lhs) self(self, *n.lhs);
        if (n.rhs) self(self, *n.rhs);
    };
    walk(walk, *out.root);
    out.source = print(out);
    return out;
}

namespace detail {

template <class S>
jet<S> eval_node(const ast_node& n, const std::vector<jet<S>>& seeds, int order, int nvars) {
    using k = ast_node::kind;
    try {
        switch (n.k) {
            case k::literal:
                if constexpr (std::is_same_v<S, double>) {
                    if (n.lit.imag() != 0)
                        throw eval_error("complex literal in a real domain", n.pos,
                                         eval_error::cause::other);
                    return jet<S>::constant(n.lit.real(), order, nvars);
                } else {
                    return jet<S>::constant(S(n.lit), order, nvars);
                }
            case k::variable: return seeds[std::size_t(n.var)];
            case k::neg: return -eval_node(*n.lhs, seeds, order, nvars);
            case k::add: return eval_node(*n.lhs, seeds, order, nvars) + eval_node(*n.rhs, seeds, order, nvars);
            case k::sub: return eval_node(*n.lhs, seeds, order, nvars) - eval_node(*n.rhs, seeds, order, nvars);
            case k::mul: return eval_node(*n.lhs, seeds, order, nvars) * eval_node(*n.rhs, seeds, order, nvars);
            case k::div: return eval_node(*n.lhs, seeds, order, nvars) / eval_node(*n.rhs, seeds, order, nvars);
            case k::pow_int: return powi(eval_node(*n.lhs, seeds, order, nvars), n.ipow);
            case k::pow_real: return pow(eval_node(*n.lhs, seeds, order, nvars), n.rpow);
            case k::call: {
                auto a = eval_node(*n.lhs, seeds, order, nvars);
                switch (n.func) {
                    case func_id::f_exp: return exp(a);
                    case func_id::f_log: return log(a);
                    case func_id::f_sin: return sin(a);
                    case func_id::f_cos: return cos(a);
                    case func_id::f_tan: return tan(a);
                    case func_id::f_sqrt: return sqrt(a);
                }
                throw eval_error("bad function id", n.pos, eval_error::cause::other);
            }
        }
        throw eval_error("bad node kind", n.pos, eval_error::cause::other);
    } catch (const division_by_singular_jet& e) {
        throw eval_error(e.what(), n.pos, eval_error::cause::division);
    } catch (const branch_cut_violation& e) {
        throw eval_error(e.what(), n.pos, eval_error::cause::branch_cut);
    }
}

} // namespace detail

template <class S>
jet<S> eval_ast(const expr_ast& ast, std::span<const S> point, int order) {
    const int nvars = int(domain_vars(ast.domain).size());
    if (int(point.size()) != nvars)
        throw jet_shape_error("eval_ast: point size does not match the domain");
    std::vector<jet<S>> seeds;
    seeds.reserve(std::size_t(nvars));
    for (int v = 0; v < nvars; ++v)
        seeds.push_back(jet<S>::seed(point, v, order, nvars));
    return detail::eval_node<S>(*ast.root, seeds, order, nvars);
}

inline rjet eval_tube(const expr_ast& ast, double t1, double t2, int order) {
    const double pt[2] = {t1, t2};
    return eval_ast<double>(ast, pt, order);
}

inline rjet eval_profile(const expr_ast& ast, double v, int order) {
    const double pt[1] = {v};
    return eval_ast<double>(ast, pt, order);
}

/// Conjugate variables are seeded implicitly: z1b = conj(z1), z2b = conj(z2).
inline cjet eval_rigid(const expr_ast& ast, std::complex<double> z1, std::complex<double> z2,
                       int order) {
    const std::complex<double> pt[4] = {z1, std::conj(z1), z2, std::conj(z2)};
    return eval_ast<std::complex<double>>(ast, pt, order);
}

} // namespace crflat
