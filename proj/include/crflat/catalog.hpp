#pragma once

// Builtin hypersurface catalog: the classified flat families (in both their
// rational normal forms and the exponential/trigonometric forms they are
// derived from), the Fels-Kaup hypersurface, the light-cone tube, and
// non-flat negative controls.

#include "expr.hpp"
#include "odes.hpp"
#include "pq.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace crflat {

struct unknown_family : std::runtime_error { using std::runtime_error::runtime_error; };

enum class flat_expectation { flat, nonflat, unknown };

inline const char* to_string(flat_expectation e) {
    switch (e) {
        case flat_expectation::flat: return "flat";
        case flat_expectation::nonflat: return "nonflat";
        default: return "unknown";
    }
}

struct param_schema {
    std::string name;
    double min_value, max_value;  // open interval
    double default_value;
};

struct hypersurface_spec {
    std::string name;
    expr_domain form = expr_domain::tube;
    std::string expr_text;                              // graphing function
    std::optional<std::pair<std::string, std::string>> pq;  // profile-backed tube
    std::vector<std::string> guards;                    // must stay >= margin in |.|
    std::map<std::string, double> params;               // resolved values
    flat_expectation expected = flat_expectation::unknown;
};

struct family_info {
    std::string name;
    expr_domain form;
    std::vector<param_schema> params;
    bool accepts_gauge;  // rigid families take an optional polynomial gauge u0..u4
    flat_expectation expected;
    std::string description;
};

namespace detail {

inline std::string fmt(double x) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    std::string s(buf, p);
    if (x < 0) return "(" + s + ")";
    return s;
}

// complex literal (a + b i) printed in grammar syntax
inline std::string fmt_c(double re, double im) {
    std::string s = "(" + fmt(re);
    s += im < 0 ? "-" : "+";
    s += fmt(std::abs(im)) + "*i)";
    return s;
}

} // namespace detail

inline const std::vector<family_info>& list_families() {
    static const double pi = 3.14159265358979323846;
    static const std::vector<family_info> fams = {
        {"thm54_i", expr_domain::tube,
         {{"D", 0, std::numeric_limits<double>::infinity(), 1.0}},
         false, flat_expectation::flat,
         "flat tube 2*t1^2/(t2+D); tube form of classified family (i)"},
        {"thm54_ii", expr_domain::rigid,
         {{"D", 0, 1, 0.5}},
         true, flat_expectation::flat,
         "classified flat rigid family (ii), rational form"},
        {"thm54_iii", expr_domain::rigid,
         {{"D", 0, pi / 2, pi / 4}},
         true, flat_expectation::flat,
         "classified flat rigid family (iii), rational form"},
        {"thm54_ii_exp", expr_domain::rigid,
         {{"D", 0, 1, 0.5}},
         true, flat_expectation::flat,
         "family (ii) before the substitution removing the exponentials"},
        {"thm54_iii_trig", expr_domain::rigid,
         {{"D", 0, pi / 2, pi / 4}},
         true, flat_expectation::flat,
         "family (iii) before the substitution removing the trigonometric functions"},
        {"fk", expr_domain::rigid,
         {},
         true, flat_expectation::flat,
         "Fels-Kaup flat rigid hypersurface"},
        {"lightcone_tube", expr_domain::tube,
         {},
         false, flat_expectation::flat,
         "tube over the future light cone, graphed over a base point"},
        {"pq_generic", expr_domain::tube,
         {},
         false, flat_expectation::nonflat,
         "Monge-Ampere solution from profile p = v^2/2 + v^4, q = v; not flat"},
        {"perturbed_i", expr_domain::tube,
         {{"D", 0, std::numeric_limits<double>::infinity(), 1.0}},
         false, flat_expectation::nonflat,
         "family (i) plus 0.1*t1^4; breaks the rank-1 condition off t1 = 0"},
    };
    return fams;
}

inline const family_info& family_schema(const std::string& name) {
    for (const auto& f : list_families())
        if (f.name == name) return f;
    throw unknown_family("unknown family '" + name + "'");
}

inline hypersurface_spec make_family(const std::string& name,
                                     const std::map<std::string, double>& params = {}) {
    const family_info& info = family_schema(name);

    // resolve declared parameters against the schema
    std::map<std::string, double> resolved;
    std::array<double, 5> gauge{};
    bool has_gauge = false;
    for (const auto& [k, v] : params) {
        if (info.accepts_gauge && k.size() == 2 && k[0] == 'u' && k[1] >= '0' && k[1] <= '4') {
            if (std::abs(v) > 1) throw param_out_of_range("gauge coefficient " + k + " must lie in [-1, 1]");
            gauge[std::size_t(k[1] - '0')] = v;
            has_gauge = true;
            continue;
        }
        bool known = false;
        for (const auto& schema : info.params) {
            if (schema.name != k) continue;
            if (!(v > schema.min_value && v < schema.max_value))
                throw param_out_of_range("parameter " + k + " = " + std::to_string(v) +
                                         " outside (" + std::to_string(schema.min_value) + ", " +
                                         std::to_string(schema.max_value) + ") for " + name);
            resolved[k] = v;
            known = true;
        }
        if (!known) throw param_out_of_range("family " + name + " has no parameter '" + k + "'");
    }
    for (const auto& schema : info.params)
        if (!resolved.count(schema.name)) resolved[schema.name] = schema.default_value;

    hypersurface_spec spec;
    spec.name = name;
    spec.form = info.form;
    spec.expected = info.expected;
    spec.params = resolved;

    using detail::fmt;
    if (name == "thm54_i") {
        const double D = resolved.at("D");
        spec.expr_text = "2*t1^2/(t2+" + fmt(D) + ")";
        spec.guards = {"t2+" + fmt(D)};
    } else if (name == "thm54_ii") {
        const double D = resolved.at("D");
        const std::string a2 = "((z2+1)*(z2b+1))";  // |z2+1|^2
        spec.expr_text = "(z1^2 + 2*" + fmt(std::sqrt(D)) + "*z1*z1b*" + a2 + " + z1b^2)/(1 - " +
                         fmt(D) + "*" + a2 + "^2)";
        spec.guards = {"1 - " + fmt(D) + "*" + a2 + "^2"};
    } else if (name == "thm54_iii") {
        const double D = resolved.at("D");
        const std::string eid = detail::fmt_c(std::cos(D), std::sin(D));
        const std::string emid = detail::fmt_c(std::cos(D), -std::sin(D));
        const std::string den = "(" + eid + "*(z2+1)^2 + " + emid + "*(z2b+1)^2)";
        spec.expr_text = "(i*(" + eid + "*(z2+1)^2 - " + emid +
                         "*(z2b+1)^2)*(z1^2+z1b^2) - 4*z1*z1b*(z2+1)*(z2b+1))/" + den;
        spec.guards = {den};
    } else if (name == "thm54_ii_exp") {
        const double D = resolved.at("D");
        spec.expr_text = "(z1^2 + 2*" + fmt(std::sqrt(D)) +
                         "*exp(z2+z2b)*z1*z1b + z1b^2)/(1 - " + fmt(D) + "*exp(2*(z2+z2b)))";
        spec.guards = {"1 - " + fmt(D) + "*exp(2*(z2+z2b))"};
    } else if (name == "thm54_iii_trig") {
        const double D = resolved.at("D");
        spec.expr_text = "(sin(z2+z2b+" + fmt(D) + ")*(z1^2+z1b^2) + 2*z1*z1b)/cos(z2+z2b+" +
                         fmt(D) + ")";
        spec.guards = {"cos(z2+z2b+" + fmt(D) + ")"};
    } else if (name == "fk") {
        spec.expr_text = "z1*z1b/(1-z2*z2b) + z2b*z1^2/(2*(1-z2*z2b)) + z2*z1b^2/(2*(1-z2*z2b))";
        spec.guards = {"1-z2*z2b"};
    } else if (name == "lightcone_tube") {
        // level set graphed over a base point, affine part removed
        spec.expr_text = "sqrt(t1^2+(1+t2)^2)-1-t2";
        spec.guards = {"t1^2+(1+t2)^2"};
    } else if (name == "pq_generic") {
        spec.pq = {{"v^2/2 + v^4", "v"}};
    } else if (name == "perturbed_i") {
        const double D = resolved.at("D");
        spec.expr_text = "2*t1^2/(t2+" + fmt(D) + ") + 0.1*t1^4";
        spec.guards = {"t2+" + fmt(D)};
    }

    if (has_gauge) {
        std::string u = fmt(gauge[0]), ub = fmt(gauge[0]);
        for (int k = 1; k <= 4; ++k) {
            if (gauge[std::size_t(k)] == 0) continue;
            u += "+" + fmt(gauge[std::size_t(k)]) + "*z2^" + std::to_string(k);
            ub += "+" + fmt(gauge[std::size_t(k)]) + "*z2b^" + std::to_string(k);
        }
        spec.expr_text = "(" + spec.expr_text + ") + (" + u + ")*z1^2 + (" + ub + ")*z1b^2";
    }
    return spec;
}

} // namespace crflat
