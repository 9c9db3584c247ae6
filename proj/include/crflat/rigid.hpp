#pragma once

// Pointwise invariants of rigid graphing functions F(z1, z1b, z2, z2b):
// the complex S = (F_12b/F_11b)_1 chain, J and W, the complex Monge-Ampere
// and complex Monge residuals, the S1/S1b degeneracy residual, and the
// third-derivative structural residual of (F_11b)^(-2/3).

#include "expr.hpp"
#include "jet.hpp"
#include "tube.hpp"

#include <array>
#include <complex>
#include <optional>

namespace crflat {

struct reality_violated : std::runtime_error { using std::runtime_error::runtime_error; };
struct non_positive_r : std::runtime_error { using std::runtime_error::runtime_error; };

struct rigid_report {
    using cplx = std::complex<double>;

    std::array<cplx, 2> point{};  // z1, z2
    cplx S{}, S1{}, S1bar{}, S11{}, S111{};
    bool has_s111 = true;
    cplx ratio{};  // F_12b/F_11b at the point
    std::optional<cplx> J, W;
    double j_scaled = 0, w_scaled = 0;
    residual_pair cma, cmonge;
    double s1_max = 0;      // max(|S1|, |S1bar|)
    double polystruct = 0;  // |d^3/dz1^3 (F_11b)^(-2/3)|
    double reality = 0;     // |Im F| at the point
    surface_predicates predicates;
    surface_flags flags;
    surface_label label = surface_label::out_of_domain;
};

namespace detail {

inline cjet rigid_f_jet(const expr_ast& F, std::complex<double> z1, std::complex<double> z2,
                        int order) {
    if (F.domain != expr_domain::rigid)
        throw domain_mix("rigid invariants need a rigid-domain expression", 0);
    return eval_rigid(F, z1, z2, order);
}

// |d^3/dz1^3 (F_11b)^(-2/3)| from the jet of F; F_11b must be positive
inline double polystruct_from_jet(const cjet& f, const tol_profile& tol) {
    cjet f11b = f.derivative(0).derivative(1);
    if (std::abs(f11b.value()) < tol.hessian_tol)
        throw hessian_degenerate("F_11b vanishes at the evaluation point");
    const cjet g = pow(f11b, -2.0 / 3.0);
    return std::abs(g.derivative(0).derivative(0).derivative(0).value());
}

} // namespace detail

/// Rigid analogue of tube_invariants. The sign normalization F -> -F is
/// applied (and flagged) when F_11b < 0 at the point; it changes none of the
/// reported ratios or invariants but restores the normalization the explicit
/// formulas assume.
inline rigid_report rigid_invariants(const expr_ast& F, std::complex<double> z1,
                                     std::complex<double> z2, const tol_profile& tol = {},
                                     int order = 6) {
    using cplx = std::complex<double>;
    if (order < 5 || order > max_jet_order)
        throw jet_shape_error("rigid_invariants: order must be in [5, 8]");

    rigid_report rep;
    rep.point = {z1, z2};

    cjet f = detail::rigid_f_jet(F, z1, z2, order);
    rep.reality = std::abs(f.value().imag());
    if (rep.reality > tol.reality_tol)
        throw reality_violated("graphing function is not real-valued at the point");

    cjet f11b = f.derivative(0).derivative(1);
    if (std::abs(f11b.value()) < tol.hessian_tol)
        throw hessian_degenerate("F_11b vanishes at the evaluation point");
    if (f11b.value().real() < 0) {
        f = -f;
        f11b = -f11b;
        rep.flags.sign_flip_applied = true;
    }
    rep.predicates.hessian_positive = true;

    const cjet f1 = f.derivative(0);
    const cjet f12b = f1.derivative(3);
    const cjet f111b = f11b.derivative(0);
    const cplx F11b = f11b.value();
    const cplx F12b = f12b.value();
    const cplx F21b = f.derivative(2).derivative(1).value();
    const cplx F22b = f.derivative(2).derivative(3).value();
    const cplx B2 = f111b.derivative(0).value();                  // F_111_1b
    const cplx B3 = f111b.derivative(0).derivative(0).value();    // F_1111_1b

    rep.cma = detail::scaled_residual(
        F11b * F22b - F12b * F21b,
        std::array<cplx, 2>{F11b * F22b, F12b * F21b});
    rep.predicates.levi_rank1 = rep.cma.scaled < tol.flat_tol;

    const cplx B1 = f111b.value();
    rep.cmonge = detail::scaled_residual(
        cplx(9) * B3 * F11b * F11b - cplx(45) * B2 * B1 * F11b + cplx(40) * B1 * B1 * B1,
        std::array<cplx, 3>{cplx(9) * B3 * F11b * F11b, cplx(45) * B2 * B1 * F11b,
                            cplx(40) * B1 * B1 * B1});

    rep.polystruct = detail::polystruct_from_jet(f, tol);

    const cjet ratio = f12b / f11b.truncated(f12b.order());
    const cjet S_jet = ratio.derivative(0);
    rep.ratio = ratio.value();
    rep.S = S_jet.value();

    if (std::abs(rep.S) < tol.s_tol) {
        rep.predicates.two_nondegenerate = false;
        rep.label = classify(rep.predicates, rep.flags, false, 0, 0, tol);
        return rep;
    }
    rep.predicates.two_nondegenerate = true;

    const cjet S1_jet = S_jet.derivative(0);
    const cjet S11_jet = S1_jet.derivative(0);
    rep.S1 = S1_jet.value();
    rep.S1bar = S_jet.derivative(1).value();
    rep.S11 = S11_jet.value();
    rep.has_s111 = order >= 6;
    if (rep.has_s111) rep.S111 = S11_jet.derivative(0).value();
    rep.s1_max = std::max(std::abs(rep.S1), std::abs(rep.S1bar));

    const cjet A_jet = f111b / f11b.truncated(f111b.order());
    const cjet A1_jet = A_jet.derivative(0);
    const cplx A = A_jet.value(), A1 = A1_jet.value(), A11 = A1_jet.derivative(0).value();

    if (std::abs(rep.S1) > tol.sing_tol) {
        auto [J, js] = detail::j_full(rep.S, rep.S1, rep.S11, rep.S111, rep.has_s111, A, A1, A11);
        rep.J = J;
        rep.j_scaled = js;
        rep.flags.s111_term_dropped = !rep.has_s111;
    } else if (!rep.has_s111 || std::abs(rep.S111) <= tol.sing_tol) {
        auto [J, js] = detail::j_reduced(A, A1, A11);
        rep.J = J;
        rep.j_scaled = js;
        rep.flags.j_reduced_formula_used = true;
        rep.flags.s111_term_dropped = !rep.has_s111;
    } else {
        rep.flags.j_singular = true;
    }

    // W mixes the conjugate-function chain, obtained from the S jet itself
    {
        const cjet Sbar_jet = conj_jet(S_jet);
        const cjet Sb1_jet = Sbar_jet.derivative(0);
        const cplx Sb = Sbar_jet.value();
        const cplx Sb1 = Sb1_jet.value();
        const cplx Sb1b = Sbar_jet.derivative(1).value();
        const cplx Sb2 = Sbar_jet.derivative(2).value();
        const cplx Sb11b = Sb1_jet.derivative(1).value();
        const cplx Sb21b = Sbar_jet.derivative(2).derivative(1).value();
        const cplx rw = F21b / F11b;

        const cplx U1 = cplx(2.0 / 3.0) * Sb1 / Sb;
        const cplx U2 = cplx(2.0 / 3.0) * rep.S1 / rep.S;
        const cplx U3 = Sb1b / (cplx(3) * Sb * Sb * Sb) * (rw * Sb1 - Sb2);
        const cplx U4 = -cplx(1) / (cplx(3) * Sb * Sb) * (rw * Sb11b - Sb21b);
        rep.W = U1 + U2 + U3 + U4;
        rep.w_scaled = std::abs(*rep.W) /
                       (1 + std::abs(U1) + std::abs(U2) + std::abs(U3) + std::abs(U4));
    }

    rep.label = classify(rep.predicates, rep.flags, rep.J.has_value(), rep.j_scaled,
                         rep.w_scaled, tol);
    rep.predicates.flat = rep.label == surface_label::flat;
    return rep;
}

/// Structural residual of the triple z1-integral of the complex Monge
/// equation: |d^3/dz1^3 (F_11b)^(-2/3)| at the point. Vanishes exactly when
/// F solves the complex Monge equation near the point.
inline double polystruct_residual(const expr_ast& F, std::complex<double> z1,
                                  std::complex<double> z2, const tol_profile& tol = {},
                                  int order = 6) {
    cjet f = detail::rigid_f_jet(F, z1, z2, order);
    const cjet f11b = f.derivative(0).derivative(1);
    if (std::abs(f11b.value()) < tol.hessian_tol)
        throw hessian_degenerate("F_11b vanishes at the evaluation point");
    if (f11b.value().real() < 0) f = -f;  // sign flip first
    return detail::polystruct_from_jet(f, tol);
}

// ---------------------------------------------------------------------------
// Special-form profiles F = r|z1|^2 + (t+u) z1^2 + conj(t+u) z1b^2 with
// r, t functions of (z2, z2b) and u a holomorphic gauge in z2.

struct spec_form_profile {
    expr_ast r;                   // rigid domain, z2/z2b only, real-valued
    expr_ast t;                   // rigid domain, z2/z2b only
    std::optional<expr_ast> u;    // rigid domain, z2 only
};

struct spec_form_residuals {
    double ma_full = 0;       // |r r_22b - |r_2|^2 - 4 |t_2b|^2|
    double ma_cross = 0;      // |r t_22b - 2 r_2 t_2b|
    double r_value = 0;
    double t2b_abs = 0;
    double reltr = 0;         // |t_2b - r^2/2|
    double shortsys = 0;      // |r r_22b - |r_2|^2 - r^4|
    double liouville = 0;     // |Delta(ln r) - 4 r^2|
    bool reltr_holds = false;
    std::string f_text;       // assembled graphing function
};

namespace detail {

inline void require_vars_subset(const expr_ast& e, bool allow_z2b, const char* what) {
    auto walk = [&](auto&& self, const ast_node& n) -> void {
        if (n.k == ast_node::kind::variable) {
            if (n.var == 0 || n.var == 1)
                throw domain_mix(std::string(what) + " must not involve z1/z1b", n.pos);
            if (!allow_z2b && n.var == 3)
                throw domain_mix(std::string(what) + " must be holomorphic (z2 only)", n.pos);
        }
        if (n.lhs) self(self, *n.lhs);
        if (n.rhs) self(self, *n.rhs);
    };
    walk(walk, *e.root);
}

} // namespace detail

inline std::string assemble_spec_form(const spec_form_profile& p) {
    std::string t_text = print(p.t);
    if (p.u) t_text = "(" + t_text + ")+(" + print(*p.u) + ")";
    expr_ast tu_ast = parse(t_text, expr_domain::rigid);
    const std::string conj_text = print(ast_conjugate(tu_ast));
    return "(" + print(p.r) + ")*z1*z1b + (" + t_text + ")*z1^2 + (" + conj_text + ")*z1b^2";
}

/// Residuals of the rank-1 system for a special-form profile at a point of
/// the z2 plane, plus the assembled graphing function.
inline spec_form_residuals specform_residuals(const spec_form_profile& p,
                                              std::complex<double> z2,
                                              const tol_profile& tol = {}) {
    using cplx = std::complex<double>;
    detail::require_vars_subset(p.r, true, "r");
    detail::require_vars_subset(p.t, true, "t");
    if (p.u) detail::require_vars_subset(*p.u, false, "u");

    const int order = 3;
    const cjet rj = eval_rigid(p.r, 0.0, z2, order);
    const cjet tj = eval_rigid(p.t, 0.0, z2, order);
    if (std::abs(rj.value().imag()) > tol.reality_tol)
        throw reality_violated("r is not real-valued at the point");
    const double r = rj.value().real();
    if (r <= 0) throw non_positive_r("r must be positive");

    const cplx r2 = rj.derivative(2).value();
    const cplx r22b = rj.derivative(2).derivative(3).value();
    const cplx t2b = tj.derivative(3).value();
    const cplx t22b = tj.derivative(2).derivative(3).value();

    spec_form_residuals out;
    out.r_value = r;
    out.t2b_abs = std::abs(t2b);
    out.ma_full = std::abs(r * r22b - r2 * std::conj(r2) - cplx(4) * t2b * std::conj(t2b));
    out.ma_cross = std::abs(r * t22b - cplx(2) * r2 * t2b);
    out.reltr = std::abs(t2b - cplx(r * r / 2));
    out.reltr_holds = out.reltr < 1e-9 * (1 + r * r);
    out.shortsys = std::abs(r * r22b - r2 * std::conj(r2) - cplx(r * r * r * r));
    // Delta(ln r) = 4 (ln r)_22b; the Liouville residual is |Delta ln r - 4 r^2|
    const cjet logr = log(rj);
    out.liouville = std::abs(cplx(4) * logr.derivative(2).derivative(3).value() - cplx(4 * r * r));
    out.f_text = assemble_spec_form(p);
    return out;
}

} // namespace crflat
