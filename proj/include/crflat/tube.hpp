#pragma once

// Pointwise invariants of tube graphing functions rho(t1, t2):
// the function S = (rho_12/rho_11)_1 and its derivative chain, the
// invariants J and W, the Monge-Ampere and Monge residuals, and the
// classification predicates.

#include "expr.hpp"
#include "jet.hpp"

#include <array>
#include <functional>
#include <optional>

namespace crflat {

struct tol_profile {
    double flat_tol = 1e-8;     // scaled |J|, |W| and rank-1 threshold
    double sing_tol = 1e-10;    // |S1| threshold for the J singular-term policy
    double s_tol = 1e-10;       // 2-degeneracy threshold on |S|
    double hessian_tol = 1e-10; // |rho_11| (resp. |F_11b|) degeneracy threshold
    double reality_tol = 1e-9;  // |Im F| allowed for rigid graphing functions
    double guard_margin = 0.05; // grid points with |guard| below this are skipped
};

enum class surface_label { flat, nonflat, two_degenerate, not_rank1, out_of_domain };

inline const char* to_string(surface_label l) {
    switch (l) {
        case surface_label::flat: return "flat";
        case surface_label::nonflat: return "nonflat";
        case surface_label::two_degenerate: return "two_degenerate";
        case surface_label::not_rank1: return "not_rank1";
        default: return "out_of_domain";
    }
}

struct hessian_degenerate : std::runtime_error { using std::runtime_error::runtime_error; };

struct residual_pair {
    double raw = 0;
    double scaled = 0;
};

struct surface_predicates {
    bool hessian_positive = false;
    bool two_nondegenerate = false;
    bool levi_rank1 = false;
    bool flat = false;
};

struct surface_flags {
    bool j_reduced_formula_used = false;
    bool guard_skipped = false;
    bool sign_flip_applied = false;
    bool j_singular = false;
    bool s111_term_dropped = false;
};

struct tube_report {
    std::array<double, 2> point{};
    double S = 0, S1 = 0, S2 = 0, S11 = 0, S12 = 0, S111 = 0;
    bool has_s111 = true;
    double ratio = 0;  // rho_12/rho_11 at the point
    std::optional<double> J, W;
    double j_scaled = 0, w_scaled = 0;
    residual_pair ma, monge;
    surface_predicates predicates;
    surface_flags flags;
    surface_label label = surface_label::out_of_domain;
};

/// Anything that can produce the jet of rho at a point: a parsed expression,
/// or a reconstruction such as the (p,q) parametrization.
using rho_source = std::function<rjet(double t1, double t2, int order)>;

inline rho_source make_rho_source(expr_ast ast) {
    if (ast.domain != expr_domain::tube)
        throw domain_mix("tube invariants need a tube-domain expression", 0);
    return [ast = std::move(ast)](double t1, double t2, int order) {
        return eval_tube(ast, t1, t2, order);
    };
}

namespace detail {

// residual scaled by 1 + sum of the magnitudes of the contributing terms
template <class T, std::size_t N>
residual_pair scaled_residual(T value, const std::array<T, N>& terms) {
    double denom = 1;
    for (const auto& t : terms) denom += abs_val(t);
    return {abs_val(value), abs_val(value) / denom};
}

// J of the first line of the explicit formulas; identical in the tube and
// rigid cases up to the meaning of the inputs. Returns {J, scaled |J|}.
template <class S>
std::pair<S, double> j_full(S Sv, S S1, S S11, S S111, bool with_s111_term,
                            S A, S A1, S A11) {
    const std::array<S, 10> t = {
        S(5.0 / 18.0) * S1 * S1 / (Sv * Sv) * A,
        S(1.0 / 3.0) * A * A1,
        -(S1 / (S(9) * Sv)) * A * A,
        S(20.0 / 27.0) * S1 * S1 * S1 / (Sv * Sv * Sv),
        -S(5.0 / 6.0) * S1 * S11 / (Sv * Sv),
        (S1 / (S(6) * Sv)) * A1,
        -(S11 / (S(6) * Sv)) * A,
        -S(2.0 / 27.0) * A * A * A,
        -S(1.0 / 6.0) * A11,
        with_s111_term ? S111 / S1 : S(0)};
    S J(0);
    double denom = 1;
    for (const auto& x : t) {
        J += x;
        denom += abs_val(x);
    }
    return {J, abs_val(J) / denom};
}

// J with every S-derivative term dropped; valid on the locus
// S1 = S11 = S111 = 0 and exactly the reduced flatness equation there.
template <class S>
std::pair<S, double> j_reduced(S A, S A1, S A11) {
    const std::array<S, 3> t = {S(1.0 / 3.0) * A * A1, -S(2.0 / 27.0) * A * A * A,
                                -S(1.0 / 6.0) * A11};
    S J = t[0] + t[1] + t[2];
    double denom = 1 + abs_val(t[0]) + abs_val(t[1]) + abs_val(t[2]);
    return {J, abs_val(J) / denom};
}

} // namespace detail

/// Labeling is total on reports. Rank breakage wins over a nonzero
/// invariant: J and W have no invariant meaning off the rank-1 locus.
inline surface_label classify(const surface_predicates& p, const surface_flags& f,
                              bool have_jw, double j_scaled, double w_scaled,
                              const tol_profile& tol) {
    if (f.guard_skipped) return surface_label::out_of_domain;
    if (!p.two_nondegenerate) return surface_label::two_degenerate;
    if (!p.levi_rank1) return surface_label::not_rank1;
    if (f.j_singular || !have_jw) return surface_label::nonflat;
    if (j_scaled < tol.flat_tol && w_scaled < tol.flat_tol) return surface_label::flat;
    return surface_label::nonflat;
}

inline surface_label tube_classify(const tube_report& r) { return r.label; }

/// Evaluate the full tube report at a point. The rho jet must have order >= 5;
/// order >= 6 enables the S111 term of J.
inline tube_report tube_invariants(const rho_source& src, double t1, double t2,
                                   const tol_profile& tol = {}, int order = 6) {
    if (order < 5 || order > max_jet_order)
        throw jet_shape_error("tube_invariants: order must be in [5, 8]");
    tube_report rep;
    rep.point = {t1, t2};

    rjet rho = src(t1, t2, order);
    rjet rho11 = rho.derivative(0).derivative(0);
    if (std::abs(rho11.value()) < tol.hessian_tol)
        throw hessian_degenerate("rho_11 vanishes at the evaluation point");
    if (rho11.value() < 0) {
        // affine normalization z3 -> -z3
        rho = -rho;
        rho11 = -rho11;
        rep.flags.sign_flip_applied = true;
    }
    rep.predicates.hessian_positive = true;

    const rjet rho1 = rho.derivative(0);
    const rjet rho12 = rho1.derivative(1);
    const rjet rho111 = rho11.derivative(0);
    const double r22 = rho.derivative(1).derivative(1).value();
    const double r11 = rho11.value(), r12 = rho12.value(), r111 = rho111.value();
    const double r4 = rho111.derivative(0).value();
    const double r5 = rho111.derivative(0).derivative(0).value();

    rep.ma = detail::scaled_residual(r11 * r22 - r12 * r12,
                                     std::array<double, 2>{r11 * r22, r12 * r12});
    rep.monge = detail::scaled_residual(
        9 * r5 * r11 * r11 - 45 * r4 * r111 * r11 + 40 * r111 * r111 * r111,
        std::array<double, 3>{9 * r5 * r11 * r11, 45 * r4 * r111 * r11,
                              40 * r111 * r111 * r111});
    rep.predicates.levi_rank1 = rep.ma.scaled < tol.flat_tol;

    const rjet ratio = rho12 / rho11.truncated(rho12.order());
    const rjet S_jet = ratio.derivative(0);
    rep.ratio = ratio.value();
    rep.S = S_jet.value();

    if (std::abs(rep.S) < tol.s_tol) {
        // 2-degenerate: J and W are not meaningful, report carries S only
        rep.predicates.two_nondegenerate = false;
        rep.label = classify(rep.predicates, rep.flags, false, 0, 0, tol);
        return rep;
    }
    rep.predicates.two_nondegenerate = true;

    const rjet S1_jet = S_jet.derivative(0);
    const rjet S11_jet = S1_jet.derivative(0);
    rep.S1 = S1_jet.value();
    rep.S2 = S_jet.derivative(1).value();
    rep.S11 = S11_jet.value();
    rep.S12 = S1_jet.derivative(1).value();
    rep.has_s111 = order >= 6;
    if (rep.has_s111) rep.S111 = S11_jet.derivative(0).value();

    const rjet A_jet = rho111 / rho11.truncated(rho111.order());
    const rjet A1_jet = A_jet.derivative(0);
    const double A = A_jet.value(), A1 = A1_jet.value(), A11 = A1_jet.derivative(0).value();

    // singular-term policy for S111/S1
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
        rep.flags.j_singular = true;  // S1 ~ 0 but S111 is not: J has a pole
    }

    {
        const double U1 = 4.0 / 3.0 * rep.S1 / rep.S;
        const double U2 = rep.S1 / (3 * rep.S * rep.S * rep.S) * (rep.ratio * rep.S1 - rep.S2);
        const double U3 = -1.0 / (3 * rep.S * rep.S) * (rep.ratio * rep.S11 - rep.S12);
        rep.W = U1 + U2 + U3;
        rep.w_scaled = std::abs(*rep.W) / (1 + std::abs(U1) + std::abs(U2) + std::abs(U3));
    }

    rep.label = classify(rep.predicates, rep.flags, rep.J.has_value(), rep.j_scaled,
                         rep.w_scaled, tol);
    rep.predicates.flat = rep.label == surface_label::flat;
    return rep;
}

inline tube_report tube_invariants(const expr_ast& rho, double t1, double t2,
                                   const tol_profile& tol = {}, int order = 6) {
    return tube_invariants(make_rho_source(rho), t1, t2, tol, order);
}

} // namespace crflat
