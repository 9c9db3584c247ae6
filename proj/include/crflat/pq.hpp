#pragma once

// The (p, q) parametrization of rank-1 solutions of the homogeneous
// Monge-Ampere equation. A profile pair (p(v), q(v)) with p(0) = q(0) = 0,
// q' > 0 and p'' != 0 determines a tube graphing function rho through the
// change of variables
//     t1 = q(v) - w p'(v),   t2 = w,
//     rho = v q(v) - int_0^v q + w (p(v) - v p'(v)),
// and every admissible rho arises this way. This header reconstructs rho
// jets at arbitrary points, checks the closed-form derivative identities of
// the parametrization, and evaluates the one-variable ODE residuals the
// reduction produces (the Monge equation and the four-equation system from
// collecting powers of w).

#include "expr.hpp"
#include "jet.hpp"
#include "tube.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace crflat {

struct profile_violation : std::runtime_error { using std::runtime_error::runtime_error; };
struct newton_diverged : std::runtime_error { using std::runtime_error::runtime_error; };
struct jacobian_singular : std::runtime_error { using std::runtime_error::runtime_error; };
struct quadrature_unreliable : std::runtime_error { using std::runtime_error::runtime_error; };

struct pq_profile {
    expr_ast p, q;  // profile domain (variable v)
    std::array<double, 2> interval = {-0.4, 0.4};
};

inline pq_profile make_pq_profile(std::string_view p_text, std::string_view q_text,
                                  std::array<double, 2> interval = {-0.4, 0.4}) {
    return {parse(p_text, expr_domain::profile), parse(q_text, expr_domain::profile), interval};
}

struct pq_diagnostics {
    bool ok = false;
    double p_at_0 = 0, q_at_0 = 0;
    double min_qprime = 0, min_abs_psecond = 0;
    double argmin_qprime = 0, argmin_psecond = 0;
    std::vector<std::string> violations;
};

inline constexpr double profile_margin = 1e-6;  // admissibility floor for q' and |p''|

/// Sample the admissibility conditions p(0)=q(0)=0, q'>0, p''!=0 over the
/// profile interval and report the margins.
inline pq_diagnostics pq_validate(const pq_profile& prof, int n_samples = 64) {
    pq_diagnostics d;
    d.p_at_0 = eval_profile(prof.p, 0.0, 0).value();
    d.q_at_0 = eval_profile(prof.q, 0.0, 0).value();
    if (std::abs(d.p_at_0) > 1e-12)
        d.violations.push_back("p(0) = " + std::to_string(d.p_at_0) + " is not 0");
    if (std::abs(d.q_at_0) > 1e-12)
        d.violations.push_back("q(0) = " + std::to_string(d.q_at_0) + " is not 0");

    d.min_qprime = std::numeric_limits<double>::infinity();
    d.min_abs_psecond = std::numeric_limits<double>::infinity();
    // v = 0 anchors the conditions, so always sample it explicitly
    for (int i = -1; i < n_samples; ++i) {
        const double v = i < 0 ? 0.0
                               : prof.interval[0] + (prof.interval[1] - prof.interval[0]) * i /
                                                        double(n_samples - 1);
        const double qp = eval_profile(prof.q, v, 1).derivative(0).value();
        const double pp = eval_profile(prof.p, v, 2).derivative(0).derivative(0).value();
        if (qp < d.min_qprime) { d.min_qprime = qp; d.argmin_qprime = v; }
        if (std::abs(pp) < d.min_abs_psecond) { d.min_abs_psecond = std::abs(pp); d.argmin_psecond = v; }
    }
    if (d.min_qprime < profile_margin)
        d.violations.push_back("q' = " + std::to_string(d.min_qprime) + " at v = " +
                               std::to_string(d.argmin_qprime) + " (must stay positive)");
    if (d.min_abs_psecond < profile_margin)
        d.violations.push_back("|p''| = " + std::to_string(d.min_abs_psecond) + " at v = " +
                               std::to_string(d.argmin_psecond) + " (must stay nonzero)");
    d.ok = d.violations.empty();
    return d;
}

inline void require_valid(const pq_profile& prof) {
    const pq_diagnostics d = pq_validate(prof);
    if (!d.ok) throw profile_violation("profile is not admissible: " + d.violations.front());
}

/// (v, w) -> (t1, t2)
inline std::array<double, 2> forward_map(const pq_profile& prof, double v, double w) {
    const double qv = eval_profile(prof.q, v, 0).value();
    const double pp = eval_profile(prof.p, v, 1).derivative(0).value();
    return {qv - w * pp, w};
}

/// Newton inversion of t1 = q(v) - t2 p'(v) for v, starting from v = 0.
inline std::array<double, 2> invert_point(const pq_profile& prof, double t1, double t2) {
    double v = 0;
    const double span = prof.interval[1] - prof.interval[0];
    for (int it = 0; it < 50; ++it) {
        const rjet pj = eval_profile(prof.p, v, 2);
        const rjet qj = eval_profile(prof.q, v, 1);
        const double g = qj.value() - t2 * pj.derivative(0).value() - t1;
        const double gp = qj.derivative(0).value() - t2 * pj.derivative(0).derivative(0).value();
        if (std::abs(gp) < 1e-8)
            throw jacobian_singular("q' - w p'' vanishes along the Newton iteration");
        v -= g / gp;
        if (!std::isfinite(v) || std::abs(v) > 1.5 * span)
            throw newton_diverged("Newton iteration left the profile interval");
        if (std::abs(g) < 1e-12 * (1 + std::abs(t1))) return {v, t2};
    }
    throw newton_diverged("Newton iteration did not converge in 50 steps");
}

namespace detail {

// 32-node Gauss-Legendre rule on [-1, 1]
struct gauss_legendre_32 {
    std::array<double, 32> x{}, w{};
    gauss_legendre_32() {
        constexpr int n = 32;
        for (int i = 0; i < n / 2; ++i) {
            double t = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = n * (t * p1 - p0) / (t * t - 1);
                const double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-15) break;
            }
            double p0 = 1, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1);
            x[std::size_t(i)] = -t;
            x[std::size_t(n - 1 - i)] = t;
            w[std::size_t(i)] = w[std::size_t(n - 1 - i)] = 2 / ((1 - t * t) * dp * dp);
        }
    }
};

inline double integrate_profile(const expr_ast& f, double a, double b) {
    static const gauss_legendre_32 rule;
    const double mid = (a + b) / 2, half = (b - a) / 2;
    double acc = 0;
    for (int i = 0; i < 32; ++i)
        acc += rule.w[std::size_t(i)] * eval_profile(f, mid + half * rule.x[std::size_t(i)], 0).value();
    return acc * half;
}

// univariate Taylor coefficients of an expression at v0, as a series
inline std::vector<double> profile_series(const expr_ast& f, double v0, int order) {
    const rjet j = eval_profile(f, v0, order);
    return j.coeffs();
}

inline std::vector<double> series_derivative(const std::vector<double>& c) {
    std::vector<double> d(c.size() - 1);
    for (std::size_t k = 0; k + 1 < c.size(); ++k) d[k] = c[k + 1] * double(k + 1);
    return d;
}

inline std::vector<double> series_antiderivative(const std::vector<double>& c, double c0) {
    std::vector<double> a(c.size() + 1);
    a[0] = c0;
    for (std::size_t k = 0; k < c.size(); ++k) a[k + 1] = c[k] / double(k + 1);
    return a;
}

inline rjet compose_profile(const std::vector<double>& series, const rjet& v, int order) {
    std::vector<double> c(series.begin(), series.begin() + order + 1);
    return rjet::compose(c, v);
}

} // namespace detail

/// Jet of the reconstructed rho at (t1, t2). The implicit function v(t1, t2)
/// is promoted to a jet by running the Newton update in jet arithmetic after
/// scalar convergence.
inline rjet rho_jet_from_pq(const pq_profile& prof, double t1, double t2, int order) {
    const auto [v0, w0] = invert_point(prof, t1, t2);
    if (v0 < prof.interval[0] || v0 > prof.interval[1])
        throw quadrature_unreliable("v left the admissible profile interval");

    const int n = order + 2;  // headroom for p' and the antiderivative
    const std::vector<double> p_ser = detail::profile_series(prof.p, v0, n);
    const std::vector<double> q_ser = detail::profile_series(prof.q, v0, n);
    const std::vector<double> pp_ser = detail::series_derivative(p_ser);
    const std::vector<double> ppp_ser = detail::series_derivative(pp_ser);
    const double int_q0 = detail::integrate_profile(prof.q, 0.0, v0);
    const std::vector<double> intq_ser = detail::series_antiderivative(
        std::vector<double>(q_ser.begin(), q_ser.end() - 1), int_q0);

    const double pt[2] = {t1, t2};
    const rjet T1 = rjet::seed(pt, 0, order, 2);
    const rjet T2 = rjet::seed(pt, 1, order, 2);
    rjet V = rjet::constant(v0, order, 2);
    for (int it = 0; it < order + 2; ++it) {
        const rjet g = detail::compose_profile(q_ser, V, order) -
                       T2 * detail::compose_profile(pp_ser, V, order) - T1;
        const rjet gp = detail::compose_profile(detail::series_derivative(q_ser), V, order) -
                        T2 * detail::compose_profile(ppp_ser, V, order);
        if (std::abs(gp.value()) < 1e-8)
            throw jacobian_singular("q' - w p'' vanishes at the evaluation point");
        V = V - g / gp;
    }

    const rjet qV = detail::compose_profile(q_ser, V, order);
    const rjet pV = detail::compose_profile(p_ser, V, order);
    const rjet ppV = detail::compose_profile(pp_ser, V, order);
    const rjet intqV = detail::compose_profile(intq_ser, V, order);
    return V * qV - intqV + T2 * (pV - V * ppV);
}

inline rho_source make_rho_source(pq_profile prof) {
    return [prof = std::move(prof)](double t1, double t2, int order) {
        return rho_jet_from_pq(prof, t1, t2, order);
    };
}

// ---------------------------------------------------------------------------
// Closed-form identities of the parametrization

struct closed_form_check {
    // relative discrepancies between the reconstructed jet and the closed forms
    double rho11 = 0, rho12 = 0, rho111 = 0, rho4 = 0, rho5 = 0, S = 0, S1 = 0;
    double max_discrepancy = 0;
};

/// Compare rho's derivatives extracted from rho_jet_from_pq against the
/// closed-form expressions in (v, w); two independent computation paths.
inline closed_form_check closed_form_residuals(const pq_profile& prof, double v, double w,
                                               int order = 6) {
    const rjet pj = eval_profile(prof.p, v, 5);
    const rjet qj = eval_profile(prof.q, v, 5);
    auto dn = [](const rjet& j, int k) {
        rjet d = j;
        for (int i = 0; i < k; ++i) d = d.derivative(0);
        return d.value();
    };
    const double p2 = dn(pj, 2), p3 = dn(pj, 3), p4 = dn(pj, 4), p5 = dn(pj, 5);
    const double q1 = dn(qj, 1), q2 = dn(qj, 2), q3 = dn(qj, 3), q4 = dn(qj, 4);

    const double Q = q1 - w * p2;
    if (std::abs(Q) < 1e-8) throw jacobian_singular("q' - w p'' vanishes at (v, w)");
    const double A = q2 - w * p3, B = q3 - w * p4, C = q4 - w * p5;

    const double cf_rho11 = 1 / Q;
    const double cf_rho12 = dn(pj, 1) / Q;
    const double cf_rho111 = -A / (Q * Q * Q);
    const double cf_rho4 = -(B * Q - 3 * A * A) / std::pow(Q, 5);
    const double cf_rho5 = -((C * Q - 5 * A * B) * Q - 5 * (B * Q - 3 * A * A) * A) / std::pow(Q, 7);
    const double cf_S = p2 / Q;
    const double cf_S1 = (p3 * q1 - p2 * q2) / (Q * Q * Q);

    const auto [t1, t2] = forward_map(prof, v, w);
    const rjet rho = rho_jet_from_pq(prof, t1, t2, order);
    const rjet rho11 = rho.derivative(0).derivative(0);
    const rjet rho12 = rho.derivative(0).derivative(1);
    const rjet ratio = rho12 / rho11.truncated(rho12.order());
    const rjet S_jet = ratio.derivative(0);

    auto rel = [](double got, double want) {
        return std::abs(got - want) / (1 + std::abs(want));
    };
    closed_form_check out;
    out.rho11 = rel(rho11.value(), cf_rho11);
    out.rho12 = rel(rho12.value(), cf_rho12);
    out.rho111 = rel(rho11.derivative(0).value(), cf_rho111);
    out.rho4 = rel(rho11.derivative(0).derivative(0).value(), cf_rho4);
    out.rho5 = rel(rho11.derivative(0).derivative(0).derivative(0).value(), cf_rho5);
    out.S = rel(S_jet.value(), cf_S);
    out.S1 = rel(S_jet.derivative(0).value(), cf_S1);
    out.max_discrepancy = std::max({out.rho11, out.rho12, out.rho111, out.rho4, out.rho5,
                                    out.S, out.S1});
    return out;
}

// ---------------------------------------------------------------------------
// One-variable ODE residuals of the w-power collection

/// |9 y^(5) (y'')^2 - 45 y^(4) y''' y'' + 40 (y''')^3| for a one-variable
/// expression; raw and scaled.
inline residual_pair monge_residual_1d(const expr_ast& f, double v) {
    const rjet j = eval_profile(f, v, 5);
    auto dn = [&](int k) {
        rjet d = j;
        for (int i = 0; i < k; ++i) d = d.derivative(0);
        return d.value();
    };
    const double y2 = dn(2), y3 = dn(3), y4 = dn(4), y5 = dn(5);
    return detail::scaled_residual(
        9 * y5 * y2 * y2 - 45 * y4 * y3 * y2 + 40 * y3 * y3 * y3,
        std::array<double, 3>{9 * y5 * y2 * y2, 45 * y4 * y3 * y2, 40 * y3 * y3 * y3});
}

/// The four ODE left-hand sides obtained by collecting the tube Monge
/// equation in powers of w (coefficients of w^3 .. w^0 up to constant
/// factors); all four vanish identically for flat reconstructions.
inline std::array<residual_pair, 4> monge_system_residuals(const pq_profile& prof, double v) {
    const rjet pj = eval_profile(prof.p, v, 5);
    const rjet qj = eval_profile(prof.q, v, 5);
    auto dn = [](const rjet& j, int k) {
        rjet d = j;
        for (int i = 0; i < k; ++i) d = d.derivative(0);
        return d.value();
    };
    const double p2 = dn(pj, 2), p3 = dn(pj, 3), p4 = dn(pj, 4), p5 = dn(pj, 5);
    const double q1 = dn(qj, 1), q2 = dn(qj, 2), q3 = dn(qj, 3), q4 = dn(qj, 4);

    std::array<residual_pair, 4> out;
    out[0] = detail::scaled_residual(
        9 * p5 * p2 * p2 - 45 * p4 * p3 * p2 + 40 * p3 * p3 * p3,
        std::array<double, 3>{9 * p5 * p2 * p2, 45 * p4 * p3 * p2, 40 * p3 * p3 * p3});
    out[1] = detail::scaled_residual(
        6 * p5 * p2 * q1 + 3 * p2 * p2 * q4 - 15 * (p4 * p3 * q1 + p4 * p2 * q2 + p3 * p2 * q3) +
            40 * p3 * p3 * q2,
        std::array<double, 4>{6 * p5 * p2 * q1, 3 * p2 * p2 * q4,
                              15 * (p4 * p3 * q1 + p4 * p2 * q2 + p3 * p2 * q3),
                              40 * p3 * p3 * q2});
    out[2] = detail::scaled_residual(
        3 * p5 * q1 * q1 + 6 * p2 * q4 * q1 - 15 * (p4 * q2 * q1 + p3 * q3 * q1 + p2 * q3 * q2) +
            40 * p3 * q2 * q2,
        std::array<double, 4>{3 * p5 * q1 * q1, 6 * p2 * q4 * q1,
                              15 * (p4 * q2 * q1 + p3 * q3 * q1 + p2 * q3 * q2),
                              40 * p3 * q2 * q2});
    out[3] = detail::scaled_residual(
        9 * q4 * q1 * q1 - 45 * q3 * q2 * q1 + 40 * q2 * q2 * q2,
        std::array<double, 3>{9 * q4 * q1 * q1, 45 * q3 * q2 * q1, 40 * q2 * q2 * q2});
    return out;
}

struct constancy_check {
    bool is_constant = false;
    double value_at_0 = 0;
    double max_deviation = 0;
};

/// Deviation of q'/p'' from its value at v = 0 over the profile interval.
inline constancy_check ratio_constancy_check(const pq_profile& prof, int n_samples = 64,
                                             double const_tol = 1e-10) {
    constancy_check out;
    auto ratio_at = [&](double v) {
        const double qp = eval_profile(prof.q, v, 1).derivative(0).value();
        const double pp = eval_profile(prof.p, v, 2).derivative(0).derivative(0).value();
        if (std::abs(pp) < profile_margin)
            throw profile_violation("p'' vanishes while sampling q'/p''");
        return qp / pp;
    };
    out.value_at_0 = ratio_at(0.0);
    for (int i = 0; i < n_samples; ++i) {
        const double v = prof.interval[0] +
                         (prof.interval[1] - prof.interval[0]) * i / double(n_samples - 1);
        out.max_deviation = std::max(out.max_deviation, std::abs(ratio_at(v) - out.value_at_0));
    }
    out.is_constant = out.max_deviation < const_tol;
    return out;
}

} // namespace crflat
