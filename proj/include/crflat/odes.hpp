#pragma once

// Closed-form solution families of the one-variable Liouville-type equations
// behind the classified flat rigid hypersurfaces, with residual evaluation:
//   case1/2/3:  g'' = e^{2g} and its first integral (g')^2 = e^{2g} + C,
//               for g = ln R with R the case-specific profile;
//   reinhardt:  g'' x + g' = e^{2g} and (g')^2 x + g' = e^{2g},
//               for g(x) = beta - ln(1 - e^{2 beta} x).

#include "jet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace crflat {

struct param_out_of_range : std::runtime_error { using std::runtime_error::runtime_error; };
struct domain_guard : std::runtime_error { using std::runtime_error::runtime_error; };

enum class ode_family_id { case1, case2, case3, reinhardt };

inline const char* to_string(ode_family_id id) {
    switch (id) {
        case ode_family_id::case1: return "case1";
        case ode_family_id::case2: return "case2";
        case ode_family_id::case3: return "case3";
        default: return "reinhardt";
    }
}

struct ode_family {
    ode_family_id id = ode_family_id::case1;
    int sigma = 1;     // +1 or -1
    double C = 0;      // case2: C > 0; case3: C < 0
    double D = 1;      // case1: D > 0; case2: 0 < D < 1; case3: 0 < D < pi/2
    double beta = 0;   // reinhardt
};

inline void validate(const ode_family& f) {
    if (f.sigma != 1 && f.sigma != -1)
        throw param_out_of_range("sigma must be +1 or -1");
    switch (f.id) {
        case ode_family_id::case1:
            if (!(f.D > 0)) throw param_out_of_range("case1 needs D > 0");
            break;
        case ode_family_id::case2:
            if (!(f.C > 0)) throw param_out_of_range("case2 needs C > 0");
            if (!(f.D > 0 && f.D < 1)) throw param_out_of_range("case2 needs 0 < D < 1");
            break;
        case ode_family_id::case3:
            if (!(f.C < 0)) throw param_out_of_range("case3 needs C < 0");
            if (!(f.D > 0 && f.D < 1.57079632679489662))
                throw param_out_of_range("case3 needs 0 < D < pi/2");
            break;
        case ode_family_id::reinhardt:
            break;
    }
}

namespace detail {

// g = ln R as an order-2 jet in x
inline rjet ode_g_jet(const ode_family& f, double x) {
    const double pt[1] = {x};
    const rjet X = rjet::seed(pt, 0, 2, 1);
    switch (f.id) {
        case ode_family_id::case1: {
            const rjet den = double(-f.sigma) * X + f.D;
            if (den.value() <= 1e-6) throw domain_guard("case1: -sigma x + D must stay positive");
            return -log(den);
        }
        case ode_family_id::case2: {
            const double s = f.sigma * std::sqrt(f.C);
            const rjet e = exp((2 * s) * X);
            const rjet den = 1.0 - f.D * e;
            if (den.value() <= 1e-6) throw domain_guard("case2: 1 - D e^{2 sigma sqrt(C) x} must stay positive");
            return std::log(2 * std::sqrt(f.C * f.D)) + s * X - log(den);
        }
        case ode_family_id::case3: {
            const double s = f.sigma * std::sqrt(-f.C);
            const rjet cs = cos(s * X + f.D);
            if (cs.value() <= 1e-6) throw domain_guard("case3: cos(sigma sqrt(-C) x + D) must stay positive");
            return 0.5 * std::log(-f.C) - log(cs);
        }
        case ode_family_id::reinhardt: {
            const rjet den = 1.0 - std::exp(2 * f.beta) * X;
            if (den.value() <= 1e-6) throw domain_guard("reinhardt: 1 - e^{2 beta} x must stay positive");
            return f.beta - log(den);
        }
    }
    throw param_out_of_range("bad ode family");
}

} // namespace detail

struct liouville_record {
    double x = 0;
    double g = 0, gprime = 0, gsecond = 0;
    double residual_ode = 0;       // the family's defining equation
    double residual_integral = 0;  // its first integral
    double recovered_C = 0;        // (g')^2 - e^{2g}; equals C for case1/2/3
};

inline liouville_record liouville_residuals(const ode_family& f, double x) {
    validate(f);
    const rjet g = detail::ode_g_jet(f, x);
    liouville_record r;
    r.x = x;
    r.g = g.value();
    r.gprime = g.derivative(0).value();
    r.gsecond = g.derivative(0).derivative(0).value();
    const double e2g = std::exp(2 * r.g);
    if (f.id == ode_family_id::reinhardt) {
        r.residual_ode = std::abs(r.gsecond * x + r.gprime - e2g);
        r.residual_integral = std::abs(r.gprime * r.gprime * x + r.gprime - e2g);
        r.recovered_C = (r.gprime * x) * (r.gprime * x) + r.gprime * x - e2g * x;
    } else {
        r.residual_ode = std::abs(r.gsecond - e2g);
        r.residual_integral = std::abs(r.gprime * r.gprime - e2g - f.C);
        r.recovered_C = r.gprime * r.gprime - e2g;
    }
    return r;
}

/// x interval on which the family's guards hold with some margin, clipped to
/// [-0.25, 0.25]; used for default sampling.
inline std::array<double, 2> admissible_range(const ode_family& f) {
    validate(f);
    double lo = -0.25, hi = 0.25;
    auto clip_upper = [&](double b) { hi = std::min(hi, b); };
    auto clip_lower = [&](double b) { lo = std::max(lo, b); };
    const double margin = 0.8;
    switch (f.id) {
        case ode_family_id::case1:
            if (f.sigma > 0) clip_upper(margin * f.D);
            else clip_lower(-margin * f.D);
            break;
        case ode_family_id::case2: {
            const double s = 2 * f.sigma * std::sqrt(f.C);
            const double xb = std::log(1 / f.D) / s;   // e^{s x} = 1/D
            if (s > 0) clip_upper(margin * xb);
            else clip_lower(margin * xb);
            break;
        }
        case ode_family_id::case3: {
            // need -pi/2 < s x + D < pi/2
            const double s = f.sigma * std::sqrt(-f.C);
            const double half_pi = 1.57079632679489662;
            double a = (-half_pi - f.D) / s, b = (half_pi - f.D) / s;
            if (a > b) std::swap(a, b);
            clip_lower(margin * a);
            clip_upper(margin * b);
            break;
        }
        case ode_family_id::reinhardt: {
            const double xb = std::exp(-2 * f.beta);
            clip_upper(margin * xb);
            break;
        }
    }
    if (lo >= hi) throw domain_guard("empty admissible range for the ODE family");
    return {lo, hi};
}

} // namespace crflat
