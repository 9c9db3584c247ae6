#pragma once

// Truncated multivariate Taylor arithmetic ("jets").
//
// A jet holds the Taylor coefficients of a scalar function at a seed point,
// truncated at a total order: coeff[alpha] = (d^alpha f)(point) / alpha!.
// Supported shapes: 1, 2 or 4 variables, total order 0..8, real or complex
// scalars. Storage is dense in graded lexicographic order, so a jet of order
// k is a prefix of the same function's jet of any higher order.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace crflat {

inline constexpr int max_jet_order = 8;
inline constexpr double division_guard = 1e-13;   // |constant| below this is singular
inline constexpr double branch_cut_tol = 1e-12;   // distance to the negative real axis

struct jet_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct jet_shape_error : jet_error {
    using jet_error::jet_error;
};
struct division_by_singular_jet : jet_error {
    using jet_error::jet_error;
};
struct branch_cut_violation : jet_error {
    using jet_error::jet_error;
};
struct order_exceeded : jet_error {
    using jet_error::jet_error;
};
struct pairing_violated : jet_error {
    using jet_error::jet_error;
};

// Multi-index; trailing components are zero when nvars < 4.
using mindex = std::array<std::uint8_t, 4>;

inline int mindex_degree(const mindex& m) {
    return int(m[0]) + int(m[1]) + int(m[2]) + int(m[3]);
}

inline double mindex_factorial(const mindex& m) {
    static constexpr double fact[9] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320};
    return fact[m[0]] * fact[m[1]] * fact[m[2]] * fact[m[3]];
}

// Dense coefficient layout plus the convolution pair lists, one table per
// (nvars, order). Built once, immutable afterwards.
class mindex_table {
public:
    static const mindex_table& get(int nvars, int order);

    int nvars() const { return nvars_; }
    int order() const { return order_; }
    int size() const { return int(idx_.size()); }
    const mindex& index(int i) const { return idx_[std::size_t(i)]; }
    int degree(int i) const { return deg_[std::size_t(i)]; }

    // Position of m in the layout, or -1 when |m| exceeds the order.
    int rank(const mindex& m) const {
        int code = 0, mul = 1;
        for (int v = 0; v < nvars_; ++v) {
            if (m[std::size_t(v)] > max_jet_order) return -1;
            code += int(m[std::size_t(v)]) * mul;
            mul *= max_jet_order + 1;
        }
        for (int v = nvars_; v < 4; ++v)
            if (m[std::size_t(v)] != 0) return -1;
        return rank_[std::size_t(code)];
    }

    struct pair_entry { std::int32_t a, b; };
    // All (a, b) with index(a) + index(b) == index(k).
    std::span<const pair_entry> pairs_for(int k) const {
        return {pairs_.data() + off_[std::size_t(k)],
                std::size_t(off_[std::size_t(k) + 1] - off_[std::size_t(k)])};
    }

private:
    mindex_table(int nvars, int order);

    int nvars_, order_;
    std::vector<mindex> idx_;
    std::vector<int> deg_;
    std::vector<std::int32_t> rank_;
    std::vector<pair_entry> pairs_;
    std::vector<std::int32_t> off_;
};

inline mindex_table::mindex_table(int nvars, int order) : nvars_(nvars), order_(order) {
    // graded lexicographic enumeration, first component decreasing fastest last
    mindex cur{0, 0, 0, 0};
    auto emit = [&](auto&& self, int var, int remaining) -> void {
        if (var == nvars_ - 1) {
            cur[std::size_t(var)] = std::uint8_t(remaining);
            idx_.push_back(cur);
            return;
        }
        for (int c = remaining; c >= 0; --c) {
            cur[std::size_t(var)] = std::uint8_t(c);
            self(self, var + 1, remaining - c);
        }
        cur[std::size_t(var)] = 0;
    };
    for (int d = 0; d <= order_; ++d) emit(emit, 0, d);

    deg_.resize(idx_.size());
    int codes = 1;
    for (int v = 0; v < nvars_; ++v) codes *= max_jet_order + 1;
    rank_.assign(std::size_t(codes), -1);
    for (std::size_t i = 0; i < idx_.size(); ++i) {
        deg_[i] = mindex_degree(idx_[i]);
        int code = 0, mul = 1;
        for (int v = 0; v < nvars_; ++v) {
            code += int(idx_[i][std::size_t(v)]) * mul;
            mul *= max_jet_order + 1;
        }
        rank_[std::size_t(code)] = std::int32_t(i);
    }

    off_.assign(idx_.size() + 1, 0);
    const int n = size();
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            if (deg_[std::size_t(j)] > deg_[std::size_t(k)]) break;
            mindex rem;
            bool fits = true;
            for (int v = 0; v < 4; ++v) {
                if (idx_[std::size_t(j)][std::size_t(v)] > idx_[std::size_t(k)][std::size_t(v)]) { fits = false; break; }
                rem[std::size_t(v)] = std::uint8_t(idx_[std::size_t(k)][std::size_t(v)] - idx_[std::size_t(j)][std::size_t(v)]);
            }
            if (!fits) continue;
            pairs_.push_back({rank(rem), std::int32_t(j)});
        }
        off_[std::size_t(k) + 1] = std::int32_t(pairs_.size());
    }
}

inline const mindex_table& mindex_table::get(int nvars, int order) {
    if ((nvars != 1 && nvars != 2 && nvars != 4) || order < 0 || order > max_jet_order)
        throw jet_shape_error("jet shape out of range: nvars=" + std::to_string(nvars) +
                              " order=" + std::to_string(order));
    struct registry {
        std::array<const mindex_table*, 3 * (max_jet_order + 1)> t{};
        registry() {
            const int nv[3] = {1, 2, 4};
            for (int i = 0; i < 3; ++i)
                for (int o = 0; o <= max_jet_order; ++o)
                    t[std::size_t(i * (max_jet_order + 1) + o)] = new mindex_table(nv[i], o);
        }
    };
    static const registry reg;
    const int slot = (nvars == 1 ? 0 : nvars == 2 ? 1 : 2) * (max_jet_order + 1) + order;
    return *reg.t[std::size_t(slot)];
}

namespace detail {

inline double abs_val(double x) { return std::abs(x); }
inline double abs_val(const std::complex<double>& x) { return std::abs(x); }
inline double conj_val(double x) { return x; }
inline std::complex<double> conj_val(const std::complex<double>& x) { return std::conj(x); }

inline void check_branch_point(double a0, const char* fn) {
    if (!(a0 > 0.0))
        throw branch_cut_violation(std::string(fn) + ": constant term " + std::to_string(a0) +
                                   " not strictly positive");
}
inline void check_branch_point(const std::complex<double>& a0, const char* fn) {
    if (std::abs(a0.imag()) <= branch_cut_tol && a0.real() <= 0.0)
        throw branch_cut_violation(std::string(fn) + ": constant term on the negative real axis");
}

} // namespace detail

template <class S>
class jet {
public:
    using scalar = S;

    jet() : jet(constant(S(0), 0, 1)) {}

    static jet constant(S value, int order, int nvars) {
        jet j(order, nvars);
        j.c_[0] = value;
        return j;
    }

    /// Jet of the coordinate function x_var at the given point.
    static jet seed(std::span<const S> point, int var, int order, int nvars) {
        if (int(point.size()) != nvars)
            throw jet_shape_error("seed: point size does not match nvars");
        if (var < 0 || var >= nvars)
            throw jet_shape_error("seed: var_index out of range");
        jet j(order, nvars);
        j.c_[0] = point[std::size_t(var)];
        if (order >= 1) {
            mindex m{0, 0, 0, 0};
            m[std::size_t(var)] = 1;
            j.c_[std::size_t(j.tab_->rank(m))] = S(1);
        }
        j.point_.assign(point.begin(), point.end());
        return j;
    }

    int order() const { return tab_->order(); }
    int nvars() const { return tab_->nvars(); }
    S value() const { return c_[0]; }
    const std::vector<S>& coeffs() const { return c_; }
    std::span<const S> point() const { return point_; }

    S coeff(const mindex& m) const {
        const int r = tab_->rank(m);
        if (r < 0) throw order_exceeded("coeff: multi-index exceeds jet order");
        return c_[std::size_t(r)];
    }

    /// Mixed partial derivative value at the seed point: coeff * alpha!.
    S partial(const mindex& m) const { return coeff(m) * S(mindex_factorial(m)); }

    jet truncated(int new_order) const {
        if (new_order > order()) throw order_exceeded("truncated: order can only decrease");
        jet r(new_order, nvars());
        std::copy_n(c_.begin(), r.c_.size(), r.c_.begin());  // graded layout is prefix-stable
        r.point_ = point_;
        return r;
    }

    /// Jet of d/dx_var, one order lower.
    jet derivative(int var) const {
        if (order() == 0) throw order_exceeded("derivative: jet has order 0");
        if (var < 0 || var >= nvars()) throw jet_shape_error("derivative: var out of range");
        jet r(order() - 1, nvars());
        for (int i = 0; i < r.tab_->size(); ++i) {
            mindex m = r.tab_->index(i);
            m[std::size_t(var)]++;
            r.c_[std::size_t(i)] = c_[std::size_t(tab_->rank(m))] * S(double(m[std::size_t(var)]));
        }
        r.point_ = point_;
        return r;
    }

    jet operator-() const {
        jet r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    friend jet operator+(const jet& a, const jet& b) {
        a.require_same_shape(b);
        jet r = a;
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
        r.point_ = a.point_.empty() ? b.point_ : a.point_;
        return r;
    }
    friend jet operator-(const jet& a, const jet& b) {
        a.require_same_shape(b);
        jet r = a;
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= b.c_[i];
        r.point_ = a.point_.empty() ? b.point_ : a.point_;
        return r;
    }
    friend jet operator*(const jet& a, const jet& b) {
        a.require_same_shape(b);
        jet r(a.order(), a.nvars());
        const int n = r.tab_->size();
        for (int k = 0; k < n; ++k) {
            S acc(0);
            for (const auto& e : r.tab_->pairs_for(k))
                acc += a.c_[std::size_t(e.a)] * b.c_[std::size_t(e.b)];
            r.c_[std::size_t(k)] = acc;
        }
        r.point_ = a.point_.empty() ? b.point_ : a.point_;
        return r;
    }
    // truncated power series division; pairs with b-index 0 are the a[k] term
    friend jet operator/(const jet& a, const jet& b) {
        a.require_same_shape(b);
        if (detail::abs_val(b.c_[0]) <= division_guard)
            throw division_by_singular_jet("division by jet with (near-)zero constant term");
        jet r(a.order(), a.nvars());
        const int n = r.tab_->size();
        for (int k = 0; k < n; ++k) {
            S acc = a.c_[std::size_t(k)];
            for (const auto& e : r.tab_->pairs_for(k))
                if (e.b != 0) acc -= r.c_[std::size_t(e.a)] * b.c_[std::size_t(e.b)];
            r.c_[std::size_t(k)] = acc / b.c_[0];
        }
        r.point_ = a.point_.empty() ? b.point_ : a.point_;
        return r;
    }

    friend jet operator+(const jet& a, S s) { jet r = a; r.c_[0] += s; return r; }
    friend jet operator+(S s, const jet& a) { return a + s; }
    friend jet operator-(const jet& a, S s) { jet r = a; r.c_[0] -= s; return r; }
    friend jet operator-(S s, const jet& a) { jet r = -a; r.c_[0] += s; return r; }
    friend jet operator*(const jet& a, S s) {
        jet r = a;
        for (auto& x : r.c_) x *= s;
        return r;
    }
    friend jet operator*(S s, const jet& a) { return a * s; }
    friend jet operator/(const jet& a, S s) {
        if (detail::abs_val(s) <= division_guard)
            throw division_by_singular_jet("division by (near-)zero scalar");
        jet r = a;
        for (auto& x : r.c_) x /= s;
        return r;
    }
    friend jet operator/(S s, const jet& a) { return constant(s, a.order(), a.nvars()) / a; }

    /// Univariate series composed with the nonconstant part of a.
    /// coeffs[k] is the k-th Taylor coefficient of the outer function at a's value.
    static jet compose(std::span<const S> coeffs, const jet& a) {
        if (int(coeffs.size()) != a.order() + 1)
            throw jet_shape_error("compose: series length must be order+1");
        jet h = a;
        h.c_[0] = S(0);
        jet r = constant(coeffs[std::size_t(a.order())], a.order(), a.nvars());
        for (int k = a.order() - 1; k >= 0; --k) r = r * h + coeffs[std::size_t(k)];
        r.point_ = a.point_;
        return r;
    }

private:
    jet(int order, int nvars) : tab_(&mindex_table::get(nvars, order)) {
        c_.assign(std::size_t(tab_->size()), S(0));
    }

    void require_same_shape(const jet& b) const {
        if (tab_ != b.tab_)
            throw jet_shape_error("jet operands have different order/nvars");
    }

    const mindex_table* tab_;
    std::vector<S> c_;
    std::vector<S> point_;

    template <class T> friend jet<T> conj_jet(const jet<T>& a);
};

using rjet = jet<double>;
using cjet = jet<std::complex<double>>;

template <class S>
jet<S> exp(const jet<S>& a) {
    std::vector<S> c(std::size_t(a.order() + 1));
    const S e0 = std::exp(a.value());
    double f = 1;
    for (int k = 0; k <= a.order(); ++k) {
        if (k > 0) f *= k;
        c[std::size_t(k)] = e0 / S(f);
    }
    return jet<S>::compose(c, a);
}

template <class S>
jet<S> log(const jet<S>& a) {
    detail::check_branch_point(a.value(), "log");
    std::vector<S> c(std::size_t(a.order() + 1));
    c[0] = std::log(a.value());
    S p(1);
    for (int k = 1; k <= a.order(); ++k) {
        p *= a.value();
        c[std::size_t(k)] = S((k % 2 == 1) ? 1.0 : -1.0) / (S(double(k)) * p);
    }
    return jet<S>::compose(c, a);
}

template <class S>
jet<S> sin(const jet<S>& a) {
    std::vector<S> c(std::size_t(a.order() + 1));
    const S s0 = std::sin(a.value()), c0 = std::cos(a.value());
    const S cyc[4] = {s0, c0, -s0, -c0};
    double f = 1;
    for (int k = 0; k <= a.order(); ++k) {
        if (k > 0) f *= k;
        c[std::size_t(k)] = cyc[k % 4] / S(f);
    }
    return jet<S>::compose(c, a);
}

template <class S>
jet<S> cos(const jet<S>& a) {
    std::vector<S> c(std::size_t(a.order() + 1));
    const S s0 = std::sin(a.value()), c0 = std::cos(a.value());
    const S cyc[4] = {c0, -s0, -c0, s0};
    double f = 1;
    for (int k = 0; k <= a.order(); ++k) {
        if (k > 0) f *= k;
        c[std::size_t(k)] = cyc[k % 4] / S(f);
    }
    return jet<S>::compose(c, a);
}

template <class S>
jet<S> tan(const jet<S>& a) {
    return sin(a) / cos(a);
}

/// a^alpha for real alpha, principal branch.
template <class S>
jet<S> pow(const jet<S>& a, double alpha) {
    detail::check_branch_point(a.value(), "pow");
    std::vector<S> c(std::size_t(a.order() + 1));
    c[0] = std::pow(a.value(), S(alpha));
    for (int k = 1; k <= a.order(); ++k)
        c[std::size_t(k)] = c[std::size_t(k - 1)] * S((alpha - k + 1) / double(k)) / a.value();
    return jet<S>::compose(c, a);
}

template <class S>
jet<S> sqrt(const jet<S>& a) {
    detail::check_branch_point(a.value(), "sqrt");
    return pow(a, 0.5);
}

/// a^n by repeated squaring; negative n goes through series division.
template <class S>
jet<S> powi(const jet<S>& a, int n) {
    if (n < 0) return jet<S>::constant(S(1), a.order(), a.nvars()) / powi(a, -n);
    jet<S> r = jet<S>::constant(S(1), a.order(), a.nvars());
    jet<S> base = a;
    while (n > 0) {
        if (n & 1) r = r * base;
        n >>= 1;
        if (n) base = base * base;
    }
    return r;
}

/// Jet of the conjugate function conj(f) at a conjugate-paired seed point:
/// variables are paired (z1, z1b, z2, z2b), so the coefficient at
/// (a1,a2,a3,a4) is the conjugate of the input coefficient at (a2,a1,a4,a3).
template <class S>
jet<S> conj_jet(const jet<S>& a) {
    static_assert(std::is_same_v<S, std::complex<double>>, "conj_jet needs complex jets");
    if (a.nvars() != 4)
        throw jet_shape_error("conj_jet: needs 4 paired variables");
    if (a.point_.size() != 4)
        throw pairing_violated("conj_jet: jet has no seed point");
    const auto& p = a.point_;
    if (std::abs(p[1] - std::conj(p[0])) > branch_cut_tol * (1 + std::abs(p[0])) ||
        std::abs(p[3] - std::conj(p[2])) > branch_cut_tol * (1 + std::abs(p[2])))
        throw pairing_violated("conj_jet: seed point is not conjugate-paired");
    jet<S> r = a;
    const auto& tab = mindex_table::get(a.nvars(), a.order());
    for (int i = 0; i < tab.size(); ++i) {
        const mindex& m = tab.index(i);
        const mindex sw{m[1], m[0], m[3], m[2]};
        r.c_[std::size_t(i)] = std::conj(a.c_[std::size_t(tab.rank(sw))]);
    }
    return r;
}

} // namespace crflat
