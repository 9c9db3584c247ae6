#pragma once

// Pipeline runner behind the CLI: grid evaluation of the tube/rigid
// invariants, the (p,q) parametrization checks, the ODE residual tables,
// and the catalog listing, all rendered as deterministic JSON or CSV.

#include "catalog.hpp"
#include "odes.hpp"
#include "pq.hpp"
#include "rigid.hpp"
#include "tube.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace crflat {

using ordered_json = nlohmann::ordered_json;

struct usage_error : std::runtime_error { using std::runtime_error::runtime_error; };

struct grid_spec {
    std::vector<double> center;  // 2 values for tube grids, 4 for rigid
    double halfwidth = 0.05;
    int n = 3;
};

struct run_config {
    enum class command { check, param, ode, families };
    command cmd = command::check;

    // check
    std::optional<std::string> family;
    std::map<std::string, double> params;
    std::optional<std::string> expr_text;
    expr_domain form = expr_domain::tube;
    grid_spec grid;
    int order = 6;
    tol_profile tols;

    // param
    std::string p_text, q_text;
    double grid_w = 0.1;

    // ode
    std::string ode_family_name;
    std::map<std::string, double> ode_params;
    int samples = 8;
    std::string monge_expr;

    std::string format = "json";
};

struct run_result {
    ordered_json report;
    int exit_code = 0;
};

namespace detail {

inline ordered_json jnum(double x) { return ordered_json(x); }
inline ordered_json jnum(std::complex<double> x) { return ordered_json::array({x.real(), x.imag()}); }

template <class T>
ordered_json jopt(const std::optional<T>& x) {
    if (!x) return nullptr;
    return jnum(*x);
}

inline std::vector<double> axis_values(double center, double halfwidth, int n) {
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    if (n == 1) {
        v[0] = center;
        return v;
    }
    for (int i = 0; i < n; ++i)
        v[std::size_t(i)] = center - halfwidth + 2 * halfwidth * i / double(n - 1);
    return v;
}

inline ordered_json predicates_json(const surface_predicates& p) {
    return {{"hessian_positive", p.hessian_positive},
            {"two_nondegenerate", p.two_nondegenerate},
            {"levi_rank1", p.levi_rank1},
            {"flat", p.flat}};
}

inline ordered_json flags_json(const surface_flags& f) {
    return {{"j_reduced_formula_used", f.j_reduced_formula_used},
            {"guard_skipped", f.guard_skipped},
            {"sign_flip_applied", f.sign_flip_applied},
            {"j_singular", f.j_singular},
            {"s111_term_dropped", f.s111_term_dropped}};
}

inline ordered_json tube_point_json(int index, const tube_report& r) {
    ordered_json j;
    j["index"] = index;
    j["point"] = {r.point[0], r.point[1]};
    j["S"] = r.S;
    if (r.predicates.two_nondegenerate) {
        j["S1"] = r.S1;
        j["J"] = jopt(r.J);
        j["W"] = jopt(r.W);
    } else {
        j["S1"] = nullptr;
        j["J"] = nullptr;
        j["W"] = nullptr;
    }
    j["residuals"] = {{"ma_raw", r.ma.raw},       {"ma_scaled", r.ma.scaled},
                      {"monge_raw", r.monge.raw}, {"monge_scaled", r.monge.scaled},
                      {"j_scaled", r.j_scaled},   {"w_scaled", r.w_scaled}};
    j["predicates"] = predicates_json(r.predicates);
    j["flags"] = flags_json(r.flags);
    j["label"] = to_string(r.label);
    return j;
}

inline ordered_json rigid_point_json(int index, const rigid_report& r) {
    ordered_json j;
    j["index"] = index;
    j["point"] = ordered_json::array({jnum(r.point[0]), jnum(r.point[1])});
    j["S"] = jnum(r.S);
    if (r.predicates.two_nondegenerate) {
        j["S1"] = jnum(r.S1);
        j["S1bar"] = jnum(r.S1bar);
        j["J"] = jopt(r.J);
        j["W"] = jopt(r.W);
    } else {
        j["S1"] = nullptr;
        j["S1bar"] = nullptr;
        j["J"] = nullptr;
        j["W"] = nullptr;
    }
    j["residuals"] = {{"cma_raw", r.cma.raw},
                      {"cma_scaled", r.cma.scaled},
                      {"cmonge_raw", r.cmonge.raw},
                      {"cmonge_scaled", r.cmonge.scaled},
                      {"s1_max", r.s1_max},
                      {"polystruct", r.polystruct},
                      {"reality", r.reality},
                      {"j_scaled", r.j_scaled},
                      {"w_scaled", r.w_scaled}};
    j["predicates"] = predicates_json(r.predicates);
    j["flags"] = flags_json(r.flags);
    j["label"] = to_string(r.label);
    return j;
}

inline ordered_json skipped_point_json(int index, const ordered_json& point,
                                       const std::string& reason) {
    ordered_json j;
    j["index"] = index;
    j["point"] = point;
    j["label"] = to_string(surface_label::out_of_domain);
    j["guard"] = reason;
    return j;
}

struct label_counts {
    std::map<std::string, int> counts;
    void add(surface_label l) { counts[to_string(l)]++; }
    ordered_json to_json() const {
        ordered_json j;
        for (auto l : {surface_label::flat, surface_label::nonflat, surface_label::two_degenerate,
                       surface_label::not_rank1, surface_label::out_of_domain}) {
            auto it = counts.find(to_string(l));
            j[to_string(l)] = it == counts.end() ? 0 : it->second;
        }
        return j;
    }
    int get(surface_label l) const {
        auto it = counts.find(to_string(l));
        return it == counts.end() ? 0 : it->second;
    }
};

inline bool expectation_met(flat_expectation expected, const label_counts& c, int total) {
    const int flat = c.get(surface_label::flat);
    const int nonflat = c.get(surface_label::nonflat);
    const int not_rank1 = c.get(surface_label::not_rank1);
    const int evaluated = total - c.get(surface_label::out_of_domain);
    if (evaluated == 0) return false;
    switch (expected) {
        case flat_expectation::flat: return flat == evaluated;
        case flat_expectation::nonflat: return nonflat + not_rank1 > 0;
        default:
            // class membership must hold where evaluation succeeded
            return flat + nonflat == evaluated;
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// check

inline run_result run_check(const run_config& cfg) {
    hypersurface_spec spec;
    if (cfg.family) {
        spec = make_family(*cfg.family, cfg.params);
    } else if (cfg.expr_text) {
        spec.name = "expr";
        spec.form = cfg.form;
        spec.expr_text = *cfg.expr_text;
        spec.expected = flat_expectation::unknown;
    } else {
        throw usage_error("check needs --family or --expr");
    }

    std::vector<expr_ast> guards;
    for (const auto& g : spec.guards) guards.push_back(parse(g, spec.form));

    const int axes = spec.form == expr_domain::tube ? 2 : 4;
    std::vector<double> center = cfg.grid.center;
    if (center.empty()) center.assign(std::size_t(axes), 0.0);
    if (int(center.size()) != axes)
        throw usage_error("grid center needs " + std::to_string(axes) + " components");
    std::vector<std::vector<double>> grid_axes;
    for (int a = 0; a < axes; ++a)
        grid_axes.push_back(detail::axis_values(center[std::size_t(a)], cfg.grid.halfwidth, cfg.grid.n));

    ordered_json points = ordered_json::array();
    detail::label_counts counts;
    double max_j = 0, max_w = 0, max_ma = 0, max_monge = 0, max_s1 = 0;
    int total = 0;

    std::optional<expr_ast> ast;
    std::optional<rho_source> source;
    if (spec.pq) {
        source = make_rho_source(make_pq_profile(spec.pq->first, spec.pq->second));
    } else {
        ast = parse(spec.expr_text, spec.form);
        if (spec.form == expr_domain::tube) source = make_rho_source(*ast);
    }

    // normalization at the origin is not enforced (invariants are pointwise
    // and ignore affine terms), but flag it
    ordered_json warnings = ordered_json::array();
    if (spec.form == expr_domain::tube && ast) {
        try {
            const rjet j0 = eval_tube(*ast, 0.0, 0.0, 1);
            if (std::abs(j0.value()) > 1e-9 || std::abs(j0.partial({1, 0, 0, 0})) > 1e-9 ||
                std::abs(j0.partial({0, 1, 0, 0})) > 1e-9)
                warnings.push_back(
                    "graphing function is not normalized at the origin "
                    "(rho(0), rho_1(0), rho_2(0) should vanish); invariants are unaffected");
        } catch (const std::exception&) {
            // origin outside the domain: nothing to check
        }
    }

    std::vector<int> idx(std::size_t(axes), 0);
    const int npts = [&] {
        int m = 1;
        for (int a = 0; a < axes; ++a) m *= cfg.grid.n;
        return m;
    }();

    for (int flat_index = 0; flat_index < npts; ++flat_index) {
        int rem = flat_index;
        for (int a = axes - 1; a >= 0; --a) {
            idx[std::size_t(a)] = rem % cfg.grid.n;
            rem /= cfg.grid.n;
        }
        ++total;

        if (spec.form == expr_domain::tube) {
            const double t1 = grid_axes[0][std::size_t(idx[0])];
            const double t2 = grid_axes[1][std::size_t(idx[1])];
            const ordered_json pt = {t1, t2};
            std::string skip;
            for (std::size_t g = 0; g < guards.size(); ++g) {
                const double gv = eval_tube(guards[g], t1, t2, 0).value();
                if (std::abs(gv) < cfg.tols.guard_margin) {
                    skip = spec.guards[g];
                    break;
                }
            }
            if (!skip.empty()) {
                counts.add(surface_label::out_of_domain);
                points.push_back(detail::skipped_point_json(flat_index, pt, skip));
                continue;
            }
            try {
                const tube_report r = tube_invariants(*source, t1, t2, cfg.tols, cfg.order);
                counts.add(r.label);
                max_j = std::max(max_j, r.j_scaled);
                max_w = std::max(max_w, r.w_scaled);
                max_ma = std::max(max_ma, r.ma.scaled);
                max_monge = std::max(max_monge, r.monge.scaled);
                points.push_back(detail::tube_point_json(flat_index, r));
            } catch (const eval_error& e) {
                counts.add(surface_label::out_of_domain);
                points.push_back(detail::skipped_point_json(flat_index, pt, e.what()));
            } catch (const hessian_degenerate& e) {
                counts.add(surface_label::out_of_domain);
                points.push_back(detail::skipped_point_json(flat_index, pt, e.what()));
            } catch (const jacobian_singular& e) {
                counts.add(surface_label::out_of_domain);
                points.push_back(detail::skipped_point_json(flat_index, pt, e.what()));
            } catch (const newton_diverged& e) {
                counts.add(surface_label::out_of_domain);
                points.push_back(detail::skipped_point_json(flat_index, pt, e.what()));
            } catch (const quadrature_unreliable& e) {
                counts.add(surface_label::out_of_domain);
                points.push_back(detail::skipped_point_json(flat_index, pt, e.what()));
            }
        } else {
            const std::complex<double> z1(grid_axes[0][std::size_t(idx[0])],
                                          grid_axes[1][std::size_t(idx[1])]);
            const std::complex<double> z2(grid_axes[2][std::size_t(idx[2])],
                                          grid_axes[3][std::size_t(idx[3])]);
            const ordered_json pt = ordered_json::array({detail::jnum(z1), detail::jnum(z2)});
            std::string skip;
            for (std::size_t g = 0; g < guards.size(); ++g) {
                const std::complex<double> gv = eval_rigid(guards[g], z1, z2, 0).value();
                if (std::abs(gv) < cfg.tols.guard_margin) {
                    skip = spec.guards[g];
                    break;
                }
            }
            if (!skip.empty()) {
                counts.add(surface_label::out_of_domain);
                points.push_back(detail::skipped_point_json(flat_index, pt, skip));
                continue;
            }
            try {
                const rigid_report r = rigid_invariants(*ast, z1, z2, cfg.tols, cfg.order);
                counts.add(r.label);
                max_j = std::max(max_j, r.j_scaled);
                max_w = std::max(max_w, r.w_scaled);
                max_ma = std::max(max_ma, r.cma.scaled);
                max_monge = std::max(max_monge, r.cmonge.scaled);
                max_s1 = std::max(max_s1, r.s1_max);
                points.push_back(detail::rigid_point_json(flat_index, r));
            } catch (const eval_error& e) {
                counts.add(surface_label::out_of_domain);
                points.push_back(detail::skipped_point_json(flat_index, pt, e.what()));
            } catch (const hessian_degenerate& e) {
                counts.add(surface_label::out_of_domain);
                points.push_back(detail::skipped_point_json(flat_index, pt, e.what()));
            } catch (const reality_violated& e) {
                counts.add(surface_label::out_of_domain);
                points.push_back(detail::skipped_point_json(flat_index, pt, e.what()));
            }
        }
    }

    const bool met = detail::expectation_met(spec.expected, counts, total);

    ordered_json report;
    report["config"] = {{"subcommand", "check"},
                        {"source", cfg.family ? ordered_json{{"family", spec.name}, {"params", spec.params}}
                                              : ordered_json{{"form", spec.form == expr_domain::tube ? "tube" : "rigid"},
                                                             {"expr", spec.expr_text}}},
                        {"expr", spec.pq ? "(p,q) profile: p = " + spec.pq->first + ", q = " + spec.pq->second
                                         : spec.expr_text},
                        {"grid", {{"center", center}, {"halfwidth", cfg.grid.halfwidth}, {"n", cfg.grid.n}}},
                        {"order", cfg.order},
                        {"tolerances", {{"flat_tol", cfg.tols.flat_tol},
                                        {"sing_tol", cfg.tols.sing_tol},
                                        {"s_tol", cfg.tols.s_tol},
                                        {"guard_margin", cfg.tols.guard_margin}}}};
    report["warnings"] = std::move(warnings);
    report["points"] = std::move(points);
    ordered_json summary;
    summary["points_total"] = total;
    summary["points_evaluated"] = total - counts.get(surface_label::out_of_domain);
    summary["labels"] = counts.to_json();
    ordered_json ms = {{"j", max_j}, {"w", max_w}};
    if (spec.form == expr_domain::tube) {
        ms["ma"] = max_ma;
        ms["monge"] = max_monge;
    } else {
        ms["cma"] = max_ma;
        ms["cmonge"] = max_monge;
        ms["s1"] = max_s1;
    }
    summary["max_scaled"] = ms;
    summary["expected"] = to_string(spec.expected);
    summary["expectation_met"] = met;
    summary["exit_code"] = met ? 0 : 1;
    report["summary"] = std::move(summary);
    return {std::move(report), met ? 0 : 1};
}

// ---------------------------------------------------------------------------
// param

inline run_result run_param(const run_config& cfg) {
    if (cfg.p_text.empty() || cfg.q_text.empty())
        throw usage_error("param needs --p and --q");
    pq_profile prof;
    try {
        prof = make_pq_profile(cfg.p_text, cfg.q_text);
    } catch (const parse_error& e) {
        throw usage_error(std::string("bad profile expression: ") + e.what());
    }

    ordered_json report;
    report["config"] = {{"subcommand", "param"},
                        {"p", cfg.p_text},
                        {"q", cfg.q_text},
                        {"grid_w", cfg.grid_w},
                        {"grid_n", cfg.grid.n},
                        {"order", cfg.order}};

    const pq_diagnostics diag = pq_validate(prof);
    report["validate"] = {{"ok", diag.ok},
                          {"p_at_0", diag.p_at_0},
                          {"q_at_0", diag.q_at_0},
                          {"min_qprime", diag.min_qprime},
                          {"min_abs_psecond", diag.min_abs_psecond},
                          {"violations", diag.violations}};
    if (!diag.ok) {
        report["summary"] = {{"ok", false}, {"exit_code", 1}};
        return {std::move(report), 1};
    }

    const double ma_tol = 1e-9, cf_tol = 1e-9;
    bool ok = true;
    double max_ma = 0, max_cf = 0;

    ordered_json points = ordered_json::array();
    const auto vs = detail::axis_values(0.0, 0.5 * prof.interval[1], cfg.grid.n);
    const auto ws = detail::axis_values(0.0, cfg.grid_w, cfg.grid.n);
    int index = 0;
    for (double v : vs) {
        for (double w : ws) {
            ordered_json j;
            j["index"] = index++;
            j["vw"] = {v, w};
            try {
                const auto cf = closed_form_residuals(prof, v, w, cfg.order);
                const auto [t1, t2] = forward_map(prof, v, w);
                const tube_report r =
                    tube_invariants(make_rho_source(prof), t1, t2, cfg.tols, cfg.order);
                j["point"] = {t1, t2};
                j["closed_form_max"] = cf.max_discrepancy;
                ordered_json tj = detail::tube_point_json(0, r);
                tj.erase("index");
                j["tube"] = std::move(tj);
                max_ma = std::max(max_ma, r.ma.scaled);
                max_cf = std::max(max_cf, cf.max_discrepancy);
                if (r.ma.scaled >= ma_tol || cf.max_discrepancy >= cf_tol) ok = false;
            } catch (const std::runtime_error& e) {
                j["error"] = e.what();
                ok = false;
            }
            points.push_back(std::move(j));
        }
    }
    report["points"] = std::move(points);

    ordered_json vtable = ordered_json::array();
    for (double v : vs) {
        const auto sys = monge_system_residuals(prof, v);
        const auto m1 = monge_residual_1d(prof.p, v);
        vtable.push_back({{"v", v},
                          {"monge_system_raw", {sys[0].raw, sys[1].raw, sys[2].raw, sys[3].raw}},
                          {"monge_system_scaled",
                           {sys[0].scaled, sys[1].scaled, sys[2].scaled, sys[3].scaled}},
                          {"monge_1d_raw", m1.raw},
                          {"monge_1d_scaled", m1.scaled}});
    }
    report["v_samples"] = std::move(vtable);

    const constancy_check fc = ratio_constancy_check(prof);
    report["ratio_constancy"] = {{"value_at_0", fc.value_at_0},
                                 {"max_deviation", fc.max_deviation},
                                 {"is_constant", fc.is_constant}};

    report["summary"] = {{"ok", ok},
                         {"max_ma_scaled", max_ma},
                         {"max_closed_form", max_cf},
                         {"exit_code", ok ? 0 : 1}};
    return {std::move(report), ok ? 0 : 1};
}

// ---------------------------------------------------------------------------
// ode

inline run_result run_ode(const run_config& cfg) {
    if (cfg.ode_family_name.empty() && cfg.monge_expr.empty())
        throw usage_error("ode needs --ode-family or --monge-expr");

    ordered_json report;
    report["config"] = {{"subcommand", "ode"},
                        {"ode_family", cfg.ode_family_name},
                        {"params", cfg.ode_params},
                        {"samples", cfg.samples},
                        {"monge_expr", cfg.monge_expr}};
    bool ok = true;

    if (!cfg.ode_family_name.empty()) {
        ode_family fam;
        if (cfg.ode_family_name == "case1") fam.id = ode_family_id::case1;
        else if (cfg.ode_family_name == "case2") fam.id = ode_family_id::case2;
        else if (cfg.ode_family_name == "case3") fam.id = ode_family_id::case3;
        else if (cfg.ode_family_name == "reinhardt") fam.id = ode_family_id::reinhardt;
        else throw usage_error("unknown ODE family '" + cfg.ode_family_name + "'");
        if (fam.id == ode_family_id::case2) fam.C = 1;
        if (fam.id == ode_family_id::case3) { fam.C = -1; fam.D = 0.5; }
        for (const auto& [k, v] : cfg.ode_params) {
            if (k == "sigma") fam.sigma = int(v);
            else if (k == "C") fam.C = v;
            else if (k == "D") fam.D = v;
            else if (k == "beta") fam.beta = v;
            else throw usage_error("unknown ODE parameter '" + k + "'");
        }
        validate(fam);

        const auto range = admissible_range(fam);
        const auto xs = detail::axis_values((range[0] + range[1]) / 2,
                                            (range[1] - range[0]) / 2, cfg.samples);
        const double ode_tol = 1e-10;
        ordered_json rows = ordered_json::array();
        for (double x : xs) {
            const liouville_record r = liouville_residuals(fam, x);
            rows.push_back({{"x", r.x},
                            {"g", r.g},
                            {"residual_ode", r.residual_ode},
                            {"residual_integral", r.residual_integral},
                            {"recovered_C", r.recovered_C}});
            if (r.residual_ode >= ode_tol || r.residual_integral >= ode_tol) ok = false;
        }
        report["liouville"] = std::move(rows);
    }

    if (!cfg.monge_expr.empty()) {
        expr_ast f;
        try {
            f = parse(cfg.monge_expr, expr_domain::profile);
        } catch (const parse_error& e) {
            throw usage_error(std::string("bad --monge-expr: ") + e.what());
        }
        const auto xs = detail::axis_values(0.0, 0.2, cfg.samples);
        ordered_json rows = ordered_json::array();
        for (double x : xs) {
            const auto r = monge_residual_1d(f, x);
            rows.push_back({{"v", x}, {"raw", r.raw}, {"scaled", r.scaled}});
        }
        report["monge_1d"] = std::move(rows);
    }

    report["summary"] = {{"ok", ok}, {"exit_code", ok ? 0 : 1}};
    return {std::move(report), ok ? 0 : 1};
}

// ---------------------------------------------------------------------------
// families

inline run_result run_families(const run_config&) {
    ordered_json rows = ordered_json::array();
    for (const auto& f : list_families()) {
        ordered_json params = ordered_json::array();
        for (const auto& p : f.params)
            params.push_back({{"name", p.name},
                              {"min", p.min_value},
                              {"max", p.max_value},
                              {"default", p.default_value}});
        rows.push_back({{"name", f.name},
                        {"form", f.form == expr_domain::tube ? "tube" : "rigid"},
                        {"params", params},
                        {"accepts_gauge", f.accepts_gauge},
                        {"expected", to_string(f.expected)},
                        {"description", f.description}});
    }
    ordered_json report;
    report["config"] = {{"subcommand", "families"}};
    report["families"] = std::move(rows);
    report["summary"] = {{"count", int(list_families().size())}, {"exit_code", 0}};
    return {std::move(report), 0};
}

inline run_result run(const run_config& cfg) {
    switch (cfg.cmd) {
        case run_config::command::check: return run_check(cfg);
        case run_config::command::param: return run_param(cfg);
        case run_config::command::ode: return run_ode(cfg);
        case run_config::command::families: return run_families(cfg);
    }
    throw usage_error("bad subcommand");
}

// ---------------------------------------------------------------------------
// CSV rendering: flattens the report's per-record array (points, families,
// liouville rows, ...) into one row per record.

namespace detail {

inline std::string csv_num(double x) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return {buf, p};
}

inline void flatten(const ordered_json& j, const std::string& prefix,
                    std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (j.is_array()) {
        int k = 0;
        for (const auto& el : j) flatten(el, prefix + "_" + std::to_string(k++), out);
    } else if (j.is_number_float()) {
        out.emplace_back(prefix, csv_num(j.get<double>()));
    } else if (j.is_number_integer()) {
        out.emplace_back(prefix, std::to_string(j.get<long long>()));
    } else if (j.is_boolean()) {
        out.emplace_back(prefix, j.get<bool>() ? "true" : "false");
    } else if (j.is_string()) {
        std::string s = j.get<std::string>();
        for (auto& c : s)
            if (c == ',') c = ';';
        out.emplace_back(prefix, s);
    } else {
        out.emplace_back(prefix, "");  // null
    }
}

} // namespace detail

inline std::string to_csv(const ordered_json& report) {
    const char* record_keys[] = {"points", "families", "liouville", "v_samples", "monge_1d"};
    const ordered_json* records = nullptr;
    for (const char* k : record_keys)
        if (report.contains(k) && report[k].is_array()) {
            records = &report[k];
            break;
        }
    if (!records || records->empty()) return "";

    std::vector<std::string> columns;
    std::vector<std::vector<std::pair<std::string, std::string>>> rows;
    for (const auto& rec : *records) {
        std::vector<std::pair<std::string, std::string>> cells;
        detail::flatten(rec, "", cells);
        for (const auto& [k, v] : cells)
            if (std::find(columns.begin(), columns.end(), k) == columns.end())
                columns.push_back(k);
        rows.push_back(std::move(cells));
    }

    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) out += ",";
        out += columns[c];
    }
    out += "\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out += ",";
            for (const auto& [k, v] : row)
                if (k == columns[c]) {
                    out += v;
                    break;
                }
        }
        out += "\n";
    }
    return out;
}

inline std::string render(const run_result& res, const std::string& format) {
    if (format == "csv") return to_csv(res.report);
    return res.report.dump(2) + "\n";
}

} // namespace crflat
