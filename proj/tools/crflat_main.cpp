// crflat: CR-flatness verification for rank-1 Levi degenerate hypersurface
// graphs in C^3. See README.md for the report format.

#include <crflat/run.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

namespace {

void parse_kv(const std::vector<std::string>& raw, std::map<std::string, double>& out) {
    for (const auto& item : raw) {
        std::size_t start = 0;
        while (start <= item.size()) {
            std::size_t end = item.find(',', start);
            if (end == std::string::npos) end = item.size();
            const std::string kv = item.substr(start, end - start);
            if (!kv.empty()) {
                const std::size_t eq = kv.find('=');
                if (eq == std::string::npos)
                    throw crflat::usage_error("expected K=V, got '" + kv + "'");
                try {
                    out[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
                } catch (const std::exception&) {
                    throw crflat::usage_error("bad numeric value in '" + kv + "'");
                }
            }
            start = end + 1;
        }
    }
}

int emit(const crflat::run_result& res, const std::string& format, const std::string& out_path) {
    const std::string text = crflat::render(res, format);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) {
            std::cerr << "cannot open output file: " << out_path << "\n";
            return 2;
        }
        f << text;
    }
    return res.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CR-flatness verification for tube and rigid hypersurface graphs in C^3"};
    app.require_subcommand(1);

    crflat::run_config cfg;
    std::string family, expr_text, form = "tube", out_path;
    std::vector<std::string> kv, ode_kv;
    std::vector<double> grid_center;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--order", cfg.order, "jet order (5..8, default 6)");
        sub->add_option("--tol-flat", cfg.tols.flat_tol, "flatness tolerance on scaled |J|, |W|");
        sub->add_option("--tol-sing", cfg.tols.sing_tol, "singular-term threshold on |S1|");
        sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--out", out_path, "output path (default stdout)");
    };

    CLI::App* check = app.add_subcommand("check", "evaluate invariants of a hypersurface on a grid");
    check->add_option("--family", family, "builtin family name (see `families`)");
    check->add_option("--param", kv, "family parameter K=V (repeatable)");
    check->add_option("--form", form, "tube or rigid (with --expr)")
        ->check(CLI::IsMember({"tube", "rigid"}));
    check->add_option("--expr", expr_text, "graphing function expression");
    check->add_option("--grid-center", grid_center, "grid center (2 numbers for tube, 4 for rigid)");
    check->add_option("--grid-halfwidth", cfg.grid.halfwidth, "grid halfwidth per axis");
    check->add_option("--grid-n", cfg.grid.n, "points per axis");
    add_common(check);

    CLI::App* param = app.add_subcommand("param", "verify a (p,q) Monge-Ampere profile pair");
    param->add_option("--p", cfg.p_text, "profile p(v)")->required();
    param->add_option("--q", cfg.q_text, "profile q(v)")->required();
    param->add_option("--grid-w", cfg.grid_w, "halfwidth of the w grid");
    param->add_option("--grid-n", cfg.grid.n, "points per axis of the (v,w) grid");
    add_common(param);

    CLI::App* ode = app.add_subcommand("ode", "residuals of the closed-form ODE families");
    ode->add_option("--ode-family", cfg.ode_family_name, "case1 | case2 | case3 | reinhardt");
    ode->add_option("--params", ode_kv, "ODE parameters, e.g. D=1,sigma=1");
    ode->add_option("--samples", cfg.samples, "number of sample points");
    ode->add_option("--monge-expr", cfg.monge_expr, "one-variable expression for the Monge residual table");
    add_common(ode);

    CLI::App* families = app.add_subcommand("families", "list the builtin hypersurface catalog");
    add_common(families);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (check->parsed()) {
            cfg.cmd = crflat::run_config::command::check;
            if (!family.empty()) cfg.family = family;
            if (!expr_text.empty()) cfg.expr_text = expr_text;
            cfg.form = form == "rigid" ? crflat::expr_domain::rigid : crflat::expr_domain::tube;
            cfg.grid.center = grid_center;
            parse_kv(kv, cfg.params);
        } else if (param->parsed()) {
            cfg.cmd = crflat::run_config::command::param;
        } else if (ode->parsed()) {
            cfg.cmd = crflat::run_config::command::ode;
            parse_kv(ode_kv, cfg.ode_params);
        } else if (families->parsed()) {
            cfg.cmd = crflat::run_config::command::families;
        }
        if (cfg.order < 5 || cfg.order > 8)
            throw crflat::usage_error("--order must be in [5, 8]");
        return emit(crflat::run(cfg), cfg.format, out_path);
    } catch (const crflat::usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const crflat::parse_error& e) {
        std::cerr << "expression error: " << e.what() << "\n";
        return 2;
    } catch (const crflat::param_out_of_range& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const crflat::unknown_family& e) {
        std::cerr << "family error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
