#include <crflat/run.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <set>

using namespace crflat;
using Catch::Matchers::WithinAbs;

namespace {

run_config check_config(const std::string& family,
                        const std::map<std::string, double>& params = {}) {
    run_config cfg;
    cfg.cmd = run_config::command::check;
    cfg.family = family;
    cfg.params = params;
    return cfg;
}

} // namespace

TEST_CASE("check on a flat family: all points flat, exit 0") {
    const run_result res = run(check_config("thm54_i", {{"D", 1.0}}));
    CHECK(res.exit_code == 0);
    const auto& report = res.report;
    CHECK(report["summary"]["points_total"] == 9);
    CHECK(report["summary"]["labels"]["flat"] == 9);
    CHECK(report["summary"]["expectation_met"] == true);
    REQUIRE(report["points"].is_array());
    REQUIRE(report["points"].size() == 9);

    // spec'd key order for point records
    const auto& p0 = report["points"][0];
    std::vector<std::string> keys;
    for (auto it = p0.begin(); it != p0.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"index", "point", "S", "S1", "J", "W", "residuals",
                                           "predicates", "flags", "label"});
    CHECK(p0["label"] == "flat");
}

TEST_CASE("check on a raw degenerate expression: exit 1") {
    run_config cfg;
    cfg.cmd = run_config::command::check;
    cfg.expr_text = "(t1+t2)^2";
    cfg.form = expr_domain::tube;
    const run_result res = run(cfg);
    CHECK(res.exit_code == 1);
    CHECK(res.report["summary"]["labels"]["two_degenerate"] == 9);
    CHECK(res.report["points"][0]["J"].is_null());
}

TEST_CASE("rigid check carries the rigid record fields") {
    const run_result res = run(check_config("fk"));
    CHECK(res.exit_code == 0);
    const auto& pts = res.report["points"];
    CHECK(pts.size() == 81);
    int evaluated = 0;
    for (const auto& p : pts) {
        if (p["label"] == "out_of_domain") continue;
        ++evaluated;
        REQUIRE(p.contains("S1bar"));
        REQUIRE(p["S"].is_array());
        CHECK(p["residuals"].contains("cma_scaled"));
        CHECK(p["residuals"].contains("s1_max"));
        CHECK(p["residuals"]["s1_max"].get<double>() < 1e-9);
        CHECK(p["label"] == "flat");
    }
    CHECK(evaluated == res.report["summary"]["points_evaluated"].get<int>());
    CHECK(evaluated == 81);  // fk guard 1-|z2|^2 is far from 0 on the default grid
}

TEST_CASE("guard-skipped points carry the triggering guard") {
    // push the grid into the guard zone of family (ii): 1 - D|z2+1|^4 ~ 0
    run_config cfg = check_config("thm54_ii", {{"D", 0.8}});
    cfg.grid.center = {0, 0, 0.06, 0};
    cfg.grid.halfwidth = 0.06;
    const run_result res = run(cfg);
    bool saw_skip = false;
    for (const auto& p : res.report["points"]) {
        if (p["label"] == "out_of_domain") {
            saw_skip = true;
            CHECK(p.contains("guard"));
            CHECK(p["guard"].get<std::string>().find("0.8") != std::string::npos);
        }
    }
    CHECK(saw_skip);
}

TEST_CASE("two consecutive runs are byte-identical") {
    const run_config cfg = check_config("thm54_ii", {{"D", 0.5}});
    const std::string a = render(run(cfg), "json");
    const std::string b = render(run(cfg), "json");
    CHECK(a == b);
    CHECK(!a.empty());
}

TEST_CASE("CSV carries the same numbers as JSON") {
    const run_config cfg = check_config("thm54_i", {{"D", 2.0}});
    const run_result res = run(cfg);
    const std::string csv = to_csv(res.report);
    REQUIRE(!csv.empty());

    // split into lines/cells
    std::vector<std::vector<std::string>> rows;
    std::string line;
    for (std::size_t pos = 0; pos < csv.size();) {
        const std::size_t nl = csv.find('\n', pos);
        line = csv.substr(pos, nl - pos);
        pos = nl + 1;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (start <= line.size()) {
            std::size_t end = line.find(',', start);
            if (end == std::string::npos) end = line.size();
            cells.push_back(line.substr(start, end - start));
            start = end + 1;
        }
        rows.push_back(std::move(cells));
    }
    REQUIRE(rows.size() >= 10);  // header + 9 points
    const auto& header = rows[0];
    auto col = [&](const std::string& name) {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == name) return c;
        FAIL("missing column " << name);
        return std::size_t(0);
    };
    const std::size_t s_col = col("S"), j_col = col("J"), ma_col = col("residuals.ma_raw");
    for (int i = 0; i < 9; ++i) {
        const auto& point = res.report["points"][i];
        const auto& cells = rows[std::size_t(i) + 1];
        CHECK(std::strtod(cells[s_col].c_str(), nullptr) == point["S"].get<double>());
        CHECK(std::strtod(cells[j_col].c_str(), nullptr) == point["J"].get<double>());
        CHECK(std::strtod(cells[ma_col].c_str(), nullptr) ==
              point["residuals"]["ma_raw"].get<double>());
    }
}

TEST_CASE("param pipeline on the closed-form pair") {
    run_config cfg;
    cfg.cmd = run_config::command::param;
    cfg.p_text = "v^2/2";
    cfg.q_text = "v";
    cfg.grid_w = 0.1;
    const run_result res = run(cfg);
    CHECK(res.exit_code == 0);
    CHECK(res.report["validate"]["ok"] == true);
    CHECK(res.report["summary"]["max_ma_scaled"].get<double>() < 1e-9);
    CHECK(res.report["ratio_constancy"]["is_constant"] == true);
    CHECK_THAT(res.report["ratio_constancy"]["value_at_0"].get<double>(), WithinAbs(1.0, 1e-12));
    for (const auto& row : res.report["v_samples"])
        for (const auto& r : row["monge_system_scaled"])
            CHECK(r.get<double>() < 1e-9);

    cfg.p_text = "v^3/6";  // inadmissible
    const run_result bad = run(cfg);
    CHECK(bad.exit_code == 1);
    CHECK(bad.report["validate"]["ok"] == false);
}

TEST_CASE("ode pipeline") {
    run_config cfg;
    cfg.cmd = run_config::command::ode;
    cfg.ode_family_name = "case1";
    cfg.ode_params = {{"D", 1.0}, {"sigma", 1.0}};
    cfg.samples = 8;
    const run_result res = run(cfg);
    CHECK(res.exit_code == 0);
    CHECK(res.report["liouville"].size() == 8);
    for (const auto& row : res.report["liouville"]) {
        CHECK(row["residual_ode"].get<double>() < 1e-10);
        CHECK(row["residual_integral"].get<double>() < 1e-10);
    }

    cfg.ode_family_name = "";
    cfg.monge_expr = "sqrt(1+v^2)-1";
    const run_result res2 = run(cfg);
    CHECK(res2.exit_code == 0);
    for (const auto& row : res2.report["monge_1d"])
        CHECK(row["scaled"].get<double>() < 1e-10);

    cfg.monge_expr = "";
    CHECK_THROWS_AS(run(cfg), usage_error);
}

TEST_CASE("families listing") {
    run_config cfg;
    cfg.cmd = run_config::command::families;
    const run_result res = run(cfg);
    CHECK(res.exit_code == 0);
    CHECK(res.report["families"].size() == 9);
    CHECK(res.report["families"][0]["name"] == "thm54_i");
    const std::string once = render(res, "json");
    CHECK(once == render(run(cfg), "json"));
}

TEST_CASE("orders 5 through 8 agree on smooth flat families") {
    run_config base = check_config("fk");
    std::string ref;
    for (int order : {6, 7, 8}) {
        run_config cfg = base;
        cfg.order = order;
        const run_result res = run(cfg);
        CHECK(res.exit_code == 0);
        // labels identical at every order with S111 available
        std::string labels;
        for (const auto& p : res.report["points"]) labels += p["label"].get<std::string>();
        if (ref.empty()) ref = labels;
        CHECK(labels == ref);
    }
    run_config cfg5 = base;
    cfg5.order = 5;
    const run_result res5 = run(cfg5);
    CHECK(res5.exit_code == 0);
    for (const auto& p : res5.report["points"]) {
        if (p["label"] == "out_of_domain") continue;
        CHECK(p["flags"]["s111_term_dropped"] == true);
    }
}

TEST_CASE("tolerance overrides flow through the runner") {
    // the light-cone graph leaves genuine rounding residue (~1e-16), so an
    // absurdly tight tolerance must flip its labels; rational families like
    // fk evaluate to exact zeros and stay flat at any tolerance
    run_config cfg = check_config("lightcone_tube");
    cfg.tols.flat_tol = 1e-30;
    const run_result res = run(cfg);
    CHECK(res.exit_code == 1);
    // off t1 = 0 the sqrt leaves rounding residue, so those points flip
    CHECK(res.report["summary"]["labels"]["flat"].get<int>() < 9);
    CHECK(res.report["summary"]["labels"]["not_rank1"].get<int>() > 0);
    CHECK(res.report["config"]["tolerances"]["flat_tol"].get<double>() == 1e-30);

    run_config loose = check_config("lightcone_tube");
    CHECK(run(loose).exit_code == 0);
}

TEST_CASE("expectation semantics for negative controls") {
    // declared nonflat: met as soon as some point is nonflat or not_rank1
    const run_result pert = run(check_config("perturbed_i", {{"D", 1.0}}));
    CHECK(pert.exit_code == 0);
    CHECK(pert.report["summary"]["labels"]["not_rank1"].get<int>() > 0);

    const run_result pq = run(check_config("pq_generic"));
    CHECK(pq.exit_code == 0);
    CHECK(pq.report["summary"]["labels"]["nonflat"].get<int>() > 0);

    // raw nonflat-but-valid expression: unknown expectation, exit 0
    run_config cfg;
    cfg.cmd = run_config::command::check;
    cfg.expr_text = "2*t1^2/(t2+1) + t1^5";
    cfg.form = expr_domain::tube;
    cfg.grid.center = {0.2, 0.0};  // keep S1 away from 0
    cfg.grid.halfwidth = 0.02;
    const run_result raw = run(cfg);
    CHECK(raw.report["summary"]["labels"]["not_rank1"].get<int>() == 9);
    CHECK(raw.exit_code == 1);  // class membership fails: rank-1 violated
}
