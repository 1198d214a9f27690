// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "oracle.hpp"
#include "support.hpp"

#include <hubwork/errors.hpp>
#include <hubwork/experiment.hpp>
#include <hubwork/records.hpp>

#include <json.hpp>

#include <cmath>
#include <numbers>

using namespace hubwork;
namespace fs = std::filesystem;

namespace {

SweepGrid small_grid() {
    SweepGrid g;
    g.num_sites = {2, 4};
    g.interactions = {0.0, 2.0, 6.0};
    g.taus = {0.0, 0.5, 2.0};
    return g;
}

} // namespace

TEST_CASE("single sudden-quench point matches the brute-force chain") {
    HubbardParams p;
    p.num_sites = 4;
    const auto r = run_single(p, {});
    REQUIRE(r.ok());
    const auto o = oracle::evaluate(4, 1.0, 0.0, 10.0, 0.4, 0.0);
    CHECK(r.thermo.mean_work == doctest::Approx(o.mean).epsilon(1e-12));
    CHECK(r.thermo.variance == doctest::Approx(o.var).epsilon(1e-11));
    CHECK(r.thermo.skew3 == doctest::Approx(o.skew3).epsilon(1e-9));
    CHECK(r.thermo.delta_f == doctest::Approx(o.delta_f).epsilon(1e-13));
    CHECK(r.thermo.sigma == doctest::Approx(o.sigma).epsilon(1e-10));
    CHECK(r.thermo.d_eq == doctest::Approx(o.d_eq).epsilon(1e-9));
    CHECK(r.thermo.jarzynski_residual < 1e-10);
    // frozen values of the independent summation
    CHECK(r.thermo.mean_work == doctest::Approx(33.33333333333332).epsilon(1e-12));
    CHECK(r.thermo.variance == doctest::Approx(35.38956641620022).epsilon(1e-11));
    CHECK(r.thermo.skew3 == doctest::Approx(8.513677738513062).epsilon(1e-9));
    CHECK(r.thermo.sigma == doctest::Approx(2.3532144327738167).epsilon(1e-10));
    CHECK(r.diagnostics.pair_count == 36 * 36);
}

TEST_CASE("null drive gives vanishing thermodynamics") {
    HubbardParams p;
    p.num_sites = 4;
    p.interaction = 3.0;
    p.drive_amplitude = 0.0;
    p.tau = 1.0;
    const auto r = run_single(p, {});
    REQUIRE(r.ok());
    CHECK(std::abs(r.thermo.mean_work) < 1e-9);
    CHECK(std::abs(r.thermo.variance) < 1e-12);
    CHECK(std::abs(r.thermo.delta_f) < 1e-12);
    CHECK(std::abs(r.thermo.sigma) < 1e-9);
    CHECK(r.thermo.d_eq < 1e-9);
    CHECK_FALSE(r.thermo.fdr.has_value());
}

TEST_CASE("Mott point reverses the inequality") {
    HubbardParams p;
    p.num_sites = 4;
    p.interaction = 10.0;
    p.tau = 10.0;
    const auto r = run_single(p, {});
    REQUIRE(r.ok());
    REQUIRE(r.thermo.fdr.has_value());
    CHECK(*r.thermo.fdr > 1.0);
    CHECK(r.diagnostics.wall_seconds < 60.0);
    CHECK(r.diagnostics.sigma_identity_defect < 1e-8);
    CHECK(r.diagnostics.mean_crosscheck < 1e-8 * std::max(1.0, r.thermo.mean_work));
    CHECK(r.thermo.d_adiab < r.thermo.d_eq);
}

TEST_CASE("dimer grid satisfies the Jarzynski identity pointwise") {
    SweepGrid g;
    g.num_sites = {2};
    g.interactions.clear();
    for (int i = 0; i <= 12; ++i) g.interactions.push_back(i);
    g.taus = {10.0};
    const auto dir = testing::scratch_dir("dimer_grid");
    const auto m = run_sweep(g, {}, dir);
    CHECK(m.failures == 0);
    REQUIRE(m.results.size() == 13);
    for (const auto& r : m.results) CHECK(r.thermo.jarzynski_residual < 1e-8);
}

TEST_CASE("grid defaults") {
    const auto g = SweepGrid::defaults();
    CHECK(g.interactions.size() == 49);
    CHECK(g.interactions.front() == 0.0);
    CHECK(g.interactions.back() == 12.0);
    CHECK(g.taus.front() == 0.0);
    CHECK(g.taus[1] == 0.2);
    CHECK(g.taus.back() == 10.0);
    CHECK(g.beta == 0.4);
    CHECK(g.drive_amplitude == 10.0);
    CHECK(g.interactions_for(8).size() == 12);
    CHECK(g.taus_for(8) == std::vector<double>{0.0, 0.5, 2.5, 10.0});
    CHECK(g.interactions_for(6).size() == 49);
    auto dense = g;
    dense.dense_large_chains = true;
    CHECK(dense.interactions_for(8).size() == 49);
    CHECK(g.point_count() == 2 * 49 * 13 + 12 * 4);

    auto bad = g;
    bad.taus = {-1.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = g;
    bad.num_sites = {10};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = g;
    bad.interactions.clear();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("sweep output is deterministic and schedule independent") {
    const auto g = small_grid();
    SweepOptions one;
    one.config_echo = R"({"k": 1})";
    SweepOptions four = one;
    four.workers = 4;
    const auto d1 = testing::scratch_dir("det_1");
    const auto d2 = testing::scratch_dir("det_2");
    const auto d3 = testing::scratch_dir("det_3");
    const auto m1 = run_sweep(g, one, d1);
    const auto m2 = run_sweep(g, one, d2);
    const auto m3 = run_sweep(g, four, d3);
    CHECK(m1.failures == 0);
    const auto r1 = read_text_file(d1 / "records.csv");
    CHECK(r1 == read_text_file(d2 / "records.csv"));
    CHECK(r1 == read_text_file(d3 / "records.csv"));
    REQUIRE(m1.distributions.size() == m3.distributions.size());
    for (std::size_t i = 0; i < m1.distributions.size(); ++i) CHECK(m1.distributions[i].sha256 == m3.distributions[i].sha256);

    // grid order: L, then U, then tau
    REQUIRE(m1.results.size() == 18);
    CHECK(m1.results[0].num_sites == 2);
    CHECK(m1.results[1].tau == 0.5);
    CHECK(m1.results[3].interaction == 2.0);
    CHECK(m1.results[9].num_sites == 4);

    // cached operators reproduce cold single-point runs
    HubbardParams p;
    p.num_sites = 4;
    p.interaction = 2.0;
    p.tau = 0.5;
    auto cold = run_single(p, {});
    cold.distribution_file = m1.results[13].distribution_file;
    CHECK(record_csv_row(cold) == record_csv_row(m1.results[13]));
}

TEST_CASE("manifest lists files with matching hashes") {
    const auto dir = testing::scratch_dir("manifest");
    SweepOptions opt;
    opt.config_echo = R"({"L": [2], "beta": 0.4})";
    SweepGrid g;
    g.num_sites = {2};
    g.interactions = {1.0, 3.0};
    g.taus = {0.0, 1.0};
    run_sweep(g, opt, dir);
    const auto m = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
    CHECK(m["format"] == "hubwork-sweep/1");
    CHECK(m["config"]["beta"] == 0.4);
    CHECK(m["units"]["energy"] == "J");
    CHECK(m["records"]["sha256"] == sha256_file(dir / "records.csv"));
    REQUIRE(m["points"].size() == 4);
    for (const auto& p : m["points"]) {
        CHECK(p["status"] == "ok");
        const std::string file = p["distribution"]["file"];
        CHECK(p["distribution"]["sha256"] == sha256_file(dir / file));
        const auto body = read_text_file(dir / file);
        CHECK(body.rfind("W_J,P\n", 0) == 0);
        CHECK(body.find('\r') == std::string::npos);
    }
}

TEST_CASE("point failures are recorded without aborting") {
    const auto dir = testing::scratch_dir("failures");
    SweepGrid g;
    g.num_sites = {2};
    g.interactions = {1.0};
    g.taus = {0.0, 1.0};
    SweepOptions opt;
    opt.point.propagation.dt = 0.5;
    opt.point.propagation.tol_observable = 1e-300;
    opt.point.propagation.max_refinements = 1;
    const auto m = run_sweep(g, opt, dir);
    CHECK(m.failures == 1);
    CHECK(m.results[0].ok());
    CHECK_FALSE(m.results[1].ok());
    const auto rows = read_records(dir / "records.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].at("status") == "failed");
    CHECK(std::isnan(rows[1].number("mean_work_J")));
    const auto j = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
    CHECK(j["failures"] == 1);
    CHECK(j["points"][1].contains("error"));
}

TEST_CASE("heatmaps") {
    SUBCASE("constant field") {
        std::vector<PointResult> res;
        for (double u : {0.0, 1.0, 2.0}) {
            for (double t : {0.0, 5.0}) {
                PointResult r;
                r.num_sites = 4;
                r.interaction = u;
                r.tau = t;
                r.thermo.d_eq = 0.25;
                res.push_back(r);
            }
        }
        const auto h = extract_heatmap(res, "d_eq", 4);
        CHECK(h.values.rows() == 2);
        CHECK(h.values.cols() == 3);
        CHECK((h.values.array() == 0.25).all());
        CHECK(h.missing == 0);
        CHECK_THROWS_AS((void)extract_heatmap(res, "d_eq", 6), ConfigError);
        CHECK_THROWS_AS((void)extract_heatmap(res, "nonsense", 4), ConfigError);
    }
    SUBCASE("from a sweep directory") {
        const auto dir = testing::scratch_dir("heatmap");
        const auto m = run_sweep(small_grid(), {}, dir);
        const auto a = extract_heatmap(dir, "skew3", 4);
        const auto b = extract_heatmap(dir / "manifest.json", "skew3_J3", 4);
        const auto c = extract_heatmap(m.results, "skew3_J3", 4);
        CHECK(a.interactions == std::vector<double>{0.0, 2.0, 6.0});
        CHECK(a.taus == std::vector<double>{0.0, 0.5, 2.0});
        CHECK((a.values.array() == b.values.array()).all());
        CHECK((a.values - c.values).cwiseAbs().maxCoeff() == 0.0);
        write_heatmap_csv(a, dir / "skew.csv");
        write_heatmap_svg(a, dir / "skew.svg");
        const auto csv = read_text_file(dir / "skew.csv");
        CHECK(csv.rfind("tau_invJ\\U_J,0,2,6\n", 0) == 0);
        const auto svg = read_text_file(dir / "skew.svg");
        CHECK(svg.find("U/J") != std::string::npos);
        CHECK(svg.find("&#964;&#183;J") != std::string::npos);
        CHECK_THROWS_AS((void)extract_heatmap(dir / "missing", "skew3", 4), ConfigError);
    }
}

TEST_CASE("extrema") {
    std::vector<double> x, y;
    for (int i = 0; i <= 20; ++i) {
        x.push_back(-1.0 + 0.1 * i);
        y.push_back(std::pow(x.back() - 0.23, 2));
    }
    auto e = locate_extrema(x, y);
    REQUIRE(e.minima.size() == 1);
    CHECK(e.maxima.empty());
    CHECK(e.minima[0].location == doctest::Approx(0.23).epsilon(1e-9));
    CHECK(e.minima[0].value == doctest::Approx(0.0).scale(1.0));

    x.clear();
    y.clear();
    for (int i = 0; i <= 400; ++i) {
        x.push_back(0.025 * i);
        y.push_back(std::sin(x.back()));
    }
    e = locate_extrema(x, y);
    REQUIRE(e.maxima.size() == 2);
    REQUIRE(e.minima.size() == 1);
    CHECK(e.maxima[0].location == doctest::Approx(std::numbers::pi / 2).epsilon(1e-4));
    CHECK(e.minima[0].location == doctest::Approx(1.5 * std::numbers::pi).epsilon(1e-4));
    REQUIRE(e.zero_crossings.size() == 3);
    CHECK(e.zero_crossings[0].direction == -1);
    CHECK(e.zero_crossings[0].location == doctest::Approx(std::numbers::pi).epsilon(1e-4));
    CHECK(e.zero_crossings[1].direction == 1);

    const std::vector<double> mono{1, 2, 3, 4};
    e = locate_extrema(mono, mono);
    CHECK(e.minima.empty());
    CHECK(e.maxima.empty());
    CHECK(e.zero_crossings.empty());
    const std::vector<double> two{1, 2};
    CHECK_THROWS_AS((void)locate_extrema(two, two), ConfigError);
}
