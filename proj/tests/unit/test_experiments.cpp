#include "experiments.hpp"
#include "outputs.hpp"
#include "svg.hpp"

#include "../oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace mcr;
using namespace mcr::experiments;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("mcr_test_" + name);
    fs::remove_all(dir);
    return dir;
}

SweepSpec tiny_spec() {
    SweepSpec spec;
    spec.base.steps = 1;
    spec.base.grid_rows = 6;
    spec.base.grid_cols = 6;
    spec.xi_values = {0.0, 1.0};
    spec.configurations = {{"only", 2.0, 3.0}};
    spec.replications = 1;
    return spec;
}

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("spearman") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    CHECK(spearman(x, std::vector<double>{5, 6, 7, 8, 7}) == doctest::Approx(0.8207826816681233).epsilon(1e-12));
    CHECK(spearman(x, std::vector<double>{10, 8, 6, 4, 2}) == doctest::Approx(-1.0));
    CHECK(spearman(x, std::vector<double>{1, 1, 1, 1, 1}) != spearman(x, std::vector<double>{1, 1, 1, 1, 1}));
    CHECK(std::isnan(spearman(std::vector<double>{1}, std::vector<double>{2})));
}

TEST_CASE("variants") {
    const auto base = world::default_config();
    SUBCASE("placement and weights") {
        const auto cfg = apply_variant(base, {"v", 3.0, 4.0});
        CHECK(cfg.centers[1].amplitude == 3.0 * cfg.centers[0].amplitude);
        CHECK(cfg.centers[0].position.row == cfg.centers[1].position.row);
        CHECK(cfg.centers[0].position.col - cfg.centers[1].position.col == doctest::Approx(4.0));
    }
    SUBCASE("bad variants") {
        auto field_of = [&](world::ScenarioConfig b, ScenarioVariant v) {
            try {
                apply_variant(b, v);
            } catch (const world::ConfigError& e) {
                return e.field();
            }
            return std::string("none");
        };
        CHECK(field_of(base, {"v", 0.0, 4.0}) == "weight_ratio");
        CHECK(field_of(base, {"v", 1.0, 12.0}) == "center_distance");
        auto one = base;
        one.centers.resize(1);
        CHECK(field_of(one, {"v", 1.0, 4.0}) == "centers");
    }
    SUBCASE("sweep spec validation") {
        auto spec = tiny_spec();
        spec.xi_values = {1.2};
        CHECK_THROWS_AS(validate(spec), world::ConfigError);
        spec = tiny_spec();
        spec.configurations.push_back(spec.configurations[0]);
        CHECK_THROWS_AS(validate(spec), world::ConfigError);
        spec = tiny_spec();
        spec.configurations[0].name = "a,b";
        CHECK_THROWS_AS(validate(spec), world::ConfigError);
        spec = tiny_spec();
        spec.replications = 0;
        CHECK_THROWS_AS(validate(spec), world::ConfigError);
    }
}

TEST_CASE("sweep output") {
    SUBCASE("cardinality") {
        const auto res = run_sweep(tiny_spec(), 1);
        REQUIRE(res.rows.size() == 2);
        CHECK(res.failures == 0);
        CHECK(res.rows[0].xi == 0.0);
        CHECK(res.rows[1].xi == 1.0);
        auto spec = tiny_spec();
        spec.replications = 3;
        spec.xi_values = {0.5, 0.0, 1.0};
        spec.configurations.push_back({"another", 1.0, 2.0});
        const auto big = run_sweep(spec, 2);
        CHECK(big.rows.size() == 3 * 3 * 2);
        CHECK(big.rows.front().configuration == "another");
        for (std::size_t k = 1; k < big.rows.size(); ++k) {
            const auto& p = big.rows[k - 1];
            const auto& q = big.rows[k];
            const bool ordered = p.configuration < q.configuration ||
                                 (p.configuration == q.configuration &&
                                  (p.xi < q.xi || (p.xi == q.xi && p.seed < q.seed)));
            CHECK(ordered);
        }
        CHECK(big.trends.size() == 2);
    }
    SUBCASE("CSV round trip and plot regenerated from the CSV alone") {
        auto spec = tiny_spec();
        spec.replications = 2;
        const auto res = run_sweep(spec, 1);
        const auto dir = scratch("sweep");
        write_sweep_outputs(res, dir);
        const std::string csv = outputs::read_text(dir / "sweep.csv");
        CHECK(csv.rfind("configuration,xi,seed,total_accessibility,total_travel_time,status\n", 0) == 0);
        const auto parsed = parse_sweep_csv(csv);
        REQUIRE(parsed.size() == res.rows.size());
        for (std::size_t k = 0; k < parsed.size(); ++k) {
            CHECK(parsed[k].total_accessibility == res.rows[k].total_accessibility);
            CHECK(parsed[k].seed == res.rows[k].seed);
        }
        CHECK(sweep_svg(parsed) == outputs::read_text(dir / "sweep.svg"));
        CHECK(fs::exists(dir / "trend.csv"));
        fs::remove_all(dir);
    }
    SUBCASE("curves average the successful rows") {
        std::vector<SweepRow> rows{{"a", 0.0, 1, 10, 1, "ok"}, {"a", 0.0, 2, 20, 1, "ok"},
                                   {"a", 1.0, 1, 5, 1, "ok"},  {"a", 1.0, 2, 0, 0, "error: x"}};
        const auto curves = sweep_curves(rows);
        REQUIRE(curves.size() == 1);
        REQUIRE(curves[0].points.size() == 2);
        CHECK(curves[0].points[0].mean_accessibility == 15.0);
        CHECK(curves[0].points[1].mean_accessibility == 5.0);
        CHECK(curves[0].points[1].runs == 1);
        CHECK(sweep_trends(rows)[0].spearman == doctest::Approx(-1.0));
    }
}

TEST_CASE("replicate outputs") {
    auto cfg = world::default_config();
    cfg.steps = 2;
    SUBCASE("summary mean equals the per-seed history files") {
        const auto rep = engine::replicate(cfg, 3, 4, 1);
        const auto dir = scratch("replicate");
        write_replicate_outputs(rep, dir);
        double mean = 0.0;
        for (std::uint64_t s = 4; s <= 6; ++s) {
            const auto hist = outputs::parse_history_csv(
                outputs::read_text(dir / "runs" / ("history_seed_" + std::to_string(s) + ".csv")));
            mean += hist.back().total_accessibility / 3;
        }
        const auto summary = parse_replicate_summary_csv(outputs::read_text(dir / "replicate_summary.csv"));
        CHECK(summary.n == 3);
        CHECK(oracle::rel_err(summary.mean[0], mean) <= 1e-12);
        const auto finals = parse_replicate_runs_csv(outputs::read_text(dir / "replicate_runs.csv"));
        CHECK(ellipse_svg(summary, finals) == outputs::read_text(dir / "ellipse.svg"));
        fs::remove_all(dir);
    }
    SUBCASE("a single replicate draws a point, not an ellipse") {
        const auto rep = engine::replicate(cfg, 1, 1, 1);
        std::vector<engine::FinalIndicators> finals;
        for (const auto& r : rep.runs) finals.push_back(engine::final_indicators(r));
        const std::string svg_text = ellipse_svg(rep.stats, finals);
        CHECK(svg_text.find("<polygon") == std::string::npos);
        CHECK(svg_text.find("<circle") != std::string::npos);
    }
}

TEST_CASE("svg primitives") {
    SUBCASE("ellipse contour lies on the 1-sigma level set") {
        const svg::EllipseSpec e{{2.0, -1.0}, 4.0, 1.0, 3.0};
        const double det = 4.0 * 3.0 - 1.0;
        for (const auto& p : svg::ellipse_contour(e, 36)) {
            const double dx = p.x - 2.0;
            const double dy = p.y + 1.0;
            const double q = (3.0 * dx * dx - 2.0 * 1.0 * dx * dy + 4.0 * dy * dy) / det;
            CHECK(q == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("map has one rect per cell and one line per link") {
        std::vector<svg::MapCell> cells;
        for (int c = 0; c < 6; ++c) cells.push_back({c, c / 3, c % 3, c < 3 ? 0 : 1, double(c)});
        const auto text = svg::render_map(cells, {{0, 5}, {1, 2}}, "t");
        std::size_t rects = 0;
        for (auto pos = text.find("<rect"); pos != std::string::npos; pos = text.find("<rect", pos + 1)) ++rects;
        CHECK(rects >= 6);
        CHECK(text.find("</svg>") != std::string::npos);
    }
}

}
