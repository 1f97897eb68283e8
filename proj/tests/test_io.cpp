#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "fixtures.hpp"
#include "sepdist/config.hpp"
#include "sepdist/io.hpp"

using namespace sepdist;
using Catch::Approx;

TEST_CASE("matrix JSON round trip") {
    const auto g = fixtures::gamma_measured();
    const json j = matrix_to_json(g);
    CHECK(j["n_modes"] == 3);
    CHECK(j["ordering"] == "xpxp");
    const auto back = matrix_from_json(j);
    CHECK((back.matrix() - g.matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("matrix JSON validation") {
    CHECK_THROWS_AS(matrix_from_json(json::parse(R"({"n_modes": 2})")), ConfigError);
    CHECK_THROWS_AS(
        matrix_from_json(json::parse(
            R"({"n_modes": 1, "ordering": "xxpp", "data": [[1, 0], [0, 1]]})")),
        ConfigError);
    CHECK_THROWS_AS(
        matrix_from_json(json::parse(R"({"n_modes": 2, "data": [[1, 0], [0, 1]]})")),
        ConfigError);
}

TEST_CASE("matrix text round trip") {
    const auto g = fixtures::gamma_loss_compensated();
    const auto back = matrix_from_text(matrix_to_text(g));
    CHECK((back.matrix() - g.matrix()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(matrix_from_text("1 2 3"), ConfigError);
}

TEST_CASE("load_matrix sniffs the format") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "sepdist_io_test";
    fs::create_directories(dir);
    const auto g = fixtures::gamma_measured();

    save_matrix(dir / "m.json", g);
    const auto from_json_file = load_matrix(dir / "m.json");
    CHECK((from_json_file.matrix() - g.matrix()).cwiseAbs().maxCoeff() == 0.0);

    save_matrix(dir / "m.txt", g);
    const auto from_text_file = load_matrix(dir / "m.txt");
    CHECK((from_text_file.matrix() - g.matrix()).cwiseAbs().maxCoeff() < 1e-15);

    CHECK_THROWS_AS(load_matrix(dir / "missing.json"), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("state spec JSON") {
    const auto spec = spec_from_json(
        json::parse(R"({"kind": "squeezed", "var_x_db": -1.8, "var_p_db": 5.1})"));
    CHECK(spec.kind == StateKind::squeezed);
    CHECK(spec.var_x == Approx(db_to_variance(-1.8)));

    const json round = spec_to_json(spec);
    CHECK(round["kind"] == "squeezed");
    CHECK(round["var_x_db"].get<double>() == Approx(-1.8));

    CHECK(spec_from_json(json::parse(R"({"kind": "vacuum"})")).var_x == 1.0);
    CHECK_THROWS_AS(spec_from_json(json::parse(R"({"kind": "vacuum", "var_x_db": 1.0})")),
                    ConfigError);
    CHECK_THROWS_AS(spec_from_json(json::parse(R"({"kind": "squeezed"})")), ConfigError);
    CHECK_THROWS_AS(
        spec_from_json(json::parse(R"({"kind": "thermal", "var_x_db": 1, "var_p_db": 2})")),
        ConfigError);
    CHECK_THROWS_AS(spec_from_json(json::parse(R"({"kind": "laser"})")), ConfigError);
    CHECK_THROWS_AS(
        spec_from_json(json::parse(R"({"kind": "thermal", "var_x_db": -3, "var_p_db": -3})")),
        UnphysicalSpec);
}

TEST_CASE("grids accept arrays and linspace objects") {
    CHECK(grid_from_json(json::parse("[1, 2, 3]"), "g") == std::vector<double>{1, 2, 3});

    const auto stepped = grid_from_json(json::parse(R"({"start": 0, "stop": 1, "step": 0.25})"), "g");
    REQUIRE(stepped.size() == 5);
    CHECK(stepped.back() == Approx(1.0));

    const auto counted =
        grid_from_json(json::parse(R"({"start": 0, "stop": 20, "count": 200})"), "g");
    REQUIRE(counted.size() == 200);
    CHECK(counted.front() == 0.0);
    CHECK(counted.back() == Approx(20.0));

    CHECK_THROWS_AS(grid_from_json(json::parse("[]"), "g"), ConfigError);
    CHECK_THROWS_AS(grid_from_json(json::parse(R"({"start": 0, "stop": 1})"), "g"), ConfigError);
    CHECK_THROWS_AS(grid_from_json(json::parse("3"), "g"), ConfigError);
}

TEST_CASE("experiment config parsing") {
    const json j = json::parse(R"({
        "inputs": {
            "squeezed": {"kind": "squeezed", "var_x_db": -1.8, "var_p_db": 5.1},
            "vacuum": {"kind": "vacuum"},
            "thermal": {"kind": "hot_squeezed", "var_x_db": 9.6, "var_p_db": 10.2}
        },
        "preparation_loss": 0.1,
        "detection_efficiency": [0.839, 0.780, 0.784],
        "sigma_grid_deg": {"start": 0, "stop": 12, "step": 0.25},
        "gaussian_fraction": 0.75,
        "monte_carlo": {"n_samples": 1000, "n_runs": 10, "seed": 42},
        "out_dir": "results"
    })");
    const auto cfg = config_from_json(j);
    CHECK(cfg.preparation_loss == 0.1);
    CHECK(cfg.detection_efficiency == std::vector<double>{0.839, 0.780, 0.784});
    CHECK(cfg.sigma_grid_deg.size() == 49);
    CHECK(cfg.gaussian_fraction == 0.75);
    CHECK(cfg.monte_carlo.n_samples == 1000);
    CHECK(cfg.monte_carlo.seed == 42);
    REQUIRE(cfg.out_dir.has_value());
    CHECK(*cfg.out_dir == "results");

    CHECK_THROWS_AS(config_from_json(json::parse(R"({"preparation_loss": 1.5})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"detection_efficiency": [0.9, 0, 0.9]})")),
                    ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"gaussian_fraction": -0.2})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"monte_carlo": {"n_samples": "many"}})")),
                    ConfigError);
}

TEST_CASE("csv number formatting") {
    CHECK(csv_number(0.25) == "0.25");
    CHECK(csv_number(1.0) == "1");
    CHECK(csv_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("sweep table CSV layouts") {
    std::vector<LossSweepRow> rows(2);
    rows[0] = {0.0, 0.885, 1.098, 1.070, true};
    rows[1] = {0.25, std::numeric_limits<double>::quiet_NaN(),
               std::numeric_limits<double>::quiet_NaN(),
               std::numeric_limits<double>::quiet_NaN(), false};
    CHECK(loss_sweep_csv(rows) ==
          "loss,muA,muB,muC,physical\n"
          "0,0.885,1.098,1.07,1\n"
          "0.25,nan,nan,nan,0\n");

    PhaseSweepResult sweep;
    sweep.rows.push_back({0.0, 1.11, 0.847, 1.036});
    sweep.rows.push_back({std::numbers::pi / 180.0, 1.10, 0.84, 1.03});
    const std::string csv = phase_sweep_csv(sweep);
    CHECK(csv.rfind("sigma_deg,mu0,muA,min_muB_muC\n", 0) == 0);
    CHECK(csv.find("\n0,1.11,0.847,1.036\n") != std::string::npos);
    CHECK(csv.find("\n1,1.1,0.84,1.03\n") != std::string::npos);  // radians in, degrees out
}

TEST_CASE("matrix_from_string sniffs both formats") {
    const auto g = fixtures::gamma_measured();
    const auto from_json_text = matrix_from_string(matrix_to_json(g).dump(), "test");
    CHECK((from_json_text.matrix() - g.matrix()).cwiseAbs().maxCoeff() == 0.0);
    const auto from_plain = matrix_from_string(matrix_to_text(g), "test");
    CHECK((from_plain.matrix() - g.matrix()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(matrix_from_string("{not json", "test"), ConfigError);
}
