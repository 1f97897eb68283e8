#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sepdist/io.hpp"

namespace sepdist {

/// A sweep grid given either as an explicit array or as a linspace object
/// {"start": a, "stop": b, "step": s} / {"start": a, "stop": b, "count": n}.
inline std::vector<double> grid_from_json(const json& j, const std::string& name) {
    std::vector<double> values;
    if (j.is_array()) {
        for (const auto& v : j) values.push_back(v.get<double>());
    } else if (j.is_object() && j.contains("start") && j.contains("stop")) {
        const double start = j["start"].get<double>();
        const double stop = j["stop"].get<double>();
        if (j.contains("count")) {
            const int count = j["count"].get<int>();
            if (count < 2) throw ConfigError(name + ": count must be >= 2");
            for (int i = 0; i < count; ++i) {
                values.push_back(start + (stop - start) * i / (count - 1));
            }
        } else if (j.contains("step")) {
            const double step = j["step"].get<double>();
            if (!(step > 0.0)) throw ConfigError(name + ": step must be > 0");
            const int last = static_cast<int>(std::floor((stop - start) / step + 1e-9));
            for (int i = 0; i <= last; ++i) {
                values.push_back(start + step * i);
            }
        } else {
            throw ConfigError(name + ": linspace object needs step or count");
        }
    } else {
        throw ConfigError(name + ": expected an array or {start, stop, step|count}");
    }
    if (values.empty()) throw ConfigError(name + ": grid is empty");
    return values;
}

struct MonteCarloConfig {
    std::size_t n_samples = 100000;
    std::size_t n_runs = 100;
    std::uint64_t seed = 1;
};

/// Full experiment description; individual commands use the parts they need.
struct ExperimentConfig {
    SingleModeSpec squeezed = SingleModeSpec::squeezed_db(-1.8, 5.1);
    SingleModeSpec vacuum = SingleModeSpec::vacuum();
    SingleModeSpec thermal = SingleModeSpec::hot_squeezed_db(9.6, 10.2);
    double preparation_loss = 0.0;

    std::vector<double> detection_efficiency{0.839, 0.780, 0.784};
    std::vector<double> sigma_grid_deg;       // phase sweep grid, degrees
    std::vector<double> thermal_grid_db;      // thermal sweep grid, dB
    std::vector<double> loss_grid;            // detection-loss subtraction grid
    std::vector<double> fig3_loss_values{0.0, 0.2, 0.25, 1.0 / 3.0, 0.35, 0.4};
    std::vector<double> fig3_squeezing_db{10.0, 6.0};
    double gaussian_fraction = 0.75;
    MonteCarloConfig monte_carlo;
    std::optional<std::string> out_dir;

    ExperimentConfig() {
        for (int i = 0; i <= 48; ++i) sigma_grid_deg.push_back(0.25 * i);
        for (int i = 0; i < 200; ++i) thermal_grid_db.push_back(20.0 * i / 199.0);
        for (int i = 0; i <= 120; ++i) loss_grid.push_back(0.0025 * i);
    }
};

inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    try {
        if (j.contains("inputs")) {
            const auto& in = j["inputs"];
            if (in.contains("squeezed")) cfg.squeezed = spec_from_json(in["squeezed"]);
            if (in.contains("vacuum")) cfg.vacuum = spec_from_json(in["vacuum"]);
            if (in.contains("thermal")) cfg.thermal = spec_from_json(in["thermal"]);
        }
        if (j.contains("preparation_loss")) {
            cfg.preparation_loss = j["preparation_loss"].get<double>();
            if (cfg.preparation_loss < 0.0 || cfg.preparation_loss > 1.0) {
                throw ConfigError("preparation_loss must lie in [0, 1]");
            }
        }
        if (j.contains("detection_efficiency")) {
            cfg.detection_efficiency = j["detection_efficiency"].get<std::vector<double>>();
            LossVector check(cfg.detection_efficiency);  // validates range
        }
        if (j.contains("sigma_grid_deg")) {
            cfg.sigma_grid_deg = grid_from_json(j["sigma_grid_deg"], "sigma_grid_deg");
        }
        if (j.contains("thermal_grid_db")) {
            cfg.thermal_grid_db = grid_from_json(j["thermal_grid_db"], "thermal_grid_db");
        }
        if (j.contains("loss_grid")) {
            cfg.loss_grid = grid_from_json(j["loss_grid"], "loss_grid");
        }
        if (j.contains("fig3_loss_values")) {
            cfg.fig3_loss_values = grid_from_json(j["fig3_loss_values"], "fig3_loss_values");
        }
        if (j.contains("fig3_squeezing_db")) {
            cfg.fig3_squeezing_db = grid_from_json(j["fig3_squeezing_db"], "fig3_squeezing_db");
        }
        if (j.contains("gaussian_fraction")) {
            cfg.gaussian_fraction = j["gaussian_fraction"].get<double>();
            GaussianFraction check(cfg.gaussian_fraction);
        }
        if (j.contains("monte_carlo")) {
            const auto& mc = j["monte_carlo"];
            if (mc.contains("n_samples")) cfg.monte_carlo.n_samples = mc["n_samples"].get<std::size_t>();
            if (mc.contains("n_runs")) cfg.monte_carlo.n_runs = mc["n_runs"].get<std::size_t>();
            if (mc.contains("seed")) cfg.monte_carlo.seed = mc["seed"].get<std::uint64_t>();
        }
        if (j.contains("out_dir")) {
            cfg.out_dir = j["out_dir"].get<std::string>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    try {
        return config_from_json(json::parse(read_file(path)));
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

} // namespace sepdist
