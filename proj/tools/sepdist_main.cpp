// Command-line front end: wires state preparation, separability analysis,
// noise compensation and the tomography simulation into reproducible
// experiments emitting CSV/JSON under --out.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sepdist/sepdist.hpp"

namespace fs = std::filesystem;
using namespace sepdist;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitUnphysical = 3;
constexpr int kExitAssertion = 4;

struct CliOptions {
    std::optional<std::string> config_path;
    std::optional<std::string> gamma_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<std::size_t> runs;
};

ExperimentConfig effective_config(const CliOptions& opts) {
    ExperimentConfig cfg = opts.config_path ? load_config(*opts.config_path)
                                            : ExperimentConfig{};
    if (opts.seed) cfg.monte_carlo.seed = *opts.seed;
    if (opts.samples) cfg.monte_carlo.n_samples = *opts.samples;
    if (opts.runs) cfg.monte_carlo.n_runs = *opts.runs;
    return cfg;
}

fs::path ensure_out_dir(const CliOptions& opts, const ExperimentConfig& cfg) {
    fs::path dir = opts.out_dir;
    if (opts.out_dir == "out" && cfg.out_dir) dir = *cfg.out_dir;
    fs::create_directories(dir);
    return dir;
}

CovarianceMatrix read_stdin_matrix() {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return matrix_from_string(buf.str(), "stdin");
}

CovarianceMatrix load_three_mode(const std::string& path) {
    CovarianceMatrix g = path == "-" ? read_stdin_matrix() : load_matrix(path);
    if (g.n_modes() != 3) {
        throw ConfigError(path + ": expected a three-mode (6x6) covariance matrix");
    }
    return g;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

int cmd_protocol(const CliOptions& opts) {
    const ExperimentConfig cfg = effective_config(opts);
    const fs::path out = ensure_out_dir(opts, cfg);

    CovarianceMatrix gamma = opts.gamma_path ? load_three_mode(*opts.gamma_path)
                                             : build_protocol_state(cfg);
    if (!is_physical(gamma)) {
        throw NotPositiveDefinite("input state is not a physical covariance matrix");
    }
    const ProtocolReport rep = run_protocol(gamma, opts.gamma_path.value_or("model"));

    const auto verdict = [](double mu) {
        return indicates_entanglement(mu) ? "entangled" : "separable";
    };
    std::cout << "source: " << rep.source << "\n"
              << "PPT_A = " << fmt(rep.ppt_a) << " (" << verdict(rep.ppt_a) << ")\n"
              << "PPT_B = " << fmt(rep.ppt_b) << " (" << verdict(rep.ppt_b) << ")\n"
              << "PPT_C = " << fmt(rep.ppt_c) << " (" << verdict(rep.ppt_c) << ")\n"
              << "phi_star_rad = " << csv_number(rep.phi_star) << "\n"
              << "duan_star = " << fmt(rep.duan_star) << " (threshold 4: "
              << (rep.duan_star < 4.0 ? "entangled" : "not witnessed") << ")\n"
              << "verdict: separable-carrier distribution "
              << (rep.succeeded ? "succeeded" : "failed") << "\n";
    write_file(out / "protocol.json", protocol_to_json(rep).dump(2) + "\n");
    return rep.succeeded ? kExitOk : kExitAssertion;
}

int cmd_fig3(const CliOptions& opts) {
    const ExperimentConfig cfg = effective_config(opts);
    const fs::path out = ensure_out_dir(opts, cfg);

    const Fig3Report rep = run_fig3(cfg);
    write_file(out / "fig3.csv", fig3_csv(rep));

    for (const auto& cr : rep.crossings) {
        std::cout << "loss=" << csv_number(cr.loss) << " squeezing_db=" << csv_number(cr.squeezing_db)
                  << " crossing=" << (cr.exists ? "yes" : "no");
        if (cr.crossing_db) {
            std::cout << " at thermal_db=" << fmt(*cr.crossing_db);
        } else if (cr.exists) {
            std::cout << " (beyond grid)";
        }
        std::cout << "\n";
    }
    std::cout << "max |PPT_B - PPT_C| = " << csv_number(rep.max_bc_asymmetry) << "\n"
              << "crossing iff loss > 1/3: " << (rep.crossing_iff_loss_above_third ? "yes" : "NO")
              << "\n"
              << "max crossing spread across squeezing levels = "
              << csv_number(rep.max_crossing_spread_db) << " dB ("
              << (rep.crossing_independent_of_squeezing ? "independent" : "NOT independent")
              << ")\n";
    const bool ok = rep.crossing_iff_loss_above_third && rep.crossing_independent_of_squeezing &&
                    rep.max_bc_asymmetry <= 1e-8;
    return ok ? kExitOk : kExitAssertion;
}

int cmd_fig4(const CliOptions& opts) {
    const ExperimentConfig cfg = effective_config(opts);
    const fs::path out = ensure_out_dir(opts, cfg);
    if (!opts.gamma_path) throw ConfigError("fig4 needs --gamma <matrix file>");

    const CovarianceMatrix gamma = load_three_mode(*opts.gamma_path);
    const Fig4Report rep = run_fig4(gamma, cfg.loss_grid);
    write_file(out / "fig4.csv", loss_sweep_csv(rep.rows));

    std::cout << "rows: " << rep.rows.size() << "; estimated detection-loss band ["
              << csv_number(rep.band_lo) << ", " << csv_number(rep.band_hi) << "]\n";
    for (const auto& r : rep.rows) {
        if (r.loss >= rep.band_lo && r.loss <= rep.band_hi) {
            std::cout << "band loss=" << csv_number(r.loss) << " muA=" << fmt(r.mu_a)
                      << " muB=" << fmt(r.mu_b) << " muC=" << fmt(r.mu_c)
                      << (r.physical ? "" : " (unphysical)") << "\n";
        }
    }
    return kExitOk;
}

int cmd_figs2(const CliOptions& opts) {
    const ExperimentConfig cfg = effective_config(opts);
    const fs::path out = ensure_out_dir(opts, cfg);
    if (!opts.gamma_path) throw ConfigError("figs2 needs --gamma <matrix file>");

    const CovarianceMatrix gamma = load_three_mode(*opts.gamma_path);
    std::vector<double> sigma_rad;
    sigma_rad.reserve(cfg.sigma_grid_deg.size());
    for (double d : cfg.sigma_grid_deg) sigma_rad.push_back(d / kDegPerRad);

    const FigS2Report rep = run_figs2(gamma, LossVector(cfg.detection_efficiency), sigma_rad,
                                      cfg.gaussian_fraction);
    write_file(out / "figS2.csv", figs2_csv(rep));

    std::cout << "sigma_th_deg = " << fmt(rep.sweep.sigma_threshold * kDegPerRad) << "\n"
              << "sigma_th_deg_degauss = " << fmt(rep.sigma_threshold_degauss * kDegPerRad)
              << " (gaussian_fraction " << csv_number(rep.gaussian_fraction) << ")\n";
    return kExitOk;
}

int cmd_montecarlo(const CliOptions& opts) {
    const ExperimentConfig cfg = effective_config(opts);
    const fs::path out = ensure_out_dir(opts, cfg);
    if (!opts.gamma_path) throw ConfigError("montecarlo needs --gamma <matrix file>");

    const CovarianceMatrix gamma = load_three_mode(*opts.gamma_path);
    if (!is_physical(gamma)) {
        throw NotPositiveDefinite("monte carlo input state is not physical");
    }
    const MonteCarloResult mc = monte_carlo_ppt(gamma, cfg.monte_carlo.n_samples,
                                                cfg.monte_carlo.n_runs, cfg.monte_carlo.seed);
    write_file(out / "montecarlo.json", montecarlo_to_json(mc).dump(2) + "\n");
    std::cout << "muA = " << fmt(mc.mu_a.mean) << " +- " << csv_number(mc.mu_a.stddev) << "\n"
              << "muB = " << fmt(mc.mu_b.mean) << " +- " << csv_number(mc.mu_b.stddev) << "\n"
              << "muC = " << fmt(mc.mu_c.mean) << " +- " << csv_number(mc.mu_c.stddev) << "\n";
    return kExitOk;
}

int cmd_tomo_sim(const CliOptions& opts) {
    const ExperimentConfig cfg = effective_config(opts);
    const fs::path out = ensure_out_dir(opts, cfg);
    if (!opts.gamma_path) throw ConfigError("tomo-sim needs --gamma <matrix file>");

    const CovarianceMatrix gamma = load_three_mode(*opts.gamma_path);
    if (!is_physical(gamma)) {
        throw NotPositiveDefinite("tomography input state is not physical");
    }
    const auto n = static_cast<Eigen::Index>(cfg.monte_carlo.n_samples);
    const std::uint64_t seed = cfg.monte_carlo.seed;

    std::vector<QuadratureSampleBlock> blocks;
    blocks.reserve(6);
    for (int s = 0; s < 6; ++s) {
        blocks.push_back(sample_block(gamma, canonical_settings()[s], n, mix_seed(seed, 0, s)));
        const std::string stem = "samples_setting" + std::to_string(s + 1);
        write_file(out / (stem + ".csv"), samples_csv(blocks.back()));
        const auto& angles = blocks.back().setting.angles;
        write_file(out / (stem + ".json"),
                   json{{"setting", s + 1},
                        {"angles_rad", {angles[0], angles[1], angles[2]}},
                        {"n_samples", static_cast<std::size_t>(n)},
                        {"seed", blocks.back().seed}}
                           .dump(2) +
                       "\n");
    }
    const ReconstructionResult rec = reconstruct(blocks);
    json errors = json::array();
    for (Eigen::Index i = 0; i < 6; ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < 6; ++j) row.push_back(rec.std_errors(i, j));
        errors.push_back(std::move(row));
    }
    const bool physical = is_physical(rec.gamma_hat);
    write_file(out / "reconstruction.json",
               json{{"gamma_hat", matrix_to_json(rec.gamma_hat)},
                    {"std_errors", std::move(errors)},
                    {"ppt",
                     {{"A", ppt_value(rec.gamma_hat, 0)},
                      {"B", ppt_value(rec.gamma_hat, 1)},
                      {"C", ppt_value(rec.gamma_hat, 2)}}},
                    {"physical", physical}}
                       .dump(2) +
                   "\n");
    std::cout << "reconstructed 6x6 covariance from " << n << " samples x 6 settings"
              << (physical ? "" : " (estimate is unphysical)") << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian three-mode entanglement distribution by separable carriers"};
    app.require_subcommand(1);

    CliOptions opts;
    std::string config_path, gamma_path;
    std::uint64_t seed = 0;
    std::size_t samples = 0, runs = 0;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config JSON");
        sub->add_option("--gamma", gamma_path, "covariance matrix file (JSON or text)");
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--samples", samples, "samples per setting");
        sub->add_option("--runs", runs, "monte carlo runs");
        return sub;
    };

    auto* protocol = add_common(app.add_subcommand(
        "protocol", "three-mode separability check plus distribution step"));
    auto* fig3 = add_common(app.add_subcommand(
        "fig3", "PPT_C vs thermal noise per preparation loss"));
    auto* fig4 = add_common(app.add_subcommand(
        "fig4", "PPT values vs subtracted detection loss"));
    auto* figs2 = add_common(app.add_subcommand(
        "figs2", "phase-noise compensation sweep with de-Gaussification"));
    auto* montecarlo = add_common(app.add_subcommand(
        "montecarlo", "statistical errors of the PPT values"));
    auto* tomo = add_common(app.add_subcommand(
        "tomo-sim", "simulate the six-setting homodyne acquisition and reconstruct"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--config")) opts.config_path = config_path;
    if (sub->count("--gamma")) opts.gamma_path = gamma_path;
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--samples")) opts.samples = samples;
    if (sub->count("--runs")) opts.runs = runs;

    try {
        if (protocol->parsed()) return cmd_protocol(opts);
        if (fig3->parsed()) return cmd_fig3(opts);
        if (fig4->parsed()) return cmd_fig4(opts);
        if (figs2->parsed()) return cmd_figs2(opts);
        if (montecarlo->parsed()) return cmd_montecarlo(opts);
        if (tomo->parsed()) return cmd_tomo_sim(opts);
    } catch (const NotPositiveDefinite& e) {
        std::cerr << "unphysical matrix: " << e.what() << "\n";
        return kExitUnphysical;
    } catch (const UnphysicalSpec& e) {
        std::cerr << "unphysical state: " << e.what() << "\n";
        return kExitUnphysical;
    } catch (const NoCrossing& e) {
        std::cerr << "sweep assertion failed: " << e.what() << "\n";
        return kExitAssertion;
    } catch (const DegenerateSpectrum& e) {
        std::cerr << "analysis failed: " << e.what() << "\n";
        return kExitAssertion;
    } catch (const PairingFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        // remaining library errors indicate bad configuration or input files
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
