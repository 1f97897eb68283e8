#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sepdist/covariance.hpp"
#include "sepdist/errors.hpp"
#include "sepdist/noise.hpp"
#include "sepdist/states.hpp"
#include "sepdist/tomography.hpp"

namespace sepdist {

using nlohmann::json;

inline json matrix_to_json(const CovarianceMatrix& gamma) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < gamma.dim(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < gamma.dim(); ++j) {
            row.push_back(gamma(i, j));
        }
        rows.push_back(std::move(row));
    }
    return json{{"n_modes", gamma.n_modes()}, {"ordering", "xpxp"}, {"data", std::move(rows)}};
}

inline CovarianceMatrix matrix_from_json(const json& j) {
    if (!j.is_object() || !j.contains("n_modes") || !j.contains("data")) {
        throw ConfigError("matrix JSON needs \"n_modes\" and \"data\"");
    }
    if (j.value("ordering", "xpxp") != std::string("xpxp")) {
        throw ConfigError("unsupported quadrature ordering \"" +
                          j["ordering"].get<std::string>() + "\" (expected \"xpxp\")");
    }
    const int n = j["n_modes"].get<int>();
    const auto& rows = j["data"];
    if (!rows.is_array() || static_cast<int>(rows.size()) != 2 * n) {
        throw ConfigError("matrix JSON data must have 2*n_modes rows");
    }
    Eigen::MatrixXd m(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i) {
        if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != 2 * n) {
            throw ConfigError("matrix JSON row " + std::to_string(i) + " has wrong length");
        }
        for (int k = 0; k < 2 * n; ++k) {
            m(i, k) = rows[i][k].get<double>();
        }
    }
    return CovarianceMatrix(std::move(m));
}

/// Plain whitespace-delimited matrix (one row per line), for CLI piping.
inline std::string matrix_to_text(const CovarianceMatrix& gamma) {
    std::ostringstream out;
    out.precision(17);
    for (Eigen::Index i = 0; i < gamma.dim(); ++i) {
        for (Eigen::Index j = 0; j < gamma.dim(); ++j) {
            out << gamma(i, j) << (j + 1 < gamma.dim() ? " " : "\n");
        }
    }
    return out.str();
}

inline CovarianceMatrix matrix_from_text(const std::string& text) {
    std::istringstream in(text);
    std::vector<double> values;
    double v;
    while (in >> v) values.push_back(v);
    const auto dim = static_cast<Eigen::Index>(std::llround(std::sqrt(double(values.size()))));
    if (values.empty() || dim * dim != static_cast<Eigen::Index>(values.size())) {
        throw ConfigError("text matrix must contain a square number of values");
    }
    Eigen::MatrixXd m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            m(i, j) = values[static_cast<std::size_t>(i * dim + j)];
        }
    }
    return CovarianceMatrix(std::move(m));
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    out << content;
}

/// Parse a covariance matrix from either supported format; JSON documents
/// are detected by their leading '{', anything else is treated as the plain
/// text format.
inline CovarianceMatrix matrix_from_string(const std::string& content,
                                           const std::string& origin) {
    for (char c : content) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '{') {
            try {
                return matrix_from_json(json::parse(content));
            } catch (const json::exception& e) {
                throw ConfigError(origin + ": " + e.what());
            }
        }
        break;
    }
    return matrix_from_text(content);
}

inline CovarianceMatrix load_matrix(const std::filesystem::path& path) {
    return matrix_from_string(read_file(path), path.string());
}

inline void save_matrix(const std::filesystem::path& path, const CovarianceMatrix& gamma) {
    if (path.extension() == ".json") {
        write_file(path, matrix_to_json(gamma).dump(2) + "\n");
    } else {
        write_file(path, matrix_to_text(gamma));
    }
}

inline json spec_to_json(const SingleModeSpec& spec) {
    json j{{"kind", to_string(spec.kind)}};
    if (spec.kind != StateKind::vacuum) {
        j["var_x_db"] = variance_to_db(spec.var_x);
        j["var_p_db"] = variance_to_db(spec.var_p);
    }
    return j;
}

inline SingleModeSpec spec_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ConfigError("state spec needs a \"kind\"");
    }
    const std::string kind = j["kind"].get<std::string>();
    SingleModeSpec spec;
    if (kind == "vacuum") {
        spec = SingleModeSpec::vacuum();
        if (j.contains("var_x_db") || j.contains("var_p_db")) {
            throw ConfigError("vacuum spec does not take variances");
        }
        return spec;
    }
    if (!j.contains("var_x_db") || !j.contains("var_p_db")) {
        throw ConfigError("state spec \"" + kind + "\" needs var_x_db and var_p_db");
    }
    const double x_db = j["var_x_db"].get<double>();
    const double p_db = j["var_p_db"].get<double>();
    if (kind == "squeezed") {
        spec = SingleModeSpec::squeezed_db(x_db, p_db);
    } else if (kind == "thermal") {
        if (x_db != p_db) {
            throw ConfigError("thermal spec needs var_x_db == var_p_db");
        }
        spec = SingleModeSpec::thermal_db(x_db);
    } else if (kind == "hot_squeezed") {
        spec = SingleModeSpec::hot_squeezed_db(x_db, p_db);
    } else {
        throw ConfigError("unknown state kind \"" + kind + "\"");
    }
    spec.validate();
    return spec;
}

/// Fixed-width float formatting shared by all CSV output, so reruns are
/// byte identical.
inline std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline std::string loss_sweep_csv(const std::vector<LossSweepRow>& rows) {
    std::string out = "loss,muA,muB,muC,physical\n";
    for (const auto& r : rows) {
        out += csv_number(r.loss) + "," + csv_number(r.mu_a) + "," + csv_number(r.mu_b) +
               "," + csv_number(r.mu_c) + "," + (r.physical ? "1" : "0") + "\n";
    }
    return out;
}

inline std::string phase_sweep_csv(const PhaseSweepResult& sweep) {
    std::string out = "sigma_deg,mu0,muA,min_muB_muC\n";
    for (const auto& r : sweep.rows) {
        out += csv_number(r.sigma * 180.0 / std::numbers::pi) + "," + csv_number(r.mu_0) +
               "," + csv_number(r.mu_a) + "," + csv_number(r.min_mu_bc) + "\n";
    }
    return out;
}

inline std::string samples_csv(const QuadratureSampleBlock& block) {
    std::string out = "xA,xB,xC\n";
    for (Eigen::Index i = 0; i < block.n(); ++i) {
        out += csv_number(block.samples(i, 0)) + "," + csv_number(block.samples(i, 1)) + "," +
               csv_number(block.samples(i, 2)) + "\n";
    }
    return out;
}

} // namespace sepdist
