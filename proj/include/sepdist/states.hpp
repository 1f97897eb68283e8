#pragma once

#include <cmath>
#include <string>

#include "sepdist/covariance.hpp"
#include "sepdist/errors.hpp"

namespace sepdist {

/// Noise power in dB relative to shot noise -> quadrature variance.
/// 0 dB is the vacuum, negative values are squeezed below shot noise.
inline double db_to_variance(double db) { return std::pow(10.0, db / 10.0); }

inline double variance_to_db(double variance) { return 10.0 * std::log10(variance); }

enum class StateKind { vacuum, squeezed, thermal, hot_squeezed };

inline const char* to_string(StateKind kind) {
    switch (kind) {
        case StateKind::vacuum: return "vacuum";
        case StateKind::squeezed: return "squeezed";
        case StateKind::thermal: return "thermal";
        case StateKind::hot_squeezed: return "hot_squeezed";
    }
    return "?";
}

/// Declarative description of a single-mode input state via its quadrature
/// variances in shot-noise units.
struct SingleModeSpec {
    StateKind kind = StateKind::vacuum;
    double var_x = 1.0;
    double var_p = 1.0;

    static SingleModeSpec vacuum() { return {StateKind::vacuum, 1.0, 1.0}; }

    static SingleModeSpec squeezed_db(double x_db, double p_db) {
        return {StateKind::squeezed, db_to_variance(x_db), db_to_variance(p_db)};
    }

    static SingleModeSpec thermal_db(double noise_db) {
        const double v = db_to_variance(noise_db);
        return {StateKind::thermal, v, v};
    }

    static SingleModeSpec hot_squeezed_db(double x_db, double p_db) {
        return {StateKind::hot_squeezed, db_to_variance(x_db), db_to_variance(p_db)};
    }

    void validate() const {
        if (!(var_x > 0.0) || !(var_p > 0.0)) {
            throw UnphysicalSpec("quadrature variances must be positive");
        }
        if (var_x * var_p < 1.0 - 1e-9) {
            throw UnphysicalSpec("var_x * var_p = " + std::to_string(var_x * var_p) +
                                 " violates the uncertainty bound");
        }
        switch (kind) {
            case StateKind::vacuum:
                if (std::abs(var_x - 1.0) > 1e-12 || std::abs(var_p - 1.0) > 1e-12) {
                    throw UnphysicalSpec("vacuum requires unit variances");
                }
                break;
            case StateKind::thermal:
                if (std::abs(var_x - var_p) > 1e-12) {
                    throw UnphysicalSpec("thermal state requires var_x == var_p");
                }
                if (var_x < 1.0 - 1e-12) {
                    throw UnphysicalSpec("thermal state requires variance >= 1");
                }
                break;
            case StateKind::hot_squeezed:
                if (var_x < 1.0 - 1e-12 || var_p < 1.0 - 1e-12) {
                    throw UnphysicalSpec("hot squeezed state requires noise above shot "
                                         "noise in all quadratures");
                }
                break;
            case StateKind::squeezed:
                break;
        }
    }
};

/// Squeezed state plus random displacement noise on its squeezed quadrature.
/// Only the Gaussian fraction p_G of the added noise is, conservatively,
/// treated as part of the Gaussian state; p_G = 1 reproduces a Gaussian
/// state exactly. Displacement statistics do not enter the covariance, so
/// the effective covariance-level description is a hot squeezed spec.
struct HotSqueezingSpec {
    SingleModeSpec base;           // underlying squeezed state
    double sigma_noise_sq = 0.0;   // variance of the added displacement noise
    double gaussian_fraction = 1.0;

    void validate() const {
        base.validate();
        if (sigma_noise_sq < 0.0) {
            throw UnphysicalSpec("displacement noise variance must be nonnegative");
        }
        if (gaussian_fraction < 0.0 || gaussian_fraction > 1.0) {
            throw UnphysicalSpec("gaussian fraction must lie in [0, 1]");
        }
    }

    /// Covariance-level description: displaced quadrature variance grows by
    /// the full noise variance (the displaced quadrature is X).
    SingleModeSpec effective() const {
        validate();
        return {StateKind::hot_squeezed, base.var_x + sigma_noise_sq, base.var_p};
    }
};

/// Build the 1-mode covariance diag(var_x, var_p) for a validated spec.
inline CovarianceMatrix make_state(const SingleModeSpec& spec) {
    spec.validate();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
    g(0, 0) = spec.var_x;
    g(1, 1) = spec.var_p;
    return CovarianceMatrix(g);
}

inline CovarianceMatrix make_state(const HotSqueezingSpec& spec) {
    return make_state(spec.effective());
}

/// Optical loss on a state before the circuit: gamma -> (1-loss)*gamma + loss*I.
inline CovarianceMatrix apply_preparation_loss(const CovarianceMatrix& gamma, double loss) {
    if (!(loss >= 0.0 && loss <= 1.0)) {
        throw LossOutOfRange("preparation loss " + std::to_string(loss) + " not in [0, 1]");
    }
    Eigen::MatrixXd g = (1.0 - loss) * gamma.matrix() +
                        loss * Eigen::MatrixXd::Identity(gamma.dim(), gamma.dim());
    return CovarianceMatrix(std::move(g));
}

} // namespace sepdist
