#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sepdist/covariance.hpp"
#include "sepdist/errors.hpp"

namespace sepdist {

/// Per-mode detection efficiencies (quantum efficiency, visibility^2 and
/// path losses folded together), one entry per mode in mode order.
struct LossVector {
    std::vector<double> eta;

    explicit LossVector(std::vector<double> values) : eta(std::move(values)) {
        for (double e : eta) {
            if (!(e > 0.0)) {
                throw ZeroEfficiency("detection efficiency must be > 0, got " +
                                     std::to_string(e));
            }
            if (e > 1.0) {
                throw LossOutOfRange("detection efficiency " + std::to_string(e) +
                                     " exceeds 1");
            }
        }
    }

    static LossVector uniform(double eta_value, int n_modes) {
        return LossVector(std::vector<double>(static_cast<std::size_t>(n_modes), eta_value));
    }

    int n_modes() const { return static_cast<int>(eta.size()); }

    /// diag(sqrt(eta_j)) duplicated per quadrature.
    Eigen::MatrixXd scaling() const {
        Eigen::VectorXd d(2 * eta.size());
        for (std::size_t m = 0; m < eta.size(); ++m) {
            d(2 * m) = d(2 * m + 1) = std::sqrt(eta[m]);
        }
        return d.asDiagonal();
    }
};

/// Standard deviation (radians) of the independent zero-mean Gaussian phase
/// jitter applied per mode.
struct PhaseNoiseStrength {
    double sigma = 0.0;

    explicit PhaseNoiseStrength(double s) : sigma(s) {
        if (!(sigma >= 0.0)) {
            throw LossOutOfRange("phase noise sigma must be >= 0");
        }
    }
};

/// Fraction of the hot-squeezing displacement noise that is Gaussian.
struct GaussianFraction {
    double value = 1.0;

    explicit GaussianFraction(double p) : value(p) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw LossOutOfRange("gaussian fraction must lie in [0, 1]");
        }
    }
};

/// Lossy detection channel: gamma -> S gamma S^T + (I - S S^T) with
/// S = diag(sqrt(eta_j)) per quadrature.
inline CovarianceMatrix apply_loss(const CovarianceMatrix& gamma, const LossVector& eta) {
    if (eta.n_modes() != gamma.n_modes()) {
        throw DimensionMismatch("loss vector has " + std::to_string(eta.n_modes()) +
                                " modes, state has " + std::to_string(gamma.n_modes()));
    }
    const Eigen::MatrixXd s = eta.scaling();
    const Eigen::MatrixXd g_noise =
        Eigen::MatrixXd::Identity(gamma.dim(), gamma.dim()) - s * s.transpose();
    return CovarianceMatrix(s * gamma.matrix() * s.transpose() + g_noise);
}

/// Exact algebraic inverse of apply_loss. The result can be unphysical;
/// callers decide with is_physical.
inline CovarianceMatrix invert_loss(const CovarianceMatrix& gamma, const LossVector& eta) {
    if (eta.n_modes() != gamma.n_modes()) {
        throw DimensionMismatch("loss vector has " + std::to_string(eta.n_modes()) +
                                " modes, state has " + std::to_string(gamma.n_modes()));
    }
    const Eigen::MatrixXd s = eta.scaling();
    const Eigen::MatrixXd g_noise =
        Eigen::MatrixXd::Identity(gamma.dim(), gamma.dim()) - s * s.transpose();
    const Eigen::MatrixXd s_inv = s.diagonal().cwiseInverse().asDiagonal();
    return CovarianceMatrix(s_inv * (gamma.matrix() - g_noise) * s_inv.transpose());
}

struct LossSweepRow {
    double loss = 0.0;
    double mu_a = std::numeric_limits<double>::quiet_NaN();
    double mu_b = std::numeric_limits<double>::quiet_NaN();
    double mu_c = std::numeric_limits<double>::quiet_NaN();
    bool physical = false;
};

/// Subtract a uniform detection loss (eta = 1 - loss on every mode) from a
/// measured three-mode matrix for each grid value and report the three PPT
/// values. Rows where the compensated matrix stops being a valid Gaussian
/// covariance keep NaN eigenvalues and physical = false.
inline std::vector<LossSweepRow> loss_sweep(const CovarianceMatrix& gamma_measured,
                                            const std::vector<double>& loss_grid) {
    if (gamma_measured.n_modes() != 3) {
        throw DimensionMismatch("loss_sweep expects a three-mode state");
    }
    std::vector<LossSweepRow> rows;
    rows.reserve(loss_grid.size());
    for (double loss : loss_grid) {
        if (!(loss >= 0.0 && loss < 1.0)) {
            throw LossOutOfRange("subtracted loss " + std::to_string(loss) +
                                 " not in [0, 1)");
        }
        LossSweepRow row;
        row.loss = loss;
        const CovarianceMatrix g = invert_loss(gamma_measured, LossVector::uniform(1.0 - loss, 3));
        try {
            row.mu_a = ppt_value(g, 0);
            row.mu_b = ppt_value(g, 1);
            row.mu_c = ppt_value(g, 2);
            row.physical = is_physical(g);
        } catch (const NotPositiveDefinite&) {
            row.physical = false;
        }
        rows.push_back(row);
    }
    return rows;
}

namespace detail {

/// Zero all covariances between quadratures of different modes, keeping the
/// three 2x2 single-mode blocks (including intramodal X-P covariances).
inline Eigen::MatrixXd mode_diagonal_blocks(const Eigen::MatrixXd& g) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(g.rows(), g.cols());
    for (Eigen::Index m = 0; m < g.rows() / 2; ++m) {
        d.block<2, 2>(2 * m, 2 * m) = g.block<2, 2>(2 * m, 2 * m);
    }
    return d;
}

} // namespace detail

/// Average of S(phi) gamma S(phi)^T over independent zero-mean Gaussian
/// phase jitter of standard deviation sigma per mode, in closed form:
///   e^{-s^2} gamma + (1-e^{-s^2})^2/2 D(gamma) + (1-e^{-2s^2})/2 J D(gamma) J^T
/// where D keeps only the single-mode 2x2 blocks.
inline CovarianceMatrix apply_phase_noise(const CovarianceMatrix& gamma,
                                          const PhaseNoiseStrength& strength) {
    const double s2 = strength.sigma * strength.sigma;
    const double u = std::exp(-s2);
    const Eigen::MatrixXd d = detail::mode_diagonal_blocks(gamma.matrix());
    const Eigen::MatrixXd j = symplectic_form(gamma.n_modes());
    return CovarianceMatrix(u * gamma.matrix() + 0.5 * (1.0 - u) * (1.0 - u) * d +
                            0.5 * (1.0 - u * u) * j * d * j.transpose());
}

/// Exact algebraic inverse of apply_phase_noise:
///   e^{s^2} gamma + (e^{s^2}-1)^2/2 D(gamma) + (1-e^{2s^2})/2 J D(gamma) J^T.
/// The result can be unphysical for large sigma; callers check.
inline CovarianceMatrix invert_phase_noise(const CovarianceMatrix& gamma,
                                           const PhaseNoiseStrength& strength) {
    const double s2 = strength.sigma * strength.sigma;
    const double v = std::exp(s2);
    const Eigen::MatrixXd d = detail::mode_diagonal_blocks(gamma.matrix());
    const Eigen::MatrixXd j = symplectic_form(gamma.n_modes());
    return CovarianceMatrix(v * gamma.matrix() + 0.5 * (v - 1.0) * (v - 1.0) * d +
                            0.5 * (1.0 - v * v) * j * d * j.transpose());
}

struct PhaseSweepRow {
    double sigma = 0.0;  // radians
    double mu_0 = std::numeric_limits<double>::quiet_NaN();
    double mu_a = std::numeric_limits<double>::quiet_NaN();
    double min_mu_bc = std::numeric_limits<double>::quiet_NaN();
};

struct PhaseSweepResult {
    std::vector<PhaseSweepRow> rows;
    double sigma_threshold = 0.0;  // radians, where min(mu_B, mu_C) crosses 1
};

namespace detail {

inline PhaseSweepRow phase_sweep_row(const CovarianceMatrix& gamma_l, double sigma) {
    PhaseSweepRow row;
    row.sigma = sigma;
    const CovarianceMatrix gk = invert_phase_noise(gamma_l, PhaseNoiseStrength(sigma));
    try {
        row.mu_0 = symplectic_eigenvalues(gk).front();
        row.mu_a = ppt_value(gk, 0);
        row.min_mu_bc = std::min(ppt_value(gk, 1), ppt_value(gk, 2));
    } catch (const NotPositiveDefinite&) {
        // leave NaNs: compensation went past a valid covariance matrix
    }
    return row;
}

} // namespace detail

/// For each sigma in the grid (radians), undo phase noise of that strength
/// and report mu_0 (physicality), mu_A and min(mu_B, mu_C). The threshold
/// where min(mu_B, mu_C) crosses 1 is located by bisection to 1e-4 rad
/// between the bracketing grid points; NoCrossing if it stays above 1.
inline PhaseSweepResult phase_noise_sweep(const CovarianceMatrix& gamma_l,
                                          const std::vector<double>& sigma_grid) {
    if (gamma_l.n_modes() != 3) {
        throw DimensionMismatch("phase_noise_sweep expects a three-mode state");
    }
    if (sigma_grid.empty()) {
        throw NoCrossing("empty sigma grid");
    }
    PhaseSweepResult result;
    result.rows.reserve(sigma_grid.size());
    for (double s : sigma_grid) {
        result.rows.push_back(detail::phase_sweep_row(gamma_l, s));
    }

    std::size_t cross = result.rows.size();
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        if (result.rows[i].min_mu_bc <= 1.0) {  // NaN compares false
            cross = i;
            break;
        }
    }
    if (cross == result.rows.size()) {
        throw NoCrossing("min(mu_B, mu_C) stays above 1 over the sigma grid");
    }
    if (cross == 0) {
        result.sigma_threshold = sigma_grid.front();
        return result;
    }

    double lo = sigma_grid[cross - 1], hi = sigma_grid[cross];
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        if (detail::phase_sweep_row(gamma_l, mid).min_mu_bc > 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    result.sigma_threshold = 0.5 * (lo + hi);
    return result;
}

/// Keep only the Gaussian fraction of the hot-squeezing modulation noise:
/// diagonalize gamma, scale the two largest eigenvalues (the hot-squeezed
/// input variances) by p_G, recompose in the same eigenbasis. Both are
/// rescaled because the modulated quadrature cannot be identified reliably.
inline CovarianceMatrix degauss_hot_squeezing(const CovarianceMatrix& gamma,
                                              const GaussianFraction& fraction) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gamma.matrix());
    Eigen::VectorXd lambda = es.eigenvalues();  // ascending
    const Eigen::Index n = lambda.size();
    if (n < 4) {
        throw DimensionMismatch("degauss_hot_squeezing expects at least two modes");
    }
    if (std::abs(lambda(n - 3) - lambda(n - 2)) < 1e-6) {
        throw DegenerateSpectrum("cannot separate the two largest eigenvalues from the rest");
    }
    lambda(n - 2) *= fraction.value;
    lambda(n - 1) *= fraction.value;
    return CovarianceMatrix(es.eigenvectors() * lambda.asDiagonal() *
                            es.eigenvectors().transpose());
}

} // namespace sepdist
