#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "sepdist/covariance.hpp"
#include "sepdist/errors.hpp"
#include "sepdist/states.hpp"

namespace sepdist {

/// Linear-optics transformation S acting on covariance matrices as
/// gamma -> S gamma S^T. Construction verifies S J S^T = J to 1e-9.
class SymplecticMap {
public:
    explicit SymplecticMap(Eigen::MatrixXd m) : data_(std::move(m)) {
        if (data_.rows() != data_.cols() || data_.rows() < 2 || data_.rows() % 2 != 0) {
            throw DimensionMismatch("symplectic map must be 2N x 2N");
        }
        const Eigen::MatrixXd j = symplectic_form(n_modes());
        const double err = (data_ * j * data_.transpose() - j).cwiseAbs().maxCoeff();
        if (err > 1e-9) {
            throw NotSymplectic("S J S^T - J deviates by " + std::to_string(err));
        }
    }

    static SymplecticMap identity(int n_modes) {
        return SymplecticMap(Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
    }

    int n_modes() const { return static_cast<int>(data_.rows()) / 2; }
    const Eigen::MatrixXd& matrix() const { return data_; }

    CovarianceMatrix apply(const CovarianceMatrix& gamma) const {
        if (gamma.dim() != data_.rows()) {
            throw DimensionMismatch("map acts on " + std::to_string(data_.rows() / 2) +
                                    " modes, state has " + std::to_string(gamma.n_modes()));
        }
        return CovarianceMatrix(data_ * gamma.matrix() * data_.transpose());
    }

    friend SymplecticMap operator*(const SymplecticMap& a, const SymplecticMap& b) {
        if (a.data_.rows() != b.data_.rows()) {
            throw DimensionMismatch("composing maps of different mode counts");
        }
        return SymplecticMap(a.data_ * b.data_);
    }

private:
    Eigen::MatrixXd data_;
};

/// Phase shift by phi on one mode: (X, P) -> (X cos phi + P sin phi,
/// P cos phi - X sin phi), identity elsewhere.
inline SymplecticMap phase_shift(double phi, int mode, int n_modes) {
    if (mode < 0 || mode >= n_modes) {
        throw IndexOutOfRange("phase_shift: mode " + std::to_string(mode) + " out of range");
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
    const double c = std::cos(phi), s = std::sin(phi);
    m(2 * mode, 2 * mode) = c;
    m(2 * mode, 2 * mode + 1) = s;
    m(2 * mode + 1, 2 * mode) = -s;
    m(2 * mode + 1, 2 * mode + 1) = c;
    return SymplecticMap(std::move(m));
}

/// Beam splitter of transmittance t on mode pair (i, j):
///   out_i = sqrt(t) in_i + sqrt(1-t) in_j
///   out_j = sqrt(1-t) in_i - sqrt(t) in_j
/// with the same scalar mixing on the X and P blocks. t = 1 is the identity
/// on mode i and a sign flip on mode j.
inline SymplecticMap beamsplitter(double t, int i, int j, int n_modes) {
    if (i == j) {
        throw IndexOutOfRange("beamsplitter: modes must differ");
    }
    if (i < 0 || i >= n_modes || j < 0 || j >= n_modes) {
        throw IndexOutOfRange("beamsplitter: mode index out of range");
    }
    if (!(t >= 0.0 && t <= 1.0)) {
        throw TransmittanceOutOfRange("transmittance " + std::to_string(t) + " not in [0, 1]");
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
    const double a = std::sqrt(t), b = std::sqrt(1.0 - t);
    for (int q = 0; q < 2; ++q) {
        m(2 * i + q, 2 * i + q) = a;
        m(2 * i + q, 2 * j + q) = b;
        m(2 * j + q, 2 * i + q) = b;
        m(2 * j + q, 2 * j + q) = -a;
    }
    return SymplecticMap(std::move(m));
}

/// Block-diagonal composition of two states; mode counts add.
inline CovarianceMatrix tensor(const CovarianceMatrix& g1, const CovarianceMatrix& g2) {
    const Eigen::Index d1 = g1.dim(), d2 = g2.dim();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d1 + d2, d1 + d2);
    m.topLeftCorner(d1, d1) = g1.matrix();
    m.bottomRightCorner(d2, d2) = g2.matrix();
    return CovarianceMatrix(std::move(m));
}

/// Discard one mode; for Gaussian states deleting its rows and columns is
/// exact marginalization.
inline CovarianceMatrix trace_out(const CovarianceMatrix& gamma, int mode) {
    detail::require_mode_index(gamma, mode, "trace_out");
    if (gamma.n_modes() < 2) {
        throw DimensionMismatch("trace_out: cannot discard the only mode");
    }
    const Eigen::Index d = gamma.dim();
    Eigen::MatrixXd m(d - 2, d - 2);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        if (i == 2 * mode || i == 2 * mode + 1) continue;
        Eigen::Index c = 0;
        for (Eigen::Index j = 0; j < d; ++j) {
            if (j == 2 * mode || j == 2 * mode + 1) continue;
            m(r, c++) = gamma(i, j);
        }
        ++r;
    }
    return CovarianceMatrix(std::move(m));
}

/// Three-mode preparation: the squeezed input interferes with vacuum at a
/// balanced beam splitter, one output (A) goes out directly and the other
/// is superimposed with the thermal input at a second balanced beam
/// splitter, whose outputs are B and C. Returned mode order is (A, B, C).
///
/// Wiring convention: BS1 mixes (vacuum, squeezed) and A is taken from the
/// subtracting port, so that X correlations between A and B/C come out
/// positive and P correlations negative for an X-squeezed input. This is
/// the sign structure of the measured state; the Duan combinations of
/// distribute() require it, and PPT values do not depend on it.
inline CovarianceMatrix prepare_three_mode(const SingleModeSpec& squeezed,
                                           const SingleModeSpec& vacuum,
                                           const SingleModeSpec& thermal) {
    CovarianceMatrix g = tensor(tensor(make_state(squeezed), make_state(vacuum)),
                                make_state(thermal));
    const SymplecticMap bs1 = beamsplitter(0.5, 1, 0, 3);
    const SymplecticMap bs2 = beamsplitter(0.5, 1, 2, 3);
    return bs2.apply(bs1.apply(g));
}

/// Sum of the Duan witness variances Var(X_A - X_B) + Var(P_A + P_B) for a
/// two-mode state; a value below 4 (in shot-noise units with vacuum
/// variance 1) certifies entanglement. Sufficient only: separable states
/// may also exceed 4.
inline double duan_value(const CovarianceMatrix& gamma_ab) {
    if (gamma_ab.n_modes() != 2) {
        throw DimensionMismatch("duan_value expects a two-mode state");
    }
    const auto& g = gamma_ab.matrix();
    return g(0, 0) + g(2, 2) - 2.0 * g(0, 2) + g(1, 1) + g(3, 3) + 2.0 * g(1, 3);
}

/// Distribution step: phase shift phi on mode C, balanced beam splitter on
/// (B, C), keep the first output port and discard the second. Returns the
/// two-mode state (A, B').
inline CovarianceMatrix distribute(const CovarianceMatrix& gamma_abc, double phi) {
    if (gamma_abc.n_modes() != 3) {
        throw DimensionMismatch("distribute expects a three-mode state");
    }
    CovarianceMatrix g = phase_shift(phi, 2, 3).apply(gamma_abc);
    g = beamsplitter(0.5, 1, 2, 3).apply(g);
    return trace_out(g, 2);
}

struct PhaseOptimum {
    double phi = 0.0;
    double duan = 0.0;
};

/// Minimize duan_value(distribute(gamma, phi)) over phi in [0, 2pi):
/// 360-point coarse scan, then golden-section refinement of the best
/// bracket down to 1e-6 rad. Ties resolve to the smaller angle, so a flat
/// objective returns phi = 0. Deterministic.
inline PhaseOptimum optimize_distribution_phase(const CovarianceMatrix& gamma_abc) {
    const auto objective = [&gamma_abc](double phi) {
        return duan_value(distribute(gamma_abc, phi));
    };

    constexpr int kCoarse = 360;
    const double step = 2.0 * std::numbers::pi / kCoarse;
    double best_phi = 0.0;
    double best_val = objective(0.0);
    for (int k = 1; k < kCoarse; ++k) {
        const double v = objective(k * step);
        if (v < best_val) {
            best_val = v;
            best_phi = k * step;
        }
    }

    double a = best_phi - step, b = best_phi + step;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    while (b - a > 1e-6) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2);
        }
    }
    double phi_ref = 0.5 * (a + b);
    double val_ref = objective(phi_ref);

    if (val_ref < best_val) {
        const double two_pi = 2.0 * std::numbers::pi;
        phi_ref = std::fmod(phi_ref + two_pi, two_pi);
        return {phi_ref, val_ref};
    }
    return {best_phi, best_val};
}

} // namespace sepdist
