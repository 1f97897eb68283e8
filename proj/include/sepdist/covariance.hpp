#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sepdist/errors.hpp"

namespace sepdist {

/// Covariance matrix of an N-mode Gaussian state.
///
/// Quadratures are ordered (X1, P1, X2, P2, ..., XN, PN) and normalized so
/// that the vacuum state has unit variance in every quadrature ([X,P] = 2i).
/// The matrix is symmetrized as (M + M^T)/2 on construction; asymmetry
/// beyond 1e-6 is rejected.
class CovarianceMatrix {
public:
    explicit CovarianceMatrix(Eigen::MatrixXd m) {
        if (m.rows() != m.cols() || m.rows() < 2 || m.rows() % 2 != 0) {
            throw DimensionMismatch("covariance matrix must be 2N x 2N, got " +
                                    std::to_string(m.rows()) + " x " + std::to_string(m.cols()));
        }
        const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-6) {
            throw NotSymmetric("covariance matrix asymmetry " + std::to_string(asym) +
                               " exceeds 1e-6");
        }
        data_ = 0.5 * (m + m.transpose());
    }

    static CovarianceMatrix vacuum(int n_modes) {
        return CovarianceMatrix(Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
    }

    int n_modes() const { return static_cast<int>(data_.rows()) / 2; }
    Eigen::Index dim() const { return data_.rows(); }
    const Eigen::MatrixXd& matrix() const { return data_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }

    /// Index of the amplitude quadrature of `mode` in the matrix.
    static Eigen::Index x_index(int mode) { return 2 * mode; }
    /// Index of the phase quadrature of `mode` in the matrix.
    static Eigen::Index p_index(int mode) { return 2 * mode + 1; }

private:
    Eigen::MatrixXd data_;
};

/// N-mode symplectic form, block diagonal with 2x2 blocks (0 1; -1 0).
/// (The opposite sign convention yields the same symplectic spectrum.)
inline Eigen::MatrixXd symplectic_form(int n_modes) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int m = 0; m < n_modes; ++m) {
        j(2 * m, 2 * m + 1) = 1.0;
        j(2 * m + 1, 2 * m) = -1.0;
    }
    return j;
}

namespace detail {

inline void require_mode_index(const CovarianceMatrix& gamma, int mode, const char* what) {
    if (mode < 0 || mode >= gamma.n_modes()) {
        throw IndexOutOfRange(std::string(what) + ": mode " + std::to_string(mode) +
                              " out of range [0, " + std::to_string(gamma.n_modes()) + ")");
    }
}

} // namespace detail

/// Symplectic eigenvalues of a positive definite covariance matrix,
/// ascending. These are the positive roots of det(gamma - i*mu*J) = 0: the
/// ordinary eigenvalues of J*gamma come in pairs +-i*mu and each mu is
/// returned once. A physical state has every mu >= 1.
inline std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& gamma) {
    const Eigen::MatrixXd& g = gamma.matrix();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sa(g, Eigen::EigenvaluesOnly);
    if (sa.eigenvalues().minCoeff() <= 0.0) {
        throw NotPositiveDefinite("covariance matrix has an ordinary eigenvalue <= 0 (min " +
                                  std::to_string(sa.eigenvalues().minCoeff()) + ")");
    }

    Eigen::EigenSolver<Eigen::MatrixXd> es(symplectic_form(gamma.n_modes()) * g, false);
    std::vector<double> moduli(gamma.dim());
    for (Eigen::Index i = 0; i < gamma.dim(); ++i) {
        moduli[static_cast<std::size_t>(i)] = std::abs(es.eigenvalues()(i));
    }
    std::sort(moduli.begin(), moduli.end());

    std::vector<double> mus;
    mus.reserve(gamma.n_modes());
    for (int m = 0; m < gamma.n_modes(); ++m) {
        const double a = moduli[2 * m];
        const double b = moduli[2 * m + 1];
        if (std::abs(a - b) > 1e-7 * std::max({1.0, a, b})) {
            throw PairingFailure("eigenvalues of J*gamma do not pair: |" +
                                 std::to_string(a) + "| vs |" + std::to_string(b) + "|");
        }
        mus.push_back(0.5 * (a + b));
    }
    return mus;
}

/// Partial transposition with respect to `mode`: T_k gamma T_k^T where T_k
/// flips the sign of that mode's phase quadrature. Diagonal is unchanged.
inline CovarianceMatrix partial_transpose(const CovarianceMatrix& gamma, int mode) {
    detail::require_mode_index(gamma, mode, "partial_transpose");
    Eigen::MatrixXd g = gamma.matrix();
    const Eigen::Index p = CovarianceMatrix::p_index(mode);
    g.row(p) *= -1.0;
    g.col(p) *= -1.0;
    return CovarianceMatrix(g);
}

/// Minimum symplectic eigenvalue of the partially transposed matrix.
/// A value below 1 certifies entanglement in the mode|rest splitting; for
/// Gaussian states and 1|(N-1) splittings the criterion is also necessary.
inline double ppt_value(const CovarianceMatrix& gamma, int mode) {
    return symplectic_eigenvalues(partial_transpose(gamma, mode)).front();
}

/// Whether gamma satisfies the uncertainty relation gamma - iJ >= 0,
/// i.e. its minimum symplectic eigenvalue is >= 1 - 1e-9.
/// A symmetric matrix that is not positive definite is not physical.
inline bool is_physical(const CovarianceMatrix& gamma) {
    try {
        return symplectic_eigenvalues(gamma).front() >= 1.0 - 1e-9;
    } catch (const NotPositiveDefinite&) {
        return false;
    }
}

/// Verdict threshold shared by callers that turn PPT values into
/// separable/entangled statements.
inline bool indicates_entanglement(double ppt) { return ppt < 1.0 - 1e-9; }

} // namespace sepdist
