#pragma once

// Measured reference matrices and detector characterization used across the
// test suites (shot-noise units, xpxp ordering).

#include <Eigen/Dense>

#include "sepdist/covariance.hpp"
#include "sepdist/noise.hpp"
#include "sepdist/states.hpp"

namespace fixtures {

/// Reconstructed three-mode covariance matrix as measured (detection losses
/// included).
inline sepdist::CovarianceMatrix gamma_measured() {
    Eigen::MatrixXd m(6, 6);
    m << 0.76, 0.04, 0.12, -0.03, 0.19, -0.07,
         0.04, 2.20, 0.05, -0.78, -0.10, -0.74,
         0.12, 0.05, 5.70, -0.29, -3.92, 1.14,
        -0.03, -0.78, -0.29, 6.84, -0.96, -3.94,
         0.19, -0.10, -3.92, -0.96, 4.73, 0.09,
        -0.07, -0.74, 1.14, -3.94, 0.09, 5.92;
    return sepdist::CovarianceMatrix(m);
}

/// The same state with the conservative detection-loss bounds subtracted.
inline sepdist::CovarianceMatrix gamma_loss_compensated() {
    Eigen::MatrixXd m(6, 6);
    m << 0.71, 0.05, 0.15, -0.04, 0.23, -0.09,
         0.05, 2.43, 0.06, -0.96, -0.12, -0.91,
         0.15, 0.06, 7.03, -0.37, -5.01, 1.46,
        -0.04, -0.96, -0.37, 8.49, -1.23, -5.04,
         0.23, -0.12, -5.01, -1.23, 5.76, 0.11,
        -0.09, -0.91, 1.46, -5.04, 0.11, 7.28;
    return sepdist::CovarianceMatrix(m);
}

/// Conservative lower bounds on the homodyne detection efficiencies.
inline sepdist::LossVector detection_efficiencies() {
    return sepdist::LossVector({0.839, 0.780, 0.784});
}

/// Input states of the distribution experiment.
inline sepdist::SingleModeSpec squeezed_input() {
    return sepdist::SingleModeSpec::squeezed_db(-1.8, 5.1);
}
inline sepdist::SingleModeSpec hot_squeezed_input() {
    return sepdist::SingleModeSpec::hot_squeezed_db(9.6, 10.2);
}

} // namespace fixtures
