#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "sepdist/covariance.hpp"
#include "sepdist/errors.hpp"

namespace sepdist {

/// Homodyne angles (theta_A, theta_B, theta_C); each detector measures
/// X cos(theta) + P sin(theta). Angles are restricted to {0, pi/4, pi/2}.
struct MeasurementSetting {
    std::array<double, 3> angles{0.0, 0.0, 0.0};

    explicit MeasurementSetting(double a, double b, double c) : angles{a, b, c} {
        for (double t : angles) {
            const bool ok = std::abs(t) < 1e-12 ||
                            std::abs(t - std::numbers::pi / 4) < 1e-12 ||
                            std::abs(t - std::numbers::pi / 2) < 1e-12;
            if (!ok) {
                throw InvalidSetting("homodyne angle " + std::to_string(t) +
                                     " is not one of {0, pi/4, pi/2}");
            }
        }
    }
};

/// The six detector settings that determine all 21 independent elements of
/// a three-mode covariance matrix:
///   1 X,X,X   2 P,P,P   3 P,X,X   4 X,P,X   5 X,X,P   6 diag (pi/4 each)
inline const std::array<MeasurementSetting, 6>& canonical_settings() {
    constexpr double h = std::numbers::pi / 2;
    constexpr double q = std::numbers::pi / 4;
    static const std::array<MeasurementSetting, 6> table = {
        MeasurementSetting(0, 0, 0), MeasurementSetting(h, h, h),
        MeasurementSetting(h, 0, 0), MeasurementSetting(0, h, 0),
        MeasurementSetting(0, 0, h), MeasurementSetting(q, q, q)};
    return table;
}

inline std::optional<int> canonical_index(const MeasurementSetting& setting) {
    const auto& table = canonical_settings();
    for (int i = 0; i < 6; ++i) {
        bool match = true;
        for (int j = 0; j < 3; ++j) {
            if (std::abs(table[i].angles[j] - setting.angles[j]) > 1e-12) match = false;
        }
        if (match) return i;
    }
    return std::nullopt;
}

/// Project a three-mode covariance onto the measured quadrature directions:
/// the 3x3 covariance of the recorded detector outputs.
inline Eigen::Matrix3d project_setting(const CovarianceMatrix& gamma,
                                       const MeasurementSetting& setting) {
    if (gamma.n_modes() != 3) {
        throw DimensionMismatch("project_setting expects a three-mode state");
    }
    Eigen::Matrix<double, 3, 6> p = Eigen::Matrix<double, 3, 6>::Zero();
    for (int j = 0; j < 3; ++j) {
        p(j, 2 * j) = std::cos(setting.angles[j]);
        p(j, 2 * j + 1) = std::sin(setting.angles[j]);
    }
    return p * gamma.matrix() * p.transpose();
}

/// Deterministic stream derivation: one master seed, decorrelated
/// sub-streams per (run, setting) via splitmix64 steps.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t x = master;
    const auto step = [&x]() {
        x += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    step();
    x ^= (a + 1) * 0xD1B54A32D192ED03ULL;
    step();
    x ^= (b + 1) * 0x8CB92BA72F3D8DD7ULL;
    return step();
}

/// One acquisition: n rows of simultaneous detector outputs (columns A, B, C)
/// under a single setting.
struct QuadratureSampleBlock {
    MeasurementSetting setting;
    Eigen::Matrix<double, Eigen::Dynamic, 3> samples;
    std::uint64_t seed = 0;

    Eigen::Index n() const { return samples.rows(); }
};

/// Draw n i.i.d. samples of the three measured quadratures from the
/// zero-mean Gaussian with covariance project_setting(gamma, setting).
/// Reproducible: a fixed seed gives an identical block.
inline QuadratureSampleBlock sample_block(const CovarianceMatrix& gamma,
                                          const MeasurementSetting& setting,
                                          Eigen::Index n, std::uint64_t seed) {
    if (n < 2) {
        throw InsufficientSamples("sample_block needs n >= 2");
    }
    const Eigen::Matrix3d c = project_setting(gamma, setting);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(c);
    Eigen::Vector3d lambda = es.eigenvalues();
    for (int i = 0; i < 3; ++i) {
        if (lambda(i) < -1e-10) {
            throw NotPositiveDefinite("projected covariance has eigenvalue " +
                                      std::to_string(lambda(i)));
        }
        lambda(i) = std::max(lambda(i), 0.0);
    }
    // symmetric square root of the (clipped) projected covariance
    const Eigen::Matrix3d factor = es.eigenvectors() * lambda.cwiseSqrt().asDiagonal() *
                                   es.eigenvectors().transpose();

    QuadratureSampleBlock block{setting, {}, seed};
    block.samples.resize(n, 3);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Vector3d z(normal(rng), normal(rng), normal(rng));
        block.samples.row(i) = (factor * z).transpose();
    }
    return block;
}

/// Raw second moments (1/n) sum x x^T, accumulated in sample order.
/// Means are known to vanish, so the population-form estimator is used.
inline Eigen::Matrix3d block_moments(const QuadratureSampleBlock& block) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (Eigen::Index i = 0; i < block.samples.rows(); ++i) {
        const Eigen::Vector3d x = block.samples.row(i).transpose();
        m += x * x.transpose();
    }
    return m / static_cast<double>(block.samples.rows());
}

struct ReconstructionResult {
    CovarianceMatrix gamma_hat;
    Eigen::MatrixXd std_errors;  // per-element standard errors
};

namespace detail {

/// Standard error of the sample second moment M[j,k] (zero-mean Gaussian,
/// denominator n): sqrt((M_jj*M_kk + M_jk^2)/n).
inline double moment_se(const Eigen::Matrix3d& m, int j, int k, std::size_t n) {
    if (n == 0) return 0.0;  // population moments: exact
    return std::sqrt((m(j, j) * m(k, k) + m(j, k) * m(j, k)) / static_cast<double>(n));
}

} // namespace detail

/// Unfold the six per-setting 3x3 second-moment matrices (canonical order)
/// into the 6x6 covariance:
///   setting 1 -> X variances and X-X covariances, setting 2 -> same for P,
///   settings 3-5 -> P_j against the other modes' X,
///   setting 6 (measuring (X+P)/sqrt2) -> Cov(X_j,P_j) = Var_meas - (VarX+VarP)/2.
/// counts[i] = 0 marks exact population moments (zero standard error).
inline ReconstructionResult reconstruct_from_moments(
    const std::array<Eigen::Matrix3d, 6>& m, const std::array<std::size_t, 6>& counts) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(6, 6);
    Eigen::MatrixXd se = Eigen::MatrixXd::Zero(6, 6);

    for (int j = 0; j < 3; ++j) {
        g(2 * j, 2 * j) = m[0](j, j);
        se(2 * j, 2 * j) = detail::moment_se(m[0], j, j, counts[0]);
        g(2 * j + 1, 2 * j + 1) = m[1](j, j);
        se(2 * j + 1, 2 * j + 1) = detail::moment_se(m[1], j, j, counts[1]);
        for (int k = j + 1; k < 3; ++k) {
            g(2 * j, 2 * k) = g(2 * k, 2 * j) = m[0](j, k);
            se(2 * j, 2 * k) = se(2 * k, 2 * j) = detail::moment_se(m[0], j, k, counts[0]);
            g(2 * j + 1, 2 * k + 1) = g(2 * k + 1, 2 * j + 1) = m[1](j, k);
            se(2 * j + 1, 2 * k + 1) = se(2 * k + 1, 2 * j + 1) =
                detail::moment_se(m[1], j, k, counts[1]);
        }
    }

    // settings 3..5: detector j measures P_j, the other two measure X
    for (int j = 0; j < 3; ++j) {
        const Eigen::Matrix3d& mj = m[2 + j];
        const std::size_t nj = counts[2 + j];
        for (int k = 0; k < 3; ++k) {
            if (k == j) continue;
            g(2 * j + 1, 2 * k) = g(2 * k, 2 * j + 1) = mj(j, k);
            se(2 * j + 1, 2 * k) = se(2 * k, 2 * j + 1) = detail::moment_se(mj, j, k, nj);
        }
    }

    for (int j = 0; j < 3; ++j) {
        g(2 * j, 2 * j + 1) = g(2 * j + 1, 2 * j) =
            m[5](j, j) - 0.5 * (m[0](j, j) + m[1](j, j));
        const double s6 = detail::moment_se(m[5], j, j, counts[5]);
        const double s1 = detail::moment_se(m[0], j, j, counts[0]);
        const double s2 = detail::moment_se(m[1], j, j, counts[1]);
        se(2 * j, 2 * j + 1) = se(2 * j + 1, 2 * j) =
            std::sqrt(s6 * s6 + 0.25 * (s1 * s1 + s2 * s2));
    }

    return ReconstructionResult{CovarianceMatrix(g), se};
}

/// Empirical covariance reconstruction from six sample blocks, one per
/// canonical setting (any order). Physicality of the estimate is not
/// enforced; callers flag it with is_physical.
inline ReconstructionResult reconstruct(const std::vector<QuadratureSampleBlock>& blocks) {
    std::array<const QuadratureSampleBlock*, 6> by_setting{};
    for (const auto& block : blocks) {
        const auto idx = canonical_index(block.setting);
        if (!idx) {
            throw MissingSetting("block setting is not one of the six canonical settings");
        }
        if (by_setting[static_cast<std::size_t>(*idx)] != nullptr) {
            throw MissingSetting("duplicate block for setting " + std::to_string(*idx + 1));
        }
        by_setting[static_cast<std::size_t>(*idx)] = &block;
    }
    std::array<Eigen::Matrix3d, 6> moments;
    std::array<std::size_t, 6> counts{};
    for (int i = 0; i < 6; ++i) {
        if (by_setting[i] == nullptr) {
            throw MissingSetting("no block for setting " + std::to_string(i + 1));
        }
        if (by_setting[i]->n() < 100) {
            throw InsufficientSamples("setting " + std::to_string(i + 1) + " has " +
                                      std::to_string(by_setting[i]->n()) + " samples (< 100)");
        }
        moments[i] = block_moments(*by_setting[i]);
        counts[i] = static_cast<std::size_t>(by_setting[i]->n());
    }
    return reconstruct_from_moments(moments, counts);
}

struct SummaryStat {
    double mean = 0.0;
    double stddev = 0.0;
};

struct MonteCarloResult {
    SummaryStat mu_a, mu_b, mu_c;
    std::size_t n_samples = 0;
    std::size_t n_runs = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline SummaryStat summarize(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double sum = 0.0, comp = 0.0;
    for (double v : values) {  // Kahan summation
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    const double mean = sum / n;
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    return {mean, values.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0};
}

} // namespace detail

/// Statistical ensemble for the three PPT values: each run simulates the
/// full six-setting acquisition with n_samples per setting, reconstructs
/// the covariance matrix and computes the PPT values. Runs are independent
/// with seeds derived from (seed, run index), so the result does not depend
/// on scheduling.
inline MonteCarloResult monte_carlo_ppt(const CovarianceMatrix& gamma_true,
                                        std::size_t n_samples, std::size_t n_runs,
                                        std::uint64_t seed) {
    if (gamma_true.n_modes() != 3) {
        throw DimensionMismatch("monte_carlo_ppt expects a three-mode state");
    }
    if (n_runs < 2) {
        throw InsufficientSamples("monte_carlo_ppt needs n_runs >= 2");
    }

    std::vector<std::array<double, 3>> ensemble(n_runs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    const auto worker = [&]() {
        for (std::size_t run = next.fetch_add(1); run < n_runs; run = next.fetch_add(1)) {
            try {
                std::array<Eigen::Matrix3d, 6> moments;
                std::array<std::size_t, 6> counts{};
                for (int s = 0; s < 6; ++s) {
                    const auto block =
                        sample_block(gamma_true, canonical_settings()[s],
                                     static_cast<Eigen::Index>(n_samples), mix_seed(seed, run, s));
                    moments[s] = block_moments(block);
                    counts[s] = n_samples;
                }
                const auto rec = reconstruct_from_moments(moments, counts);
                ensemble[run] = {ppt_value(rec.gamma_hat, 0), ppt_value(rec.gamma_hat, 1),
                                 ppt_value(rec.gamma_hat, 2)};
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t n_threads = std::min(hw, n_runs);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<double> a(n_runs), b(n_runs), c(n_runs);
    for (std::size_t r = 0; r < n_runs; ++r) {
        a[r] = ensemble[r][0];
        b[r] = ensemble[r][1];
        c[r] = ensemble[r][2];
    }
    return MonteCarloResult{detail::summarize(a), detail::summarize(b), detail::summarize(c),
                            n_samples, n_runs, seed};
}

} // namespace sepdist
