#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sepdist/covariance.hpp"
#include "sepdist/network.hpp"

using namespace sepdist;
using Catch::Approx;

namespace {

CovarianceMatrix diag(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return CovarianceMatrix(Eigen::MatrixXd(v.asDiagonal()));
}

} // namespace

TEST_CASE("construction symmetrizes and validates") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
    m(0, 1) = 1e-8;  // below the rejection threshold
    const CovarianceMatrix g(m);
    CHECK(g(0, 1) == Approx(5e-9).margin(1e-12));
    CHECK(g(0, 1) == g(1, 0));

    m(0, 1) = 1e-3;
    CHECK_THROWS_AS(CovarianceMatrix(m), NotSymmetric);
    CHECK_THROWS_AS(CovarianceMatrix(Eigen::MatrixXd::Identity(3, 3)), DimensionMismatch);
    CHECK_THROWS_AS(CovarianceMatrix(Eigen::MatrixXd::Identity(2, 4)), DimensionMismatch);
}

TEST_CASE("symplectic form squares to minus identity") {
    for (int n : {1, 2, 3}) {
        const Eigen::MatrixXd j = symplectic_form(n);
        CHECK((j + j.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((j * j + Eigen::MatrixXd::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("symplectic eigenvalues of simple states") {
    const auto vac = symplectic_eigenvalues(CovarianceMatrix::vacuum(3));
    REQUIRE(vac.size() == 3);
    for (double mu : vac) CHECK(mu == Approx(1.0).margin(1e-12));

    const auto pure = symplectic_eigenvalues(diag({0.5, 2.0}));
    REQUIRE(pure.size() == 1);
    CHECK(pure[0] == Approx(1.0).margin(1e-12));
}

TEST_CASE("loss-compensated matrix has minimum symplectic eigenvalue 1.11") {
    const auto mus = symplectic_eigenvalues(fixtures::gamma_loss_compensated());
    CHECK(mus.front() == Approx(1.11).margin(0.01));
    CHECK(std::is_sorted(mus.begin(), mus.end()));
}

TEST_CASE("not positive definite input is rejected") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
    m(0, 0) = -0.5;
    CHECK_THROWS_AS(symplectic_eigenvalues(CovarianceMatrix(m)), NotPositiveDefinite);

    m(0, 0) = 0.0;
    CHECK_THROWS_AS(symplectic_eigenvalues(CovarianceMatrix(m)), NotPositiveDefinite);
}

TEST_CASE("partial transpose") {
    SECTION("diagonal matrices are unchanged") {
        const auto g = diag({0.7, 1.9, 1.2, 1.4});
        for (int k = 0; k < 2; ++k) {
            CHECK((partial_transpose(g, k).matrix() - g.matrix()).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    SECTION("is an involution and keeps symmetry and diagonal") {
        std::mt19937_64 rng(11);
        const auto g = oracles::random_physical_state(3, rng);
        for (int k = 0; k < 3; ++k) {
            const auto pt = partial_transpose(g, k);
            CHECK((pt.matrix() - pt.matrix().transpose()).cwiseAbs().maxCoeff() == 0.0);
            CHECK((pt.matrix().diagonal() - g.matrix().diagonal()).cwiseAbs().maxCoeff() == 0.0);
            const auto back = partial_transpose(pt, k);
            CHECK((back.matrix() - g.matrix()).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    SECTION("flips covariances involving the transposed phase quadrature") {
        const auto g = fixtures::gamma_measured();
        const auto pt = partial_transpose(g, 1);  // mode B: P_B has index 3
        CHECK(g(0, 3) == Approx(-0.03));
        CHECK(pt(0, 3) == Approx(0.03));
        CHECK(pt(2, 3) == Approx(0.29));
        CHECK(pt(0, 2) == Approx(g(0, 2)));
    }
    SECTION("mode index is validated") {
        CHECK_THROWS_AS(partial_transpose(CovarianceMatrix::vacuum(2), 2), IndexOutOfRange);
        CHECK_THROWS_AS(partial_transpose(CovarianceMatrix::vacuum(2), -1), IndexOutOfRange);
    }
}

TEST_CASE("PPT values of the measured state") {
    const auto g = fixtures::gamma_measured();
    CHECK(ppt_value(g, 0) == Approx(0.89).margin(0.015));
    CHECK(ppt_value(g, 1) == Approx(1.10).margin(0.015));
    CHECK(ppt_value(g, 2) == Approx(1.07).margin(0.015));
}

TEST_CASE("product of vacua is separable in every splitting") {
    const auto g = CovarianceMatrix::vacuum(2);
    CHECK(ppt_value(g, 0) == Approx(1.0).margin(1e-12));
    CHECK(ppt_value(g, 1) == Approx(1.0).margin(1e-12));
    CHECK_FALSE(indicates_entanglement(ppt_value(g, 0)));
}

TEST_CASE("mixing squeezing with vacuum entangles (against the polynomial oracle)") {
    const double r = 0.5;
    const auto sq = diag({std::exp(-2.0 * r), std::exp(2.0 * r)});
    const auto g = beamsplitter(0.5, 0, 1, 2).apply(tensor(sq, CovarianceMatrix::vacuum(1)));
    const double mu = ppt_value(g, 0);
    CHECK(mu < 1.0);
    CHECK(mu == Approx(oracles::char_poly_ppt(g, 0)).margin(1e-10));
    CHECK(mu == Approx(std::exp(-r)).margin(1e-12));
}

TEST_CASE("is_physical") {
    CHECK(is_physical(CovarianceMatrix::vacuum(1)));
    CHECK_FALSE(is_physical(diag({0.5, 0.5})));
    CHECK(is_physical(fixtures::gamma_loss_compensated()));

    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
    m(1, 1) = -1.0;  // not positive definite: certainly unphysical
    CHECK_FALSE(is_physical(CovarianceMatrix(m)));
}

TEST_CASE("symplectic eigenvalues are invariant under symplectic conjugation") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = oracles::random_physical_state(3, rng);
        const auto s = oracles::random_passive_network(3, rng);
        const auto before = symplectic_eigenvalues(g);
        const auto after = symplectic_eigenvalues(s.apply(g));
        for (std::size_t i = 0; i < before.size(); ++i) {
            CHECK(after[i] == Approx(before[i]).margin(1e-8));
        }
    }
}

TEST_CASE("PPT value is invariant under local phase rotations") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (int trial = 0; trial < 10; ++trial) {
        const auto g = oracles::random_physical_state(3, rng);
        auto rotated = g;
        for (int m = 0; m < 3; ++m) {
            rotated = phase_shift(angle(rng), m, 3).apply(rotated);
        }
        for (int k = 0; k < 3; ++k) {
            CHECK(ppt_value(rotated, k) == Approx(ppt_value(g, k)).margin(1e-8));
        }
    }
}

TEST_CASE("one-mode closed form sqrt(ab)") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> var(0.05, 20.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double a = var(rng), b = var(rng);
        const auto mus = symplectic_eigenvalues(diag({a, b}));
        REQUIRE(mus.size() == 1);
        CHECK(mus[0] == Approx(std::sqrt(a * b)).epsilon(1e-10));
    }
}

TEST_CASE("determinant equals product of squared symplectic eigenvalues") {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = oracles::random_physical_state(3, rng);
        const auto mus = symplectic_eigenvalues(g);
        double prod = 1.0;
        for (double mu : mus) prod *= mu * mu;
        CHECK(prod == Approx(g.matrix().determinant()).epsilon(1e-6));
    }
}

TEST_CASE("implementation agrees with the polynomial route on random states") {
    std::mt19937_64 rng(25);
    for (int n : {1, 2, 3}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto g = oracles::random_physical_state(n, rng);
            const auto impl = symplectic_eigenvalues(g);
            const auto ref = oracles::char_poly_symplectic_eigenvalues(g);
            REQUIRE(impl.size() == ref.size());
            for (std::size_t i = 0; i < impl.size(); ++i) {
                CHECK(impl[i] == Approx(ref[i]).epsilon(1e-7).margin(1e-9));
            }
        }
    }
}
