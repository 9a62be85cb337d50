#include "binsmooth/banded.hpp"
#include "binsmooth/rng.hpp"

#include <doctest.h>

#include <Eigen/Dense>

using namespace binsmooth;

namespace {

SymmetricBandMatrix random_spd_band(int dim, int kd, Rng& rng) {
    // A = M'M + dim*I with banded M gives an SPD matrix of bandwidth kd
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int i = j; i <= std::min(dim - 1, j + kd); ++i) m(i, j) = rng.uniform(-1.0, 1.0);
    Eigen::MatrixXd a = m * m.transpose() + dim * Eigen::MatrixXd::Identity(dim, dim);

    SymmetricBandMatrix band(dim, kd);
    for (int j = 0; j < dim; ++j)
        for (int i = j; i <= std::min(dim - 1, j + kd); ++i) band.add(i, j, a(i, j));
    return band;
}

} // namespace

TEST_CASE("banded cholesky matches dense solve") {
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 3 + static_cast<int>(rng.next_u64() % 40);
        const int kd = static_cast<int>(rng.next_u64() % std::min(5, dim));
        SymmetricBandMatrix a = random_spd_band(dim, kd, rng);

        BandCholesky chol;
        REQUIRE(chol.factor(a));
        CHECK(chol.rcond_estimate() > 0.0);

        Eigen::VectorXd b(dim);
        for (int i = 0; i < dim; ++i) b[i] = rng.uniform(-2.0, 2.0);

        const Eigen::VectorXd x = chol.solve(b);
        const Eigen::VectorXd x_dense = a.dense().ldlt().solve(b);
        CHECK((x - x_dense).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + x_dense.cwiseAbs().maxCoeff()));

        // multi-rhs path
        Eigen::MatrixXd rhs(dim, 3);
        rhs.setRandom();
        const Eigen::MatrixXd xs = chol.solve_matrix(rhs);
        CHECK((a.dense() * xs - rhs).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("banded cholesky rejects indefinite matrices") {
    SymmetricBandMatrix a(3, 1);
    a.add(0, 0, 1.0);
    a.add(1, 1, -2.0);
    a.add(2, 2, 1.0);
    BandCholesky chol;
    CHECK_FALSE(chol.factor(a));
    CHECK_FALSE(chol.ok());
}

TEST_CASE("band storage round trip") {
    SymmetricBandMatrix a(4, 2);
    a.add(2, 0, 1.5);
    a.add(0, 2, 0.5); // symmetric accumulate
    CHECK(a.at(2, 0) == doctest::Approx(2.0));
    CHECK(a.at(0, 2) == doctest::Approx(2.0));
    CHECK(a.at(3, 0) == 0.0);
    CHECK(a.dense()(2, 0) == doctest::Approx(2.0));
}
