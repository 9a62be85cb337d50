#include "binsmooth/basis.hpp"

#include "binsmooth/errors.hpp"
#include "binsmooth/rng.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

using namespace binsmooth;

namespace {

// partition with prescribed knots: place observations on the knots plus
// enough interior fill so the quantile rule reproduces them
QuantilePartition exact_partition(const std::vector<double>& knots) {
    QuantilePartition part;
    part.J = static_cast<int>(knots.size()) - 1;
    part.requested_J = part.J;
    part.knots = Eigen::Map<const Eigen::VectorXd>(knots.data(),
                                                   static_cast<Eigen::Index>(knots.size()));
    part.widths.resize(part.J);
    for (int j = 0; j < part.J; ++j) part.widths[j] = knots[j + 1] - knots[j];
    part.counts.assign(static_cast<std::size_t>(part.J), 1);
    return part;
}

QuantilePartition uniform_partition(int J, double lo = 0.0, double hi = 1.0) {
    std::vector<double> knots(static_cast<std::size_t>(J) + 1);
    for (int j = 0; j <= J; ++j) knots[static_cast<std::size_t>(j)] = lo + (hi - lo) * j / J;
    return exact_partition(knots);
}

QuantilePartition random_partition(int J, Rng& rng) {
    std::vector<double> knots;
    knots.push_back(0.0);
    double t = 0.0;
    for (int j = 0; j < J; ++j) {
        t += rng.uniform(0.2, 1.7);
        knots.push_back(t);
    }
    return exact_partition(knots);
}

/// Divided-difference (truncated power) construction of a simple-knot
/// B-spline, valid when the p+2 support knots are strictly increasing.
double truncated_power_bspline(const Eigen::VectorXd& xi, int l, int p, double x) {
    const double span = xi[l + p + 1] - xi[l];
    double sum = 0.0;
    for (int j = l; j <= l + p + 1; ++j) {
        double denom = 1.0;
        for (int k = l; k <= l + p + 1; ++k)
            if (k != j) denom *= xi[k] - xi[j];
        const double t = x - xi[j];
        sum += (t >= 0.0 ? std::pow(t, p) : 0.0) / denom;
    }
    return span * sum;
}

} // namespace

TEST_CASE("basis spec dimension") {
    const QuantilePartition part = uniform_partition(5);
    CHECK(BasisSpec(3, 0, part).K() == 20);
    CHECK(BasisSpec(3, 3, part).K() == 8);
    CHECK(BasisSpec(0, 0, part).K() == 5);
    CHECK_THROWS_AS(BasisSpec(2, 3, part), ConfigError);
}

TEST_CASE("unconstrained basis values and derivatives") {
    const QuantilePartition part = uniform_partition(4, 0.0, 2.0); // widths 0.5

    SUBCASE("p=0 indicator scaled by sqrt(J)") {
        const BasisSpec spec(0, 0, part);
        const SparseBasisRow row = eval_unconstrained(spec, 0.7);
        CHECK(row.first == 1);
        CHECK(row.values.size() == 1);
        CHECK(row.values[0] == doctest::Approx(2.0)); // sqrt(4)
    }
    SUBCASE("p=1 left-edge evaluation") {
        const BasisSpec spec(1, 0, part);
        const SparseBasisRow row = eval_unconstrained(spec, 0.5); // start of bin 2
        CHECK(row.first == 2);
        CHECK(row.values[0] == doctest::Approx(2.0));
        CHECK(row.values[1] == doctest::Approx(0.0));
    }
    SUBCASE("p=1 first derivative rescales by the bin width") {
        const BasisSpec spec(1, 0, part);
        const SparseBasisRow row = eval_unconstrained(spec, 0.7, 1);
        CHECK(row.values[0] == doctest::Approx(0.0));
        CHECK(row.values[1] == doctest::Approx(4.0)); // sqrt(4)/0.5
    }
    SUBCASE("v beyond p is rejected") {
        const BasisSpec spec(1, 0, part);
        CHECK_THROWS_AS(eval_unconstrained(spec, 0.7, 2), ConfigError);
    }
}

TEST_CASE("extended knot sequences") {
    SUBCASE("p=1 s=1 J=3") {
        const QuantilePartition part = exact_partition({0, 1, 2, 3});
        const ExtendedKnots ext = build_extended_knots(BasisSpec(1, 1, part));
        Eigen::VectorXd expect(6);
        expect << 0, 0, 1, 2, 3, 3;
        CHECK(ext.xi == expect);
    }
    SUBCASE("p=2 s=1 J=2 doubles the interior knot") {
        const QuantilePartition part = exact_partition({0, 1, 2});
        const ExtendedKnots ext = build_extended_knots(BasisSpec(2, 1, part));
        Eigen::VectorXd expect(8);
        expect << 0, 0, 0, 1, 1, 2, 2, 2;
        CHECK(ext.xi == expect);
    }
    SUBCASE("s=0 has no extended sequence") {
        const QuantilePartition part = exact_partition({0, 1, 2});
        CHECK_THROWS_AS(build_extended_knots(BasisSpec(2, 0, part)), ConfigError);
    }
}

TEST_CASE("spline partition of unity") {
    Rng rng(2024);
    for (int trial = 0; trial < 6; ++trial) {
        const int J = 2 + static_cast<int>(rng.next_u64() % 9);
        const QuantilePartition part = random_partition(J, rng);
        const int p = 1 + static_cast<int>(rng.next_u64() % 4);
        const int s = 1 + static_cast<int>(rng.next_u64() % p);
        const BasisSpec spec(p, s, part);
        const double scale = std::sqrt(static_cast<double>(J));
        for (int k = 0; k < 500; ++k) {
            const double x = rng.uniform(part.lo(), part.hi());
            const SparseBasisRow row = eval_spline(spec, x);
            CHECK(row.values.sum() == doctest::Approx(scale).epsilon(1e-12));
            CHECK(row.nnz() <= p + 1);
        }
    }
}

TEST_CASE("hat function peaks at interior knots") {
    const QuantilePartition part = exact_partition({0.0, 0.7, 1.3, 2.1});
    const BasisSpec spec(1, 1, part);
    const SparseBasisRow row = eval_spline(spec, 0.7);
    const double scale = std::sqrt(3.0);
    CHECK(row.values.maxCoeff() == doctest::Approx(scale).epsilon(1e-12));
    CHECK(row.values.minCoeff() == doctest::Approx(0.0));
}

TEST_CASE("cubic spline matches the truncated-power oracle on interior functions") {
    const int p = 3, J = 6;
    const QuantilePartition part = uniform_partition(J);
    const BasisSpec spec(p, p, part);
    const ExtendedKnots ext = build_extended_knots(spec);
    const double scale = std::sqrt(static_cast<double>(J));

    Rng rng(7);
    for (int k = 0; k < 400; ++k) {
        const double x = rng.uniform(0.0, 1.0) * 0.999;
        const SparseBasisRow row = eval_spline(spec, x);
        for (int l = p; l <= J - 1; ++l) { // simple-knot (interior) functions
            const double oracle = truncated_power_bspline(ext.xi, l, p, x);
            double ours = 0.0;
            if (l >= row.first && l < row.first + row.nnz()) ours = row.values[l - row.first];
            CHECK(ours / scale == doctest::Approx(oracle).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("every spline basis function lies in the truncated-power space") {
    // space check for boundary functions, where the simple-knot formula
    // does not apply: project each basis function onto {1,x,..,x^p,
    // (x-tau_j)_+^p} over a fine grid and require a tiny residual
    Rng rng(17);
    const int p = 3, J = 5;
    const QuantilePartition part = random_partition(J, rng);
    const BasisSpec spec(p, p, part);
    const int K = spec.K();

    const int G = 600;
    Eigen::MatrixXd basis_vals(G, K);
    Eigen::MatrixXd tp(G, p + 1 + J - 1);
    for (int g = 0; g < G; ++g) {
        const double x =
            part.lo() + (part.hi() - part.lo()) * (g + 0.5) / G;
        basis_vals.row(g).setZero();
        const SparseBasisRow row = eval_spline(spec, x);
        basis_vals.row(g).segment(row.first, row.nnz()) = row.values.transpose();
        for (int a = 0; a <= p; ++a) tp(g, a) = std::pow(x, a);
        for (int j = 1; j < J; ++j) {
            const double t = x - part.knots[j];
            tp(g, p + j) = t > 0.0 ? std::pow(t, p) : 0.0;
        }
    }
    const Eigen::MatrixXd coef = tp.colPivHouseholderQr().solve(basis_vals);
    const double resid = (tp * coef - basis_vals).cwiseAbs().maxCoeff();
    CHECK(resid < 1e-9);
}

TEST_CASE("transformation matrix") {
    SUBCASE("p=s=0 is the identity") {
        const QuantilePartition part = uniform_partition(4);
        const Eigen::SparseMatrix<double> t = transformation_matrix(BasisSpec(0, 0, part));
        CHECK(t.rows() == 4);
        CHECK(t.cols() == 4);
        CHECK(Eigen::MatrixXd(t).isApprox(Eigen::MatrixXd::Identity(4, 4)));
    }
    SUBCASE("s != p is rejected") {
        const QuantilePartition part = uniform_partition(4);
        CHECK_THROWS_AS(transformation_matrix(BasisSpec(2, 1, part)), ConfigError);
    }
    SUBCASE("T_s maps the unconstrained basis onto the spline basis") {
        Rng rng(91);
        for (int p = 1; p <= 3; ++p) {
            for (int J : {2, 3, 5, 8}) {
                const QuantilePartition part =
                    (J % 2 == 0) ? uniform_partition(J) : random_partition(J, rng);
                const BasisSpec spec(p, p, part);
                const Eigen::SparseMatrix<double> t = transformation_matrix(spec);
                REQUIRE(t.rows() == spec.K());
                REQUIRE(t.cols() == (p + 1) * J);

                const BasisSpec spec0(p, 0, part);
                for (int k = 0; k < 50; ++k) {
                    const double x = rng.uniform(part.lo(), part.hi());
                    const SparseBasisRow r0 = eval_unconstrained(spec0, x);
                    Eigen::VectorXd b0 = Eigen::VectorXd::Zero((p + 1) * J);
                    b0.segment(r0.first, r0.nnz()) = r0.values;
                    const Eigen::VectorXd via_t = t * b0;

                    const SparseBasisRow rs = eval_spline(spec, x);
                    Eigen::VectorXd bs = Eigen::VectorXd::Zero(spec.K());
                    bs.segment(rs.first, rs.nnz()) = rs.values;
                    CHECK((via_t - bs).cwiseAbs().maxCoeff() < 1e-10);
                }
            }
        }
    }
    SUBCASE("sparsity bounds: rows <= (p+1)^2, columns <= p+1") {
        Rng rng(8);
        for (int p = 0; p <= 3; ++p) {
            for (int J = 2; J <= 10; ++J) {
                const QuantilePartition part = random_partition(J, rng);
                const Eigen::SparseMatrix<double> t =
                    transformation_matrix(BasisSpec(p, p, part));
                const Eigen::MatrixXd dense(t);
                for (int r = 0; r < dense.rows(); ++r)
                    CHECK((dense.row(r).array() != 0.0).count() <= (p + 1) * (p + 1));
                for (int c = 0; c < dense.cols(); ++c)
                    CHECK((dense.col(c).array() != 0.0).count() <= p + 1);
            }
        }
    }
}

TEST_CASE("derivatives agree with central finite differences") {
    Rng rng(55);
    for (int s = 1; s <= 3; ++s) {
        const int p = 3;
        const QuantilePartition part = random_partition(6, rng);
        const BasisSpec spec(p, s, part);
        for (int v = 1; v <= 3; ++v) {
            for (int k = 0; k < 40; ++k) {
                // stay away from interior knots where low-s derivatives jump
                const int bin = static_cast<int>(rng.next_u64() % 6);
                const double x = part.knots[bin] + part.widths[bin] * rng.uniform(0.2, 0.8);
                const double h = part.widths[bin] * 1e-6;

                const SparseBasisRow lo = eval_spline(spec, x - h, v - 1);
                const SparseBasisRow hi = eval_spline(spec, x + h, v - 1);
                REQUIRE(lo.first == hi.first);
                const Eigen::VectorXd fd = (hi.values - lo.values) / (2.0 * h);
                const SparseBasisRow dv = eval_spline(spec, x, v);
                REQUIRE(dv.first == lo.first);
                const double scale = dv.values.cwiseAbs().maxCoeff() + 1.0;
                CHECK((fd - dv.values).cwiseAbs().maxCoeff() / scale < 1e-5);
            }
        }
    }
}

TEST_CASE("polynomial reproduction across smoothness orders") {
    Rng rng(123);
    const int p = 3;
    const QuantilePartition part = random_partition(7, rng);
    auto poly = [](double x) { return 1.0 + 2.0 * x - x * x + 0.5 * x * x * x; };

    for (int s = 0; s <= p; ++s) {
        const BasisSpec spec(p, s, part);
        const int K = spec.K();
        const int G = 400;
        Eigen::MatrixXd design(G, K);
        Eigen::VectorXd target(G);
        for (int g = 0; g < G; ++g) {
            const double x = part.lo() + (part.hi() - part.lo()) * (g + 0.5) / G;
            design.row(g).setZero();
            const SparseBasisRow row = eval_basis(spec, x);
            design.row(g).segment(row.first, row.nnz()) = row.values.transpose();
            target[g] = poly(x);
        }
        const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(target);
        CHECK((design * coef - target).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("local support bound") {
    Rng rng(5);
    for (int p = 0; p <= 4; ++p) {
        for (int s = 0; s <= p; ++s) {
            const QuantilePartition part = random_partition(5, rng);
            const BasisSpec spec(p, s, part);
            for (int k = 0; k < 50; ++k) {
                const double x = rng.uniform(part.lo(), part.hi());
                const SparseBasisRow row = eval_basis(spec, x);
                CHECK(row.nnz() <= (p + 1) * (p + 1));
                if (s >= 1) CHECK(row.nnz() <= p + 1);
                CHECK(row.first >= 0);
                CHECK(row.first + row.nnz() <= spec.K());
            }
        }
    }
}

TEST_CASE("out-of-support evaluation fails") {
    const QuantilePartition part = uniform_partition(3);
    CHECK_THROWS_AS(eval_basis(BasisSpec(1, 1, part), 1.5), EvaluationError);
    CHECK_THROWS_AS(eval_basis(BasisSpec(1, 0, part), -0.1), EvaluationError);
}
