#include "binsmooth/partition.hpp"

#include "binsmooth/errors.hpp"
#include "binsmooth/rng.hpp"
#include "binsmooth/simharness.hpp"

#include <doctest.h>

using namespace binsmooth;

namespace {

Dataset dataset_from_x(const Eigen::VectorXd& x) {
    return Dataset::make(Eigen::VectorXd::Zero(x.size()), x);
}

} // namespace

TEST_CASE("order-statistic knot rule") {
    Eigen::VectorXd x(10);
    for (int i = 0; i < 10; ++i) x[i] = i + 1; // 1..10
    const Dataset data = dataset_from_x(x);
    const QuantilePartition part = build_partition(data, sort_index(data), 2);

    REQUIRE(part.J == 2);
    CHECK(part.knots[0] == 1.0);
    CHECK(part.knots[1] == 5.0); // x_(floor(10/2)) = x_(5)
    CHECK(part.knots[2] == 10.0);
    CHECK(part.widths[0] == 4.0);
    CHECK(part.widths[1] == 5.0);
    CHECK(part.counts[0] == 4); // [1,5)
    CHECK(part.counts[1] == 6); // [5,10]
}

TEST_CASE("saturated J dedups the coincident first knot") {
    Eigen::VectorXd x(6);
    x << 0.5, 1.5, 2.5, 3.5, 4.5, 5.5;
    const Dataset data = dataset_from_x(x);
    // J=n makes tau_1 = x_(1) coincide with tau_0; dedup shrinks J to n-1
    const QuantilePartition part = build_partition(data, sort_index(data), 6);
    CHECK(part.deduped);
    CHECK(part.requested_J == 6);
    CHECK(part.J == 5);
    for (int j = 0; j + 1 < part.J; ++j) CHECK(part.counts[static_cast<std::size_t>(j)] == 1);
    CHECK(part.counts[static_cast<std::size_t>(part.J - 1)] == 2); // closed last bin
}

TEST_CASE("J beyond the distinct-value count is rejected") {
    Eigen::VectorXd x(9);
    x << 1, 1, 1, 2, 2, 2, 3, 3, 3;
    const Dataset data = dataset_from_x(x);
    CHECK_THROWS_AS(build_partition(data, sort_index(data), 5), NumericError);
    CHECK_NOTHROW(build_partition(data, sort_index(data), 3));
}

TEST_CASE("locate respects the closure conventions") {
    Eigen::VectorXd x(4);
    x << 0.0, 1.0, 1.5, 2.0;
    const Dataset data = dataset_from_x(x);
    const QuantilePartition part = build_partition(data, sort_index(data), 2);
    REQUIRE(part.knots[1] == 1.0);

    CHECK(part.locate(1.0) == 1);  // interior knot opens the right bin
    CHECK(part.locate(2.0) == 1);  // last bin closed
    CHECK(part.locate(0.0) == 0);
    CHECK_THROWS_AS(part.locate(2.5), EvaluationError);
    CHECK_THROWS_AS(part.locate(-0.1), EvaluationError);
}

TEST_CASE("quasi-uniformity ratio") {
    SUBCASE("equal widths") {
        Eigen::VectorXd x(4);
        x << 0.0, 1.0, 1.7, 2.0; // knots land on 0,1,2
        const Dataset data = dataset_from_x(x);
        const QuantilePartition part = build_partition(data, sort_index(data), 2);
        CHECK(quasi_uniformity_ratio(part) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("widths 1,2,4") {
        Eigen::VectorXd x(6);
        x << 0, 1, 1, 3, 3, 7; // knots land on 0,1,3,7
        const Dataset data = dataset_from_x(x);
        const QuantilePartition part = build_partition(data, sort_index(data), 3);
        REQUIRE(part.J == 3);
        CHECK(quasi_uniformity_ratio(part) == doctest::Approx(4.0));
    }
    SUBCASE("Beta(2,4) sample stays quasi-uniform at desk scale") {
        DgpSpec dgp;
        dgp.n = 1000;
        dgp.seed = 31;
        const Dataset data = generate(dgp);
        const QuantilePartition part = build_partition(data, sort_index(data), 20);
        // the thin right tail of Beta(2,4) makes the last bin wide; the
        // ratio sits near 12 at this scale, comfortably bounded
        CHECK(quasi_uniformity_ratio(part) < 15.0);
    }
}

TEST_CASE("partition covers the sample with near-equal masses") {
    Rng rng(99);
    Eigen::VectorXd x(500);
    for (Eigen::Index i = 0; i < 500; ++i) x[i] = rng.normal();
    const Dataset data = dataset_from_x(x);
    for (int J : {2, 7, 23}) {
        const QuantilePartition part = build_partition(data, sort_index(data), J);
        Eigen::Index total = 0;
        Eigen::Index lo = data.n(), hi = 0;
        for (auto c : part.counts) {
            total += c;
            lo = std::min(lo, c);
            hi = std::max(hi, c);
            CHECK(c >= 1);
        }
        CHECK(total == data.n());
        // the first bin loses its right-edge point and the closed last bin
        // gains one, so the count spread is ceil(n/J) - floor(n/J) + 2
        const Eigen::Index n = data.n();
        CHECK(hi - lo <= (n + J - 1) / J - n / J + 2);
    }
}

TEST_CASE("identical inputs give bitwise-identical knots") {
    DgpSpec dgp;
    dgp.n = 400;
    dgp.seed = 17;
    const Dataset data = generate(dgp);
    const QuantilePartition a = build_partition(data, sort_index(data), 13);
    const QuantilePartition b = build_partition(data, sort_index(data), 13);
    CHECK(a.knots == b.knots);
}
