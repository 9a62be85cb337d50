#include "binsmooth/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace binsmooth;

TEST_CASE("streams are deterministic and substreams distinct") {
    Rng a(7), b(7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng s0 = Rng::substream(7, 0, "x");
    Rng s1 = Rng::substream(7, 1, "x");
    Rng s0y = Rng::substream(7, 0, "y");
    const auto v0 = s0.next_u64();
    CHECK(v0 != s1.next_u64());
    CHECK(v0 != s0y.next_u64());

    Rng s0_again = Rng::substream(7, 0, "x");
    CHECK(v0 == s0_again.next_u64());
}

TEST_CASE("uniform01 stays inside the open interval") {
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("normal quantile hits reference values") {
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(normal_quantile(0.9875) == doctest::Approx(2.2414027).epsilon(1e-6));
    CHECK(normal_quantile(0.025) == doctest::Approx(-1.959964).epsilon(1e-6));

    for (double p : {1e-8, 1e-4, 0.2, 0.7, 1.0 - 1e-6}) {
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
    }
}

TEST_CASE("normal draws have sane moments") {
    Rng rng(11);
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}
