#include <doctest.h>

#include <cmath>

#include "entbound/rng.hpp"

using namespace entbound;

TEST_CASE("identical seed and stream reproduce the sequence") {
    RngStream a = gaussian_stream(12345, 7);
    RngStream b = gaussian_stream(12345, 7);
    for (int i = 0; i < 100; ++i) CHECK(next_normal(a) == next_normal(b));
}

TEST_CASE("distinct streams differ") {
    RngStream a = gaussian_stream(12345, 0);
    RngStream b = gaussian_stream(12345, 1);
    int same = 0;
    for (int i = 0; i < 100; ++i)
        if (next_normal(a) == next_normal(b)) ++same;
    CHECK(same == 0);
}

TEST_CASE("normal draws match the CLT envelope") {
    // oracle: 3/sqrt(N) on the mean, chi-square spread on the variance
    RngStream s = gaussian_stream(42, 0);
    const long n = 1000000;
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < n; ++i) {
        const double z = next_normal(s);
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.004);
    CHECK(std::abs(var - 1.0) < 0.005);
}

TEST_CASE("uniform draws stay in (0,1]") {
    RngStream s = gaussian_stream(9, 3);
    for (int i = 0; i < 10000; ++i) {
        const double u = next_uniform(s);
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
}
