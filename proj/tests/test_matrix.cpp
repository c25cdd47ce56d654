#include <doctest.h>

#include <limits>

#include "entbound/matrix.hpp"

using namespace entbound;

TEST_CASE("matrix construction and invariants") {
    Matrix m{{1.0, 2.0}, {3.0, 4.0}};
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 2);
    CHECK(m(1, 0) == 3.0);
    CHECK(m.trace() == 5.0);

    CHECK_THROWS_AS(Matrix(2, 2, {1.0, 2.0, 3.0}), DimensionMismatch);
    CHECK_THROWS_AS(Matrix(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}),
                    NonFiniteValue);
    CHECK_THROWS_AS((Matrix{{1.0, 2.0}, {3.0}}), DimensionMismatch);
}

TEST_CASE("matrix algebra") {
    const Matrix a{{1.0, 2.0}, {3.0, 4.0}};
    const Matrix b{{0.0, 1.0}, {1.0, 0.0}};
    const Matrix ab = a * b;
    CHECK(ab(0, 0) == 2.0);
    CHECK(ab(0, 1) == 1.0);
    CHECK(ab(1, 0) == 4.0);
    CHECK(ab(1, 1) == 3.0);
    CHECK(max_abs_diff(a.transpose().transpose(), a) == 0.0);
    CHECK(frobenius_inner(a, a) == doctest::Approx(a.frobenius_norm() * a.frobenius_norm()));
    CHECK_THROWS_AS(a * Matrix(3, 3), DimensionMismatch);

    const Matrix i2 = Matrix::identity(2);
    CHECK(max_abs_diff(a * i2, a) == 0.0);
    CHECK((a - a).max_abs() == 0.0);
}
