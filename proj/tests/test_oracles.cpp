#include "battery.hpp"

#include "fluidq/doubling.hpp"
#include "fluidq/error.hpp"
#include "fluidq/oracles.hpp"

#include <doctest.h>

using namespace fluidq;

namespace {

Matrix scalar(double v) {
    Matrix m(1, 1);
    m << v;
    return m;
}

const Representation kAll[] = {Representation::DoubleSum, Representation::Sum1, Representation::Sum2,
                               Representation::Sum3};

}  // namespace

TEST_CASE("fixed-point oracle") {
    const FixedPointResult a = riccati_fixed_point(testing::m1());
    CHECK(a.converged);
    CHECK(a.psi(0, 0) == doctest::Approx(0.5).epsilon(1e-12));

    const FixedPointResult b = riccati_fixed_point(reverse_rates(testing::m1()));
    CHECK(b.converged);
    CHECK(b.psi(0, 0) == doctest::Approx(1.0).epsilon(1e-11));

    const FixedPointResult c = riccati_fixed_point(testing::m2());
    CHECK(c.converged);
    CHECK(norm_inf(c.psi - solve(testing::m2()).psi) < 1e-11);

    const FixedPointResult capped = riccati_fixed_point(testing::m2(), 1e-13, 3);
    CHECK_FALSE(capped.converged);
    CHECK(capped.iterations == 3);
}

TEST_CASE("gamma weights") {
    CHECK(gamma_weight(0, 0, 2.0, 2.0) == doctest::Approx(0.5));
    CHECK(gamma_weight(1, 2, 1.0, 1.0) == doctest::Approx(3.0 / 16.0));
    CHECK(gamma_weight(2, 0, 3.0, 1.0) == doctest::Approx(27.0 / 64.0));
    // Each row k sums to one over n.
    for (int k : {0, 3, 10}) {
        double total = 0.0;
        for (int n = 0; n < 2000; ++n) total += gamma_weight(k, n, 2.0, 3.0);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(gamma_weight(300, 300, 1.0, 1.0) > 0.0);
}

TEST_CASE("representation names") {
    for (Representation r : kAll) CHECK(parse_representation(representation_name(r)) == r);
    CHECK(parse_representation("2") == Representation::Sum2);
    CHECK(parse_representation("double") == Representation::DoubleSum);
    CHECK_FALSE(parse_representation("sum4").has_value());
}

TEST_CASE("every series recovers Psi of M1") {
    for (Representation r : kAll) {
        CAPTURE(representation_name(r));
        const SeriesEstimate s = series_psi(testing::m1(), scalar(0.5), 2.0, 2.0, r, 64);
        CHECK(s.value(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("series recover Psi of M2") {
    const FluidModel u = rescale_to_unit_rates(testing::m2());
    const Matrix psi = solve(u).psi;
    for (Representation r : kAll) {
        CAPTURE(representation_name(r));
        const int terms = r == Representation::DoubleSum ? 1024 : 4096;
        const SeriesEstimate s = series_psi(u, psi, 4.0, 4.0, r, terms);
        CHECK(norm_inf(s.value - psi) < 1e-8);
    }
}

TEST_CASE("partial sums grow with the truncation") {
    const FluidModel u = rescale_to_unit_rates(testing::m2());
    const Matrix psi = solve(u).psi;
    for (Representation r : kAll) {
        CAPTURE(representation_name(r));
        Matrix previous = Matrix::Zero(2, 2);
        for (int k : {0, 2, 8, 32}) {
            const Matrix v = series_psi(u, psi, 6.0, 5.0, r, k).value;
            CHECK((v - previous).minCoeff() >= -1e-15);
            CHECK((psi - v).minCoeff() >= -1e-12);
            previous = v;
        }
    }
}

TEST_CASE("series refuse small rates and scaled models") {
    // Only the factors a representation uses are checked: at lambda = 1 every
    // factor of Sum1 on M1 is still nonnegative.
    CHECK(series_psi(testing::m1(), scalar(0.5), 1.0, 2.0, Representation::Sum1).value(0, 0) ==
          doctest::Approx(0.5).epsilon(1e-12));
    const FluidModel m1 = testing::m1();
    try {
        static_cast<void>(series_psi(m1, scalar(0.5), 2.0, 0.5, Representation::Sum2));
        FAIL("expected RateTooSmall");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RateTooSmall);
    }
    CHECK_THROWS_AS(static_cast<void>(series_psi(testing::m2(), Matrix::Zero(2, 2), 8, 8,
                                                 Representation::Sum1)),
                    Error);
}
