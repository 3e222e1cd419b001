#include "fluidq/error.hpp"
#include "fluidq/numerics.hpp"
#include "fluidq/philox.hpp"

#include <doctest.h>

using namespace fluidq;

TEST_CASE("norm_inf is the max absolute row sum") {
    Matrix m(2, 3);
    m << 1, -2, 3, -4, 0.5, 0.5;
    CHECK(norm_inf(m) == doctest::Approx(6.0));
}

TEST_CASE("solve_linear and its right-hand twin") {
    Matrix a(2, 2);
    a << 4, 1, 2, 3;
    Matrix b(2, 1);
    b << 1, 2;
    const Matrix x = solve_linear(a, b);
    CHECK(norm_inf(a * x - b) < 1e-15);

    Matrix c(1, 2);
    c << 1, 2;
    const Matrix y = solve_linear_right(a, c);
    CHECK(norm_inf(y * a - c) < 1e-15);

    Matrix s(2, 2);
    s << 1.5, -1, -1, 3;
    Matrix inv(2, 2);
    inv << 3, 1, 1, 1.5;
    inv /= 3.5;
    CHECK(norm_inf(solve_linear(s, Matrix::Identity(2, 2)) - inv) < 1e-15);
}

TEST_CASE("singular systems are refused") {
    Matrix a(2, 2);
    a << 1, 2, 2, 4;
    Matrix b = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(static_cast<void>(solve_linear(a, b)), Error);
    try {
        static_cast<void>(solve_linear(a, b));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Singular);
    }
}

TEST_CASE("spectral radius of nonnegative matrices") {
    Matrix m(2, 2);
    m << 0.5, 0.5, 0.25, 0.75;
    CHECK(spectral_radius(m) == doctest::Approx(1.0).epsilon(1e-12));

    Matrix perm(2, 2);
    perm << 0, 2, 2, 0;  // periodic, the bracket never closes
    CHECK(spectral_radius(perm) == doctest::Approx(2.0).epsilon(1e-12));

    Matrix reducible(2, 2);
    reducible << 0.3, 0.0, 0.7, 0.2;
    CHECK(spectral_radius(reducible) == doctest::Approx(0.3).epsilon(1e-12));

    Matrix neg(1, 1);
    neg << -1;
    CHECK_THROWS_AS(static_cast<void>(spectral_radius(neg)), Error);
}

TEST_CASE("max_abs_eigenvalue accepts signed matrices") {
    Matrix m(2, 2);
    m << 0, -3, 1, 0;  // eigenvalues +-i sqrt(3)
    CHECK(max_abs_eigenvalue(m) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("irreducibility follows the off-diagonal graph") {
    Matrix t(3, 3);
    t << -1, 1, 0, 0, -1, 1, 1, 0, -1;
    CHECK(is_irreducible(t));
    t(2, 0) = 0;
    CHECK_FALSE(is_irreducible(t));
}

TEST_CASE("Perron pair of a subgenerator") {
    Matrix u(2, 2);
    u << -2, 1, 1, -2;  // eigenvalues -1, -3
    const PerronPair p = perron_left_pair(u);
    CHECK(p.value == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(p.vector(0) == doctest::Approx(0.5));
    CHECK(p.vector.sum() == doctest::Approx(1.0));

    Matrix scalar(1, 1);
    scalar << -0.25;
    CHECK(perron_left_pair(scalar).value == -0.25);
}

TEST_CASE("Sylvester solve matches the Kronecker definition") {
    Matrix a(2, 2);
    a << 3, 1, 0, 2;
    Matrix d(1, 1);
    d << 1.5;
    Matrix rhs(2, 1);
    rhs << 1, 4;
    const Matrix x = solve_sylvester(a, d, rhs);
    CHECK(norm_inf(a * x + x * d - rhs) < 1e-14);

    const SylvesterSolver s(a, d);
    CHECK(norm_inf(s.solve(rhs) - x) < 1e-15);
}

TEST_CASE("argmin_entry") {
    Matrix m(2, 2);
    m << 1, -3, 0, 2;
    const auto [i, j] = argmin_entry(m);
    CHECK(i == 0);
    CHECK(j == 1);
}

TEST_CASE("Philox4x32-10 known answers") {
    // Random123 known-answer vectors.
    const auto zero = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);

    const auto ones = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                           {0xffffffffu, 0xffffffffu});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);

    const auto pi = Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                         {0xa4093822u, 0x299f31d0u});
    CHECK(pi[0] == 0xd16cfe09u);
    CHECK(pi[1] == 0x94fdccebu);
    CHECK(pi[2] == 0x5001e420u);
    CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("Philox streams stay in (0, 1] and are reproducible") {
    PhiloxStream a(42, 3, 1);
    PhiloxStream b(42, 3, 1);
    PhiloxStream c(42, 4, 1);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const double x = a.next_open_closed();
        CHECK(x > 0.0);
        CHECK(x <= 1.0);
        CHECK(x == b.next_open_closed());
        differs = differs || x != c.next_open_closed();
    }
    CHECK(differs);
}
