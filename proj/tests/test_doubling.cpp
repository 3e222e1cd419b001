#include "battery.hpp"

#include "fluidq/doubling.hpp"
#include "fluidq/error.hpp"

#include <doctest.h>

using namespace fluidq;

namespace {

// Independent Newton solve of the Riccati equation for M2 (numpy, 60 steps).
Matrix m2_psi() {
    Matrix p(2, 2);
    p << 0.29339597579413645, 0.7066040242058638, 0.4174830361772122, 0.5825169638227878;
    return p;
}

Matrix m2_psi_hat() {
    Matrix p(2, 2);
    p << 0.5139416014273682, 0.24150220472043032, 0.4610900260957192, 0.1700657847784945;
    return p;
}

void check_scalar_blocks(const DoublingState& s, double e, double f, double g, double h) {
    CHECK(s.e(0, 0) == doctest::Approx(e).epsilon(1e-14));
    CHECK(s.f(0, 0) == doctest::Approx(f).epsilon(1e-14));
    CHECK(s.g(0, 0) == doctest::Approx(g).epsilon(1e-14));
    CHECK(s.h(0, 0) == doctest::Approx(h).epsilon(1e-14));
}

}  // namespace

TEST_CASE("optimal parameters and variants") {
    const OptimalParameters opt = optimal_parameters(testing::m1());
    CHECK(opt.alpha_opt == 0.5);
    CHECK(opt.beta_opt == 1.0);

    const DoublingParams sda = variant_parameters(Variant::Sda, opt);
    CHECK(sda.alpha == 0.5);
    CHECK(sda.beta == 0.5);
    const DoublingParams ss = variant_parameters(Variant::SdaSs, opt);
    CHECK(ss.alpha == 0.0);
    CHECK(ss.beta == 1.0);
    const DoublingParams adda = variant_parameters(Variant::Adda, opt);
    CHECK(adda.alpha == 0.5);
    CHECK(adda.beta == 1.0);

    CHECK(parse_variant("sda-ss") == Variant::SdaSs);
    CHECK(parse_variant("ADDA") == Variant::Adda);
    CHECK_FALSE(parse_variant("newton").has_value());
}

TEST_CASE("M1 iterates by hand") {
    const FluidModel m = testing::m1();
    DoublingState s = initialize(m, {0.5, 1.0, Variant::Adda});
    check_scalar_blocks(s, 4.0 / 7, 1.0 / 7, 3.0 / 7, 6.0 / 7);
    s = step(s);
    CHECK(s.k == 1);
    check_scalar_blocks(s, 16.0 / 31, 1.0 / 31, 15.0 / 31, 30.0 / 31);

    check_scalar_blocks(initialize(m, {0.5, 0.5, Variant::Sda}), 0.6, 0.2, 0.4, 0.8);
}

TEST_CASE("inadmissible parameters") {
    const FluidModel m = testing::m1();
    CHECK_THROWS_AS(check_admissible(m, 0.0, 0.0), Error);
    CHECK_THROWS_AS(check_admissible(m, 0.6, 0.5), Error);
    CHECK_THROWS_AS(check_admissible(m, 0.5, 1.5), Error);
    CHECK_THROWS_AS(check_admissible(m, -0.1, 0.5), Error);
    CHECK_NOTHROW(check_admissible(m, 0.0, 1.0));
    try {
        static_cast<void>(solve(m, {Variant::Custom, 2.0, 2.0}));
        FAIL("expected BadParams");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadParams);
    }

    Matrix t(2, 2);
    t << 0, 0, 1, -1;
    Vector c(2);
    c << 1, -1;
    try {
        static_cast<void>(optimal_parameters(validate_model(t, c)));
        FAIL("expected DegenerateDiagonal");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateDiagonal);
    }
}

TEST_CASE("M1 solves to the closed form") {
    const SolveReport r = solve(testing::m1());
    CHECK(r.converged);
    CHECK(r.psi(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.psi_hat(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.classification == Classification::Transient);
    CHECK(r.riccati_residual < 1e-14);
}

TEST_CASE("M2 with all three variants") {
    const FluidModel m = testing::m2();
    const int expected[] = {8, 8, 9};
    const Variant variants[] = {Variant::Adda, Variant::Sda, Variant::SdaSs};
    for (int i = 0; i < 3; ++i) {
        SolveOptions o;
        o.variant = variants[i];
        const SolveReport r = solve(m, o);
        CAPTURE(variant_name(variants[i]));
        CHECK(r.converged);
        CHECK(r.iterations == expected[i]);
        CHECK(norm_inf(r.psi - m2_psi()) < 1e-13);
        CHECK(norm_inf(r.psi_hat - m2_psi_hat()) < 1e-13);
        CHECK(r.classification == Classification::PositiveRecurrent);
        CHECK(static_cast<int>(r.history.size()) == r.iterations + 1);
    }
}

TEST_CASE("iterates stay stochastic on the battery") {
    for (const FluidModel& m : testing::battery(24)) {
        const OptimalParameters opt = optimal_parameters(m);
        DoublingState s = initialize(m, variant_parameters(Variant::Adda, opt));
        for (int k = 0; k < 12; ++k) {
            const Matrix a = s.assemble();
            CHECK(a.minCoeff() >= -1e-14);
            CHECK((a.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-10);
            if (s.e.norm() * s.f.norm() < 1e-30) break;
            s = step(s);
        }
    }
}

TEST_CASE("max_iter leaves the report unconverged") {
    SolveOptions o;
    o.max_iter = 2;
    const SolveReport r = solve(testing::m2(), o);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 2);
}
