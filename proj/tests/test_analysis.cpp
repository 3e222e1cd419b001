#include "battery.hpp"

#include "fluidq/analysis.hpp"
#include "fluidq/doubling.hpp"
#include "fluidq/error.hpp"

#include <doctest.h>

using namespace fluidq;

namespace {

Matrix scalar(double v) {
    Matrix m(1, 1);
    m << v;
    return m;
}

}  // namespace

TEST_CASE("derived matrices of M1 at lambda = mu = 2") {
    const DerivedMatrices d = derived_matrices(testing::m1(), scalar(0.5), 2.0, 2.0);
    CHECK(d.u(0, 0) == doctest::Approx(-1.0));
    CHECK(std::abs(d.k(0, 0)) < 1e-15);
    CHECK(d.v_mu(0, 0) == doctest::Approx(0.5));
    CHECK(d.v_lambda(0, 0) == doctest::Approx(0.5));
    CHECK(d.w(0, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(d.q_w(0, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(d.r1(0, 0) == doctest::Approx(1.0));
    CHECK(d.r1_block(0, 0) == doctest::Approx(1.0));
    CHECK(d.p_lambda(1, 1) == doctest::Approx(0.0));
    CHECK(d.p_mu(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("derived matrices reject bad input") {
    auto code = [](auto f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    CHECK(code([] { static_cast<void>(derived_matrices(testing::m2(), Matrix::Zero(2, 2), 8, 8)); }) ==
          ErrorCode::NonUnitRates);
    CHECK(code([] { static_cast<void>(derived_matrices(testing::m1(), scalar(1.5), 2, 2)); }) ==
          ErrorCode::BadPsi);
    CHECK(code([] { static_cast<void>(derived_matrices(testing::m1(), scalar(0.5), 0, 2)); }) ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("Riccati residuals vanish at the solution") {
    const FluidModel m1 = testing::m1();
    CHECK(riccati_residual(m1, scalar(0.5)) < 1e-15);
    CHECK(riccati_residual(m1, scalar(0.4)) > 1e-3);
    CHECK(dual_riccati_residual(m1, scalar(1.0)) < 1e-15);

    const FluidModel m2 = testing::m2();
    const SolveReport r = solve(m2);
    CHECK(riccati_residual(m2, r.psi) < 1e-13);
    CHECK(dual_riccati_residual(m2, r.psi_hat) < 1e-13);
    CHECK(riccati_residual(rescale_to_unit_rates(m2), r.psi) < 1e-13);
}

TEST_CASE("recurrence classification") {
    const FluidModel m1 = testing::m1();
    const RecurrenceEvidence e1 = recurrence_evidence(m1, scalar(0.5), scalar(1.0));
    CHECK(e1.classification == Classification::Transient);
    CHECK(e1.gamma == doctest::Approx(-1.0));

    const SolveReport r2 = solve(testing::m2());
    const RecurrenceEvidence e2 = recurrence_evidence(testing::m2(), r2.psi, r2.psi_hat);
    CHECK(e2.classification == Classification::PositiveRecurrent);
    CHECK(std::abs(e2.gamma) < 1e-9);
    CHECK(e2.delta < 0.0);

    const RecurrenceEvidence en = recurrence_evidence(testing::null_model(), scalar(1.0), scalar(1.0));
    CHECK(en.classification == Classification::NullRecurrent);

    // A transient Psi paired with a recurrent drift cannot both hold.
    CHECK_THROWS_AS(static_cast<void>(recurrence_evidence(reverse_rates(m1), scalar(0.5), scalar(1.0))),
                    Error);

    CHECK(classification_name(Classification::PositiveRecurrent) == "positive_recurrent");
    CHECK(classification_name(Classification::NullRecurrent) == "null_recurrent");
}

TEST_CASE("Perron identities on M1 and the battery") {
    const PerronIdentityReport p = perron_identities(derived_matrices(testing::m1(), scalar(0.5), 2, 2));
    CHECK(p.rho_w == doctest::Approx(1.0 / 3.0));
    CHECK(p.rho_r1 == doctest::Approx(1.0));
    CHECK(p.holds());

    for (const FluidModel& m : testing::battery(24)) {
        const FluidModel u = rescale_to_unit_rates(m);
        const SolveReport r = solve(u);
        const double lam = 2.0 * u.max_exit_rate();
        const PerronIdentityReport q = perron_identities(derived_matrices(u, r.psi, lam, 1.5 * lam));
        CHECK(q.holds());
        CHECK(q.r1_forms_gap < 1e-10);
    }
}

TEST_CASE("spectral radii grow with both rates") {
    const FluidModel u = rescale_to_unit_rates(testing::m2());
    const SolveReport r = solve(u);
    const MonotonicityTable t = monotonicity_probe(u, r.psi, {16, 4, 8, 64}, {4, 32, 8});
    CHECK(t.monotone);
    CHECK(t.lambdas.front() == 4.0);
    CHECK(t.rho_w.rows() == 4);
    CHECK(t.rho_w.cols() == 3);
    CHECK(t.rho_w.maxCoeff() <= 1.0 + 1e-12);
}
