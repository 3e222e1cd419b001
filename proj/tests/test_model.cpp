#include "battery.hpp"

#include "fluidq/error.hpp"
#include "fluidq/model.hpp"
#include "fluidq/model_io.hpp"

#include <doctest.h>

using namespace fluidq;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("validate_model puts up-phases first and keeps relative order") {
    Matrix t(3, 3);
    t << -2, 1, 1, 1, -1, 0, 2, 2, -4;
    Vector c(3);
    c << -1, 2, 3;
    const FluidModel m = validate_model(t, c, {"x", "y", "z"});
    CHECK(m.n_plus() == 2);
    CHECK(m.n_minus() == 1);
    CHECK(m.labels() == std::vector<std::string>{"y", "z", "x"});
    CHECK(m.permutation() == std::vector<std::size_t>{1, 2, 0});
    CHECK(m.generator()(0, 2) == 1.0);  // y -> x
    CHECK(m.generator()(2, 0) == 1.0);  // x -> y
    CHECK(m.up_rates()(1) == 3.0);
    CHECK(m.down_speeds()(0) == 1.0);
}

TEST_CASE("validation errors") {
    Vector c(2);
    c << 1, -1;
    Matrix bad_row(2, 2);
    bad_row << -1, 2, 2, -2;
    CHECK(code_of([&] { static_cast<void>(validate_model(bad_row, c)); }) == ErrorCode::NonGenerator);

    Matrix neg(2, 2);
    neg << 1, -1, 2, -2;
    CHECK(code_of([&] { static_cast<void>(validate_model(neg, c)); }) == ErrorCode::NonGenerator);

    Matrix t(2, 2);
    t << -1, 1, 2, -2;
    Vector zero(2);
    zero << 1, 0;
    CHECK(code_of([&] { static_cast<void>(validate_model(t, zero)); }) == ErrorCode::ZeroRate);

    Vector same_side(2);
    same_side << 1, 2;
    CHECK(code_of([&] { static_cast<void>(validate_model(t, same_side)); }) == ErrorCode::EmptySide);

    Vector short_rates(1);
    short_rates << 1;
    CHECK(code_of([&] { static_cast<void>(validate_model(t, short_rates)); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("unit-rate rescaling divides rows by |c_i|") {
    const FluidModel m = testing::m2();
    const FluidModel u = rescale_to_unit_rates(m);
    CHECK(u.has_unit_rates());
    CHECK_FALSE(m.has_unit_rates());
    CHECK(u.generator()(0, 0) == doctest::Approx(-1.5));
    CHECK(u.generator()(3, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(u.labels() == m.labels());
}

TEST_CASE("stationary distribution and drift") {
    const FluidModel m1 = testing::m1();
    const RowVector pi = stationary_distribution(m1);
    CHECK(pi(0) == doctest::Approx(2.0 / 3.0));
    CHECK(mean_drift(m1) == doctest::Approx(1.0 / 3.0));
    CHECK(mean_drift(testing::m2()) == doctest::Approx(-0.35));
    CHECK(std::abs(mean_drift(testing::null_model())) < 1e-15);

    Matrix t(2, 2);
    t << 0, 0, 1, -1;
    Vector c(2);
    c << 1, -1;
    const FluidModel red = validate_model(t, c);
    CHECK(code_of([&] { static_cast<void>(stationary_distribution(red)); }) == ErrorCode::Reducible);
}

TEST_CASE("reversing rates swaps the sides") {
    const FluidModel r = reverse_rates(testing::m1());
    CHECK(r.labels() == std::vector<std::string>{"down", "up"});
    CHECK(r.generator()(0, 0) == -2.0);
    CHECK(mean_drift(r) == doctest::Approx(-1.0 / 3.0));
}

TEST_CASE("model JSON round trip") {
    const FluidModel m = testing::m2();
    const FluidModel back = parse_model_json(model_to_json(m));
    CHECK(back == m);

    const FluidModel no_labels = parse_model_json(R"({"rates": [-1, 1], "generator": [[-2, 2], [1, -1]]})");
    CHECK(no_labels.labels() == std::vector<std::string>{"1", "0"});
}

TEST_CASE("model JSON errors") {
    CHECK(code_of([] { static_cast<void>(parse_model_json("{")); }) == ErrorCode::Parse);
    CHECK(code_of([] { static_cast<void>(parse_model_json(R"({"rates": [1, -1]})")); }) == ErrorCode::Parse);
    CHECK(code_of([] {
              static_cast<void>(parse_model_json(R"({"rates": [1, -1], "generator": [[-1, 1], [1]]})"));
          }) == ErrorCode::Parse);
    CHECK(code_of([] {
              static_cast<void>(parse_model_json(R"({"rates": [1, -1], "generator": [[-1, 2], [1, -1]]})"));
          }) == ErrorCode::NonGenerator);
    CHECK(code_of([] { static_cast<void>(load_model_file("/nonexistent/model.json")); }) == ErrorCode::Io);
}

TEST_CASE("battery models are irreducible with both sides present") {
    for (const FluidModel& m : testing::battery(24)) {
        CHECK(m.is_irreducible());
        CHECK(m.n_plus() >= 1);
        CHECK(m.n_minus() >= 1);
        CHECK(m.size() <= 10);
        CHECK(std::abs(mean_drift(m)) >= 0.05);
    }
}
