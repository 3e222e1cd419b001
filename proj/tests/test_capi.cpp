// Exercises the shared library through its C header only.
#include <fluidq/fluidq.h>

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

namespace {

std::string data_path(const char* name) {
    const char* dir = std::getenv("FLUIDQ_DATA");
    return std::string(dir ? dir : "tests/data") + "/" + name;
}

fq_model* load(const char* name) {
    fq_model* m = nullptr;
    REQUIRE(fq_model_load_json(data_path(name).c_str(), &m) == FQ_OK);
    return m;
}

}  // namespace

TEST_CASE("load, inspect and free a model") {
    fq_model* m = load("m2.json");
    size_t n = 0, np = 0, nm = 0;
    CHECK(fq_model_dims(m, &n, &np, &nm) == FQ_OK);
    CHECK(n == 4);
    CHECK(np == 2);
    CHECK(nm == 2);
    CHECK(std::string(fq_model_label(m, 3)) == "d");
    CHECK(fq_model_label(m, 4) == nullptr);
    double drift = 0.0;
    CHECK(fq_model_mean_drift(m, &drift) == FQ_OK);
    CHECK(drift == doctest::Approx(-0.35));
    double rate = 0.0;
    CHECK(fq_model_default_rate(m, &rate) == FQ_OK);
    CHECK(rate == 8.0);
    char* text = nullptr;
    CHECK(fq_model_to_json(m, &text) == FQ_OK);
    fq_model* again = nullptr;
    CHECK(fq_model_parse_json(text, &again) == FQ_OK);
    fq_string_free(text);
    fq_model_free(again);
    fq_model_free(m);
}

TEST_CASE("errors carry a status and a message") {
    fq_model* m = nullptr;
    CHECK(fq_model_load_json(data_path("broken.json").c_str(), &m) == FQ_ERR_NON_GENERATOR);
    CHECK(m == nullptr);
    CHECK(std::string(fq_last_error()).find("generator") != std::string::npos);
    CHECK(fq_model_load_json(data_path("missing.json").c_str(), &m) == FQ_ERR_IO);
    CHECK(fq_model_parse_json("{", &m) == FQ_ERR_PARSE);
    CHECK(fq_model_dims(nullptr, nullptr, nullptr, nullptr) == FQ_ERR_INVALID_ARGUMENT);
    CHECK(std::string(fq_status_name(FQ_ERR_RATE_TOO_SMALL)).size() > 0);

    const double t[] = {-1, 1, 1, -1};
    const double zero_rate[] = {1, 0};
    CHECK(fq_model_from_arrays(2, t, zero_rate, nullptr, &m) == FQ_ERR_ZERO_RATE);
}

TEST_CASE("solve M1 from arrays") {
    const double t[] = {-1, 1, 2, -2};
    const double c[] = {1, -1};
    const char* labels[] = {"up", "down"};
    fq_model* m = nullptr;
    REQUIRE(fq_model_from_arrays(2, t, c, labels, &m) == FQ_OK);

    fq_solve_options o;
    fq_solve_options_default(&o);
    CHECK(o.variant == FQ_VARIANT_ADDA);
    fq_solution* s = nullptr;
    REQUIRE(fq_solve(m, &o, &s) == FQ_OK);
    double psi = 0.0, psi_hat = 0.0;
    CHECK(fq_solution_psi(s, &psi) == FQ_OK);
    CHECK(fq_solution_psi_hat(s, &psi_hat) == FQ_OK);
    CHECK(psi == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(psi_hat == doctest::Approx(1.0).epsilon(1e-14));
    fq_solution_info info;
    CHECK(fq_solution_info_get(s, &info) == FQ_OK);
    CHECK(info.classification == FQ_TRANSIENT);
    CHECK(info.converged == 1);
    CHECK(info.alpha == 0.5);
    char* json = nullptr;
    CHECK(fq_solution_to_json(s, &json) == FQ_OK);
    CHECK(std::string(json).find("\"transient\"") != std::string::npos);
    fq_string_free(json);
    fq_solution_free(s);

    o.custom_params = 1;
    o.alpha = 3.0;
    o.beta = 0.5;
    CHECK(fq_solve(m, &o, &s) == FQ_ERR_BAD_PARAMS);

    REQUIRE(fq_solve(m, nullptr, &s) == FQ_OK);
    fq_solution_free(s);

    fq_solve_options_default(&o);
    o.max_iter = 1;
    CHECK(fq_solve(m, &o, &s) == FQ_ERR_MAX_ITER);
    REQUIRE(s != nullptr);
    fq_solution_free(s);
    fq_model_free(m);
}

TEST_CASE("QBD through the C API") {
    fq_model* m = load("m1.json");
    fq_qbd_kind kind;
    CHECK(fq_qbd_kind_parse("MidLevelD", &kind) == FQ_OK);
    CHECK(kind == FQ_QBD_MID_LEVEL_D);
    CHECK(fq_qbd_kind_parse("nonsense", &kind) == FQ_ERR_INVALID_ARGUMENT);

    fq_qbd* q = nullptr;
    REQUIRE(fq_qbd_build(m, FQ_QBD_CPRIME, 2.0, 2.0, 0, &q) == FQ_OK);
    double g[4];
    int iters = 0;
    CHECK(fq_qbd_g_cyclic_reduction(q, g, &iters) == FQ_OK);
    CHECK(g[1] == doctest::Approx(0.5));
    CHECK(g[3] == doctest::Approx(1.0 / 3.0));
    double g2[4];
    CHECK(fq_qbd_g_fixed_point(q, g2, &iters) == FQ_OK);
    CHECK(std::abs(g2[3] - g[3]) < 1e-10);
    char* json = nullptr;
    CHECK(fq_qbd_to_json(q, 1, &json) == FQ_OK);
    fq_string_free(json);
    fq_qbd_free(q);

    CHECK(fq_qbd_build(m, FQ_QBD_A, 1.0, 2.0, 0, &q) == FQ_ERR_RATE_TOO_SMALL);
    REQUIRE(fq_qbd_build(m, FQ_QBD_A, 1.0, 2.0, 1, &q) == FQ_OK);
    double down[4], same[4], up[4];
    CHECK(fq_qbd_blocks(q, down, same, up) == FQ_OK);
    fq_qbd_free(q);
    fq_model_free(m);
}

TEST_CASE("oracles through the C API") {
    CHECK(fq_gamma_weight(1, 2, 1.0, 1.0) == doctest::Approx(3.0 / 16.0));
    fq_model* m = load("m1.json");
    double psi = 0.0;
    int iters = 0;
    CHECK(fq_riccati_fixed_point(m, 1e-13, 100000, &psi, &iters) == FQ_OK);
    CHECK(psi == doctest::Approx(0.5).epsilon(1e-12));

    fq_representation rep;
    CHECK(fq_representation_parse("sum3", &rep) == FQ_OK);
    fq_series* s = nullptr;
    REQUIRE(fq_series_compute(m, rep, 2.0, 2.0, 64, &s) == FQ_OK);
    int used = 0;
    double last = 0.0;
    CHECK(fq_series_value(s, &psi, &used, &last) == FQ_OK);
    CHECK(psi == doctest::Approx(0.5).epsilon(1e-12));
    fq_series_free(s);
    CHECK(fq_series_compute(m, FQ_REP_SUM2, 2.0, 0.5, 64, &s) == FQ_ERR_RATE_TOO_SMALL);

    fq_sim_options so;
    fq_sim_options_default(&so);
    so.trials = 500;
    so.level_cap = 30;
    fq_mc* mc = nullptr;
    REQUIRE(fq_simulate(m, &so, &mc) == FQ_OK);
    double mean = 0.0, hw = 0.0;
    long long capped = 0;
    CHECK(fq_mc_estimate(mc, &mean, &hw, &capped) == FQ_OK);
    CHECK(std::abs(mean - 0.5) < 4 * hw);
    fq_mc_free(mc);
    fq_model_free(m);
}

TEST_CASE("verify through the C API") {
    fq_model* m = load("m2.json");
    fq_verify* v = nullptr;
    REQUIRE(fq_verify_run(m, nullptr, nullptr, &v) == FQ_OK);
    CHECK(fq_verify_all_pass(v) == 1);
    CHECK(fq_verify_count(v) >= 10);
    const char* name = nullptr;
    const char* detail = nullptr;
    int pass = 0;
    CHECK(fq_verify_check(v, 0, &name, &pass, &detail) == FQ_OK);
    CHECK(pass == 1);
    CHECK(fq_verify_check(v, 1000, &name, &pass, &detail) == FQ_ERR_INVALID_ARGUMENT);
    fq_verify_free(v);
    fq_model_free(m);
}
