#include "fluidq/fluidq.h"

#include "fluidq/analysis.hpp"
#include "fluidq/doubling.hpp"
#include "fluidq/error.hpp"
#include "fluidq/model_io.hpp"
#include "fluidq/oracles.hpp"
#include "fluidq/qbd.hpp"
#include "fluidq/report_json.hpp"
#include "fluidq/verify.hpp"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

using namespace fluidq;

struct fq_model {
    FluidModel model;
};

struct fq_solution {
    FluidModel model;
    SolveReport report;
};

struct fq_qbd {
    FluidModel unit;
    Qbd qbd;
};

struct fq_series {
    FluidModel model;
    SeriesEstimate est;
    double lambda;
    double mu;
};

struct fq_mc {
    FluidModel model;
    McEstimate est;
    SimulationOptions options;
};

struct fq_verify {
    VerifyReport report;
};

namespace {

thread_local std::string g_last_error;

fq_status fail(fq_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

template <class F>
fq_status guarded(F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        return fail(static_cast<fq_status>(static_cast<int>(e.code())), e.what());
    } catch (const std::bad_alloc&) {
        return fail(FQ_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(FQ_ERR_INTERNAL, e.what());
    }
}

fq_status null_arg(const char* what) {
    return fail(FQ_ERR_INVALID_ARGUMENT, std::string(what) + " must not be NULL");
}

void copy_out(const Matrix& m, double* out) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) *out++ = m(i, j);
    }
}

char* dup_string(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

Variant to_variant(fq_variant v) {
    switch (v) {
        case FQ_VARIANT_SDA: return Variant::Sda;
        case FQ_VARIANT_SDA_SS: return Variant::SdaSs;
        case FQ_VARIANT_ADDA: return Variant::Adda;
        case FQ_VARIANT_CUSTOM: return Variant::Custom;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown variant");
}

fq_variant from_variant(Variant v) {
    switch (v) {
        case Variant::Sda: return FQ_VARIANT_SDA;
        case Variant::SdaSs: return FQ_VARIANT_SDA_SS;
        case Variant::Adda: return FQ_VARIANT_ADDA;
        case Variant::Custom: break;
    }
    return FQ_VARIANT_CUSTOM;
}

fq_classification from_classification(Classification c) {
    switch (c) {
        case Classification::PositiveRecurrent: return FQ_POSITIVE_RECURRENT;
        case Classification::NullRecurrent: return FQ_NULL_RECURRENT;
        case Classification::Transient: return FQ_TRANSIENT;
        case Classification::Unknown: break;
    }
    return FQ_UNKNOWN;
}

Matrix adda_psi(const FluidModel& model) {
    const SolveReport r = solve(model);
    if (!r.converged) {
        throw Error(ErrorCode::MaxIterExceeded, "ADDA did not converge; Psi is unavailable");
    }
    return r.psi;
}

}  // namespace

extern "C" {

const char* fq_last_error(void) { return g_last_error.c_str(); }

const char* fq_status_name(fq_status status) {
    if (status == FQ_OK) return "Ok";
    if (status == FQ_ERR_INTERNAL) return "Internal";
    static thread_local std::string name;
    name = std::string(error_code_name(static_cast<ErrorCode>(status)));
    return name.c_str();
}

void fq_string_free(char* s) { std::free(s); }

fq_status fq_model_load_json(const char* path, fq_model** out) {
    if (!path) return null_arg("path");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = new fq_model{load_model_file(path)};
        return FQ_OK;
    });
}

fq_status fq_model_parse_json(const char* text, fq_model** out) {
    if (!text) return null_arg("text");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = new fq_model{parse_model_json(text)};
        return FQ_OK;
    });
}

fq_status fq_model_from_arrays(size_t n, const double* generator, const double* rates,
                               const char* const* labels, fq_model** out) {
    if (!generator) return null_arg("generator");
    if (!rates) return null_arg("rates");
    if (!out) return null_arg("out");
    return guarded([&] {
        const auto nn = static_cast<Eigen::Index>(n);
        Matrix t(nn, nn);
        Vector c(nn);
        for (Eigen::Index i = 0; i < nn; ++i) {
            c(i) = rates[i];
            for (Eigen::Index j = 0; j < nn; ++j) t(i, j) = generator[i * nn + j];
        }
        std::vector<std::string> names;
        if (labels) {
            for (size_t i = 0; i < n; ++i) names.emplace_back(labels[i] ? labels[i] : "");
        }
        *out = new fq_model{validate_model(t, c, std::move(names))};
        return FQ_OK;
    });
}

void fq_model_free(fq_model* model) { delete model; }

fq_status fq_model_dims(const fq_model* model, size_t* n, size_t* n_plus, size_t* n_minus) {
    if (!model) return null_arg("model");
    if (n) *n = static_cast<size_t>(model->model.size());
    if (n_plus) *n_plus = static_cast<size_t>(model->model.n_plus());
    if (n_minus) *n_minus = static_cast<size_t>(model->model.n_minus());
    return FQ_OK;
}

const char* fq_model_label(const fq_model* model, size_t i) {
    if (!model || i >= model->model.labels().size()) return nullptr;
    return model->model.labels()[i].c_str();
}

fq_status fq_model_mean_drift(const fq_model* model, double* out) {
    if (!model) return null_arg("model");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = mean_drift(model->model);
        return FQ_OK;
    });
}

fq_status fq_model_default_rate(const fq_model* model, double* out) {
    if (!model) return null_arg("model");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = 2.0 * rescale_to_unit_rates(model->model).max_exit_rate();
        return FQ_OK;
    });
}

fq_status fq_model_to_json(const fq_model* model, char** out) {
    if (!model) return null_arg("model");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = dup_string(model_to_json(model->model));
        return FQ_OK;
    });
}

void fq_solve_options_default(fq_solve_options* options) {
    if (!options) return;
    const SolveOptions d;
    options->variant = FQ_VARIANT_ADDA;
    options->custom_params = 0;
    options->alpha = 0.0;
    options->beta = 0.0;
    options->epsilon = d.epsilon;
    options->max_iter = d.max_iter;
}

fq_status fq_solve(const fq_model* model, const fq_solve_options* options, fq_solution** out) {
    if (!model) return null_arg("model");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        SolveOptions o;
        if (options) {
            o.variant = to_variant(options->variant);
            o.epsilon = options->epsilon;
            o.max_iter = options->max_iter;
            if (options->custom_params || options->variant == FQ_VARIANT_CUSTOM) {
                o.alpha = options->alpha;
                o.beta = options->beta;
            }
        }
        *out = new fq_solution{model->model, solve(model->model, o)};
        if (!(*out)->report.converged) {
            return fail(FQ_ERR_MAX_ITER, "doubling stopped at max_iter = " + std::to_string(o.max_iter) +
                                             " before reaching epsilon");
        }
        return FQ_OK;
    });
}

void fq_solution_free(fq_solution* solution) { delete solution; }

fq_status fq_solution_info_get(const fq_solution* solution, fq_solution_info* out) {
    if (!solution) return null_arg("solution");
    if (!out) return null_arg("out");
    const SolveReport& r = solution->report;
    out->iterations = r.iterations;
    out->converged = r.converged ? 1 : 0;
    out->classification = from_classification(r.classification);
    out->null_recurrence_suspected = r.null_recurrence_suspected ? 1 : 0;
    out->riccati_residual = r.riccati_residual;
    out->dual_residual = r.dual_residual;
    out->dare_residual = r.dare_residual;
    out->alpha = r.params.alpha;
    out->beta = r.params.beta;
    out->variant = from_variant(r.params.variant);
    return FQ_OK;
}

fq_status fq_solution_psi(const fq_solution* solution, double* out) {
    if (!solution) return null_arg("solution");
    if (!out) return null_arg("out");
    copy_out(solution->report.psi, out);
    return FQ_OK;
}

fq_status fq_solution_psi_hat(const fq_solution* solution, double* out) {
    if (!solution) return null_arg("solution");
    if (!out) return null_arg("out");
    copy_out(solution->report.psi_hat, out);
    return FQ_OK;
}

fq_status fq_solution_to_json(const fq_solution* solution, char** out) {
    if (!solution) return null_arg("solution");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = dup_string(solve_report_json(solution->model, solution->report));
        return FQ_OK;
    });
}

fq_status fq_qbd_kind_parse(const char* name, fq_qbd_kind* out) {
    if (!name) return null_arg("name");
    if (!out) return null_arg("out");
    const auto k = parse_qbd_kind(name);
    if (!k) return fail(FQ_ERR_INVALID_ARGUMENT, std::string("unknown QBD kind '") + name + "'");
    *out = static_cast<fq_qbd_kind>(static_cast<int>(*k));
    return FQ_OK;
}

fq_status fq_qbd_build(const fq_model* model, fq_qbd_kind kind, double lambda, double mu,
                       int allow_signed, fq_qbd** out) {
    if (!model) return null_arg("model");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        if (static_cast<int>(kind) < 0 || static_cast<int>(kind) > FQ_QBD_MID_LEVEL_D) {
            throw Error(ErrorCode::InvalidArgument, "unknown QBD kind");
        }
        const FluidModel unit = rescale_to_unit_rates(model->model);
        const auto k = static_cast<QbdKind>(static_cast<int>(kind));
        std::optional<Matrix> psi;
        if (qbd_needs_psi(k)) {
            psi = adda_psi(model->model);
        }
        Qbd q = build_qbd(unit, k, lambda, mu, psi, allow_signed != 0);
        *out = new fq_qbd{unit, std::move(q)};
        return FQ_OK;
    });
}

void fq_qbd_free(fq_qbd* qbd) { delete qbd; }

fq_status fq_qbd_blocks(const fq_qbd* qbd, double* down, double* same, double* up) {
    if (!qbd) return null_arg("qbd");
    if (down) copy_out(qbd->qbd.down, down);
    if (same) copy_out(qbd->qbd.same, same);
    if (up) copy_out(qbd->qbd.up, up);
    return FQ_OK;
}

fq_status fq_qbd_g_cyclic_reduction(const fq_qbd* qbd, double* g, int* iterations) {
    if (!qbd) return null_arg("qbd");
    if (!g) return null_arg("g");
    return guarded([&] {
        const GSolution s = cyclic_reduction(qbd->qbd);
        copy_out(s.g, g);
        if (iterations) *iterations = s.iterations;
        return FQ_OK;
    });
}

fq_status fq_qbd_g_fixed_point(const fq_qbd* qbd, double* g, int* iterations) {
    if (!qbd) return null_arg("qbd");
    if (!g) return null_arg("g");
    return guarded([&] {
        const GSolution s = g_matrix_fixed_point(qbd->qbd);
        copy_out(s.g, g);
        if (iterations) *iterations = s.iterations;
        return FQ_OK;
    });
}

fq_status fq_qbd_to_json(const fq_qbd* qbd, int include_solutions, char** out) {
    if (!qbd) return null_arg("qbd");
    if (!out) return null_arg("out");
    return guarded([&] {
        if (!include_solutions) {
            *out = dup_string(qbd_json(qbd->unit, qbd->qbd, nullptr, nullptr));
            return FQ_OK;
        }
        const GSolution cr = cyclic_reduction(qbd->qbd);
        if (qbd->qbd.signed_blocks) {
            *out = dup_string(qbd_json(qbd->unit, qbd->qbd, &cr, nullptr));
        } else {
            const GSolution fp = g_matrix_fixed_point(qbd->qbd);
            *out = dup_string(qbd_json(qbd->unit, qbd->qbd, &cr, &fp));
        }
        return FQ_OK;
    });
}

fq_status fq_representation_parse(const char* name, fq_representation* out) {
    if (!name) return null_arg("name");
    if (!out) return null_arg("out");
    const auto r = parse_representation(name);
    if (!r) return fail(FQ_ERR_INVALID_ARGUMENT, std::string("unknown representation '") + name + "'");
    *out = static_cast<fq_representation>(static_cast<int>(*r));
    return FQ_OK;
}

double fq_gamma_weight(int k, int n, double lambda, double mu) {
    try {
        return gamma_weight(k, n, lambda, mu);
    } catch (const Error& e) {
        g_last_error = e.what();
        return -1.0;
    }
}

fq_status fq_riccati_fixed_point(const fq_model* model, double tol, int max_iter, double* out,
                                 int* iterations) {
    if (!model) return null_arg("model");
    if (!out) return null_arg("out");
    return guarded([&] {
        const FixedPointResult r = riccati_fixed_point(model->model, tol, max_iter);
        copy_out(r.psi, out);
        if (iterations) *iterations = r.iterations;
        if (!r.converged) {
            return fail(FQ_ERR_MAX_ITER, "fixed point stopped at max_iter with residual " +
                                             std::to_string(r.residual));
        }
        return FQ_OK;
    });
}

fq_status fq_series_compute(const fq_model* model, fq_representation rep, double lambda, double mu,
                            int terms, fq_series** out) {
    if (!model) return null_arg("model");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        if (static_cast<int>(rep) < 0 || static_cast<int>(rep) > FQ_REP_SUM3) {
            throw Error(ErrorCode::InvalidArgument, "unknown representation");
        }
        const FluidModel unit = rescale_to_unit_rates(model->model);
        const Matrix psi = adda_psi(model->model);
        SeriesEstimate est =
            series_psi(unit, psi, lambda, mu, static_cast<Representation>(static_cast<int>(rep)), terms);
        *out = new fq_series{unit, std::move(est), lambda, mu};
        return FQ_OK;
    });
}

void fq_series_free(fq_series* series) { delete series; }

fq_status fq_series_value(const fq_series* series, double* out, int* terms_used,
                          double* last_increment_norm) {
    if (!series) return null_arg("series");
    if (out) copy_out(series->est.value, out);
    if (terms_used) *terms_used = series->est.terms_used;
    if (last_increment_norm) *last_increment_norm = series->est.last_increment_norm;
    return FQ_OK;
}

fq_status fq_series_to_json(const fq_series* series, char** out) {
    if (!series) return null_arg("series");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = dup_string(series_json(series->model, series->est, series->lambda, series->mu));
        return FQ_OK;
    });
}

void fq_sim_options_default(fq_sim_options* options) {
    if (!options) return;
    const SimulationOptions d;
    options->trials = d.trials;
    options->seed = d.seed;
    options->level_cap = d.level_cap;
    options->time_cap = d.time_cap;
    options->replicas = d.replicas;
    options->threads = d.threads;
}

fq_status fq_simulate(const fq_model* model, const fq_sim_options* options, fq_mc** out) {
    if (!model) return null_arg("model");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        SimulationOptions o;
        if (options) {
            o.trials = options->trials;
            o.seed = options->seed;
            o.level_cap = options->level_cap;
            o.time_cap = options->time_cap;
            o.replicas = options->replicas;
            o.threads = options->threads;
        }
        McEstimate est = simulate_return_matrix(model->model, o);
        *out = new fq_mc{model->model, std::move(est), o};
        return FQ_OK;
    });
}

void fq_mc_free(fq_mc* mc) { delete mc; }

fq_status fq_mc_estimate(const fq_mc* mc, double* mean, double* halfwidth, long long* capped_paths) {
    if (!mc) return null_arg("mc");
    if (mean) copy_out(mc->est.mean, mean);
    if (halfwidth) copy_out(mc->est.halfwidth, halfwidth);
    if (capped_paths) *capped_paths = mc->est.capped_paths;
    return FQ_OK;
}

fq_status fq_mc_to_json(const fq_mc* mc, char** out) {
    if (!mc) return null_arg("mc");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = dup_string(mc_json(mc->model, mc->est, mc->options));
        return FQ_OK;
    });
}

fq_status fq_verify_run(const fq_model* model, const double* lambda, const double* mu, fq_verify** out) {
    if (!model) return null_arg("model");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        VerifyOptions o;
        if (lambda) o.lambda = *lambda;
        if (mu) o.mu = *mu;
        *out = new fq_verify{verify_model(model->model, o)};
        return FQ_OK;
    });
}

void fq_verify_free(fq_verify* report) { delete report; }

size_t fq_verify_count(const fq_verify* report) { return report ? report->report.checks.size() : 0; }

fq_status fq_verify_check(const fq_verify* report, size_t i, const char** name, int* pass,
                          const char** detail) {
    if (!report) return null_arg("report");
    if (i >= report->report.checks.size()) return fail(FQ_ERR_INVALID_ARGUMENT, "check index out of range");
    const CheckResult& c = report->report.checks[i];
    if (name) *name = c.name.c_str();
    if (pass) *pass = c.pass ? 1 : 0;
    if (detail) *detail = c.detail.c_str();
    return FQ_OK;
}

int fq_verify_all_pass(const fq_verify* report) { return report && report->report.all_pass() ? 1 : 0; }

fq_status fq_verify_to_json(const fq_verify* report, char** out) {
    if (!report) return null_arg("report");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = dup_string(verify_json(report->report));
        return FQ_OK;
    });
}

}  // extern "C"
