#include "fluidq/fluidq.h"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitInput = 2;

bool is_input_error(fq_status s) {
    switch (s) {
        case FQ_ERR_INVALID_ARGUMENT:
        case FQ_ERR_NON_GENERATOR:
        case FQ_ERR_ZERO_RATE:
        case FQ_ERR_EMPTY_SIDE:
        case FQ_ERR_DEGENERATE_DIAGONAL:
        case FQ_ERR_BAD_PARAMS:
        case FQ_ERR_RATE_TOO_SMALL:
        case FQ_ERR_NEED_PSI:
        case FQ_ERR_IO:
        case FQ_ERR_PARSE:
            return true;
        default:
            return false;
    }
}

struct Failure {
    int code;
};

void check(fq_status s, const char* context) {
    if (s == FQ_OK) return;
    std::cerr << "fluidq: " << context << ": " << fq_last_error() << " [" << fq_status_name(s) << "]\n";
    throw Failure{is_input_error(s) ? kExitInput : kExitFailed};
}

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using ModelPtr = std::unique_ptr<fq_model, Deleter<fq_model, fq_model_free>>;
using SolutionPtr = std::unique_ptr<fq_solution, Deleter<fq_solution, fq_solution_free>>;
using QbdPtr = std::unique_ptr<fq_qbd, Deleter<fq_qbd, fq_qbd_free>>;
using SeriesPtr = std::unique_ptr<fq_series, Deleter<fq_series, fq_series_free>>;
using McPtr = std::unique_ptr<fq_mc, Deleter<fq_mc, fq_mc_free>>;
using VerifyPtr = std::unique_ptr<fq_verify, Deleter<fq_verify, fq_verify_free>>;

struct Model {
    ModelPtr handle;
    size_t n = 0;
    size_t n_plus = 0;
    size_t n_minus = 0;

    [[nodiscard]] std::vector<std::string> labels(size_t from, size_t count) const {
        std::vector<std::string> out;
        for (size_t i = from; i < from + count; ++i) out.emplace_back(fq_model_label(handle.get(), i));
        return out;
    }
    [[nodiscard]] std::vector<std::string> up() const { return labels(0, n_plus); }
    [[nodiscard]] std::vector<std::string> down() const { return labels(n_plus, n_minus); }
    [[nodiscard]] std::vector<std::string> all() const { return labels(0, n); }
};

Model load(const std::string& path) {
    Model m;
    fq_model* raw = nullptr;
    check(fq_model_load_json(path.c_str(), &raw), "model file");
    m.handle.reset(raw);
    check(fq_model_dims(raw, &m.n, &m.n_plus, &m.n_minus), "model");
    return m;
}

void print_json(char* text) {
    std::fputs(text, stdout);
    std::fputc('\n', stdout);
    fq_string_free(text);
}

void print_matrix(const std::string& title, const std::vector<std::string>& rows,
                  const std::vector<std::string>& cols, const std::vector<double>& data) {
    std::size_t w = 10;
    for (const auto& c : cols) w = std::max(w, c.size() + 1);
    std::size_t lw = 1;
    for (const auto& r : rows) lw = std::max(lw, r.size());
    std::printf("%s\n", title.c_str());
    std::printf("  %*s", static_cast<int>(lw), "");
    for (const auto& c : cols) std::printf(" %*s", static_cast<int>(w), c.c_str());
    std::printf("\n");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::printf("  %*s", static_cast<int>(lw), rows[i].c_str());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            std::printf(" %*.6f", static_cast<int>(w), data[i * cols.size() + j]);
        }
        std::printf("\n");
    }
}

const char* classification_text(fq_classification c) {
    switch (c) {
        case FQ_POSITIVE_RECURRENT: return "positive recurrent";
        case FQ_NULL_RECURRENT: return "null recurrent";
        case FQ_TRANSIENT: return "transient";
        case FQ_UNKNOWN: break;
    }
    return "unknown";
}

const char* variant_text(fq_variant v) {
    switch (v) {
        case FQ_VARIANT_SDA: return "sda";
        case FQ_VARIANT_SDA_SS: return "sda-ss";
        case FQ_VARIANT_ADDA: return "adda";
        case FQ_VARIANT_CUSTOM: break;
    }
    return "custom";
}

struct SolveArgs {
    std::string file;
    std::string variant = "adda";
    std::optional<double> alpha;
    std::optional<double> beta;
    double eps = 1e-16;
    int max_iter = 64;
    bool json = false;
};

int run_solve(const SolveArgs& a) {
    const Model m = load(a.file);
    fq_solve_options o;
    fq_solve_options_default(&o);
    o.variant = a.variant == "sda" ? FQ_VARIANT_SDA : a.variant == "sda-ss" ? FQ_VARIANT_SDA_SS : FQ_VARIANT_ADDA;
    if (a.alpha) {
        o.custom_params = 1;
        o.alpha = *a.alpha;
        o.beta = *a.beta;
    }
    o.epsilon = a.eps;
    o.max_iter = a.max_iter;

    fq_solution* raw = nullptr;
    const fq_status s = fq_solve(m.handle.get(), &o, &raw);
    SolutionPtr sol(raw);
    if (s != FQ_OK && s != FQ_ERR_MAX_ITER) check(s, "solve");

    if (a.json) {
        char* text = nullptr;
        check(fq_solution_to_json(sol.get(), &text), "solve");
        print_json(text);
    } else {
        fq_solution_info info;
        check(fq_solution_info_get(sol.get(), &info), "solve");
        std::vector<double> psi(m.n_plus * m.n_minus);
        std::vector<double> psi_hat(m.n_plus * m.n_minus);
        check(fq_solution_psi(sol.get(), psi.data()), "solve");
        check(fq_solution_psi_hat(sol.get(), psi_hat.data()), "solve");
        std::printf("variant %s  alpha = %.6f  beta = %.6f\n", variant_text(info.variant), info.alpha, info.beta);
        std::printf("iterations %d (%s)\n", info.iterations, info.converged ? "converged" : "NOT converged");
        std::printf("classification %s%s\n", classification_text(info.classification),
                    info.null_recurrence_suspected ? " (linear convergence observed)" : "");
        print_matrix("Psi", m.up(), m.down(), psi);
        print_matrix("Psi-hat", m.down(), m.up(), psi_hat);
        std::printf("residuals  riccati %.3e  dual %.3e  dare %.3e\n", info.riccati_residual,
                    info.dual_residual, info.dare_residual);
    }
    if (s == FQ_ERR_MAX_ITER) {
        std::cerr << "fluidq: solve: " << fq_last_error() << "\n";
        return kExitFailed;
    }
    return kExitOk;
}

struct RateArgs {
    std::optional<double> lambda;
    std::optional<double> mu;
};

std::pair<double, double> rates(const Model& m, const RateArgs& r) {
    double def = 0.0;
    check(fq_model_default_rate(m.handle.get(), &def), "model");
    return {r.lambda.value_or(def), r.mu.value_or(def)};
}

int run_verify(const std::string& file, const RateArgs& r, bool json) {
    const Model m = load(file);
    const auto [lambda, mu] = rates(m, r);
    fq_verify* raw = nullptr;
    check(fq_verify_run(m.handle.get(), &lambda, &mu, &raw), "verify");
    VerifyPtr rep(raw);
    if (json) {
        char* text = nullptr;
        check(fq_verify_to_json(rep.get(), &text), "verify");
        print_json(text);
    } else {
        std::printf("verify at lambda = %.6f, mu = %.6f\n", lambda, mu);
        for (size_t i = 0; i < fq_verify_count(rep.get()); ++i) {
            const char* name = nullptr;
            const char* detail = nullptr;
            int pass = 0;
            check(fq_verify_check(rep.get(), i, &name, &pass, &detail), "verify");
            std::printf("%s  %-28s %s\n", pass ? "PASS" : "FAIL", name, detail);
        }
    }
    return fq_verify_all_pass(rep.get()) ? kExitOk : kExitFailed;
}

int run_qbd(const std::string& file, const std::string& kind_name, const RateArgs& r, bool allow_signed,
            bool json) {
    const Model m = load(file);
    fq_qbd_kind kind;
    if (fq_qbd_kind_parse(kind_name.c_str(), &kind) != FQ_OK) {
        std::cerr << "fluidq: --kind: unknown QBD kind '" << kind_name << "'\n";
        return kExitInput;
    }
    const auto [lambda, mu] = rates(m, r);
    fq_qbd* raw = nullptr;
    check(fq_qbd_build(m.handle.get(), kind, lambda, mu, allow_signed ? 1 : 0, &raw), "qbd");
    QbdPtr q(raw);
    if (json) {
        char* text = nullptr;
        check(fq_qbd_to_json(q.get(), 1, &text), "qbd");
        print_json(text);
        return kExitOk;
    }
    const std::size_t nn = m.n * m.n;
    std::vector<double> down(nn), same(nn), up(nn), g(nn);
    check(fq_qbd_blocks(q.get(), down.data(), same.data(), up.data()), "qbd");
    const auto labels = m.all();
    std::printf("QBD %s at lambda = %.6f, mu = %.6f\n", kind_name.c_str(), lambda, mu);
    print_matrix("L- (down)", labels, labels, down);
    print_matrix("L0 (same)", labels, labels, same);
    print_matrix("L+ (up)", labels, labels, up);
    int iters = 0;
    check(fq_qbd_g_cyclic_reduction(q.get(), g.data(), &iters), "qbd");
    print_matrix("G by cyclic reduction (" + std::to_string(iters) + " steps)", labels, labels, g);
    const fq_status fs = fq_qbd_g_fixed_point(q.get(), g.data(), &iters);
    if (fs == FQ_OK) {
        print_matrix("G by fixed point (" + std::to_string(iters) + " iterations)", labels, labels, g);
    } else {
        std::printf("G by fixed point: %s\n", fq_last_error());
    }
    return kExitOk;
}

int run_series(const std::string& file, const std::string& rep_name, const RateArgs& r, int terms, bool json) {
    const Model m = load(file);
    fq_representation rep;
    if (fq_representation_parse(rep_name.c_str(), &rep) != FQ_OK) {
        std::cerr << "fluidq: --rep: unknown representation '" << rep_name << "'\n";
        return kExitInput;
    }
    const auto [lambda, mu] = rates(m, r);
    fq_series* raw = nullptr;
    check(fq_series_compute(m.handle.get(), rep, lambda, mu, terms, &raw), "series");
    SeriesPtr s(raw);
    if (json) {
        char* text = nullptr;
        check(fq_series_to_json(s.get(), &text), "series");
        print_json(text);
        return kExitOk;
    }
    std::vector<double> v(m.n_plus * m.n_minus);
    int used = 0;
    double last = 0.0;
    check(fq_series_value(s.get(), v.data(), &used, &last), "series");
    std::printf("series %s at lambda = %.6f, mu = %.6f: %d terms, last increment %.3e\n", rep_name.c_str(),
                lambda, mu, used, last);
    print_matrix("Psi estimate", m.up(), m.down(), v);
    return kExitOk;
}

struct SimArgs {
    std::string file;
    long long trials = 100000;
    std::uint64_t seed = 1;
    double level_cap = 1e4;
    double time_cap = 1e6;
    int threads = 0;
    bool json = false;
};

int run_simulate(const SimArgs& a) {
    const Model m = load(a.file);
    fq_sim_options o;
    fq_sim_options_default(&o);
    o.trials = a.trials;
    o.seed = a.seed;
    o.level_cap = a.level_cap;
    o.time_cap = a.time_cap;
    o.threads = a.threads;
    fq_mc* raw = nullptr;
    check(fq_simulate(m.handle.get(), &o, &raw), "simulate");
    McPtr mc(raw);
    if (a.json) {
        char* text = nullptr;
        check(fq_mc_to_json(mc.get(), &text), "simulate");
        print_json(text);
        return kExitOk;
    }
    std::vector<double> mean(m.n_plus * m.n_minus), hw(m.n_plus * m.n_minus);
    long long capped = 0;
    check(fq_mc_estimate(mc.get(), mean.data(), hw.data(), &capped), "simulate");
    std::printf("%lld trials per up-phase, seed %llu, %lld capped paths\n", a.trials,
                static_cast<unsigned long long>(a.seed), capped);
    print_matrix("Psi estimate", m.up(), m.down(), mean);
    print_matrix("95% half-width", m.up(), m.down(), hw);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Return probabilities of Markov-modulated fluid queues"};
    app.require_subcommand(1);

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "Solve for Psi by a doubling algorithm");
    solve->add_option("file", sa.file, "Model JSON file")->required();
    solve->add_option("--variant", sa.variant, "adda, sda or sda-ss")
        ->check(CLI::IsMember({"adda", "sda", "sda-ss"}));
    auto* alpha = solve->add_option("--alpha", sa.alpha, "Custom alpha (with --beta)");
    auto* beta = solve->add_option("--beta", sa.beta, "Custom beta (with --alpha)");
    alpha->needs(beta);
    beta->needs(alpha);
    solve->add_option("--eps", sa.eps, "Stop when ||E|| ||F|| <= eps")->check(CLI::PositiveNumber);
    solve->add_option("--max-iter", sa.max_iter, "Iteration cap")->check(CLI::NonNegativeNumber);
    solve->add_flag("--json", sa.json, "Print the JSON report");

    std::string vfile;
    RateArgs vr;
    bool vjson = false;
    auto* verify = app.add_subcommand("verify", "Run the invariant battery");
    verify->add_option("file", vfile, "Model JSON file")->required();
    verify->add_option("--lambda", vr.lambda, "Uniformization rate lambda")->check(CLI::PositiveNumber);
    verify->add_option("--mu", vr.mu, "Uniformization rate mu")->check(CLI::PositiveNumber);
    verify->add_flag("--json", vjson, "Print the JSON report");

    std::string qfile;
    std::string qkind;
    RateArgs qr;
    bool allow_signed = false;
    bool qjson = false;
    auto* qbd = app.add_subcommand("qbd", "Build a QBD and solve for its G-matrix");
    qbd->add_option("file", qfile, "Model JSON file")->required();
    qbd->add_option("--kind", qkind, "A, B, C, Aprime, Bprime, Cprime, Delta, Theta or MidLevelD")->required();
    qbd->add_option("--lambda", qr.lambda, "Rate lambda")->check(CLI::PositiveNumber);
    qbd->add_option("--mu", qr.mu, "Rate mu")->check(CLI::PositiveNumber);
    qbd->add_flag("--allow-signed", allow_signed, "Permit negative block entries (algebraic checks only)");
    qbd->add_flag("--json", qjson, "Print JSON");

    std::string sfile;
    std::string srep;
    RateArgs sr;
    int terms = 64;
    bool sjson = false;
    auto* series = app.add_subcommand("series", "Truncated series for Psi");
    series->add_option("file", sfile, "Model JSON file")->required();
    series->add_option("--rep", srep, "doublesum, 1, 2 or 3")->required();
    series->add_option("--lambda", sr.lambda, "Rate lambda")->check(CLI::PositiveNumber);
    series->add_option("--mu", sr.mu, "Rate mu")->check(CLI::PositiveNumber);
    series->add_option("--terms", terms, "Truncation index K")->check(CLI::NonNegativeNumber);
    series->add_flag("--json", sjson, "Print JSON");

    SimArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of Psi");
    simulate->add_option("file", sim.file, "Model JSON file")->required();
    simulate->add_option("--trials", sim.trials, "Paths per up-phase")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim.seed, "Random seed");
    simulate->add_option("--level-cap", sim.level_cap, "Level counted as no return")->check(CLI::PositiveNumber);
    simulate->add_option("--time-cap", sim.time_cap, "Time counted as no return")->check(CLI::PositiveNumber);
    simulate->add_option("--threads", sim.threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    simulate->add_flag("--json", sim.json, "Print JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*solve) return run_solve(sa);
        if (*verify) return run_verify(vfile, vr, vjson);
        if (*qbd) return run_qbd(qfile, qkind, qr, allow_signed, qjson);
        if (*series) return run_series(sfile, srep, sr, terms, sjson);
        if (*simulate) return run_simulate(sim);
    } catch (const Failure& f) {
        return f.code;
    }
    return kExitInput;
}
