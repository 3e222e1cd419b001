#include "fluidq/doubling.hpp"

#include "fluidq/error.hpp"
#include "fluidq/qbd.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace fluidq {

namespace {

constexpr double kBoxSlack = 1e-12;
constexpr double kLinearStepRatio = 0.1;
constexpr int kLinearRunLength = 5;

}  // namespace

std::string_view variant_name(Variant v) {
    switch (v) {
        case Variant::Sda: return "sda";
        case Variant::SdaSs: return "sda-ss";
        case Variant::Adda: return "adda";
        case Variant::Custom: return "custom";
    }
    return "custom";
}

std::optional<Variant> parse_variant(std::string_view raw) {
    std::string name(raw);
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (name == "sda") return Variant::Sda;
    if (name == "sda-ss" || name == "sda_ss") return Variant::SdaSs;
    if (name == "adda") return Variant::Adda;
    if (name == "custom") return Variant::Custom;
    return std::nullopt;
}

OptimalParameters optimal_parameters(const FluidModel& model) {
    const Vector diag = model.generator().diagonal();
    const Vector& c = model.rates();
    OptimalParameters opt{std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity()};
    for (Eigen::Index i = 0; i < model.size(); ++i) {
        if (diag(i) == 0.0) {
            throw Error(ErrorCode::DegenerateDiagonal,
                        "phase '" + model.labels()[static_cast<std::size_t>(i)] +
                            "' has a zero diagonal generator entry");
        }
        const double ratio = std::abs(c(i) / diag(i));
        double& slot = i < model.n_plus() ? opt.beta_opt : opt.alpha_opt;
        slot = std::min(slot, ratio);
    }
    return opt;
}

DoublingParams variant_parameters(Variant variant, const OptimalParameters& opt) {
    switch (variant) {
        case Variant::Sda: {
            const double m = std::min(opt.alpha_opt, opt.beta_opt);
            return {m, m, Variant::Sda};
        }
        case Variant::SdaSs: return {0.0, opt.beta_opt, Variant::SdaSs};
        case Variant::Adda: return {opt.alpha_opt, opt.beta_opt, Variant::Adda};
        case Variant::Custom: break;
    }
    throw Error(ErrorCode::InvalidArgument, "custom variant needs explicit alpha and beta");
}

void check_admissible(const FluidModel& model, double alpha, double beta) {
    const OptimalParameters opt = optimal_parameters(model);
    std::ostringstream os;
    if (!(alpha >= 0.0) || !(beta >= 0.0)) {
        os << "alpha and beta must be nonnegative (got " << alpha << ", " << beta << ")";
    } else if (alpha == 0.0 && beta == 0.0) {
        os << "alpha and beta must not both be zero";
    } else if (alpha > opt.alpha_opt * (1.0 + kBoxSlack)) {
        os << "alpha = " << alpha << " exceeds alpha_opt = " << opt.alpha_opt;
    } else if (beta > opt.beta_opt * (1.0 + kBoxSlack)) {
        os << "beta = " << beta << " exceeds beta_opt = " << opt.beta_opt;
    } else {
        return;
    }
    throw Error(ErrorCode::BadParams, os.str());
}

Matrix DoublingState::assemble() const {
    Matrix m(e.rows() + h.rows(), e.cols() + g.cols());
    m << e, g, h, f;
    return m;
}

IterationNorms DoublingState::norms() const {
    return {k, norm_inf(e), norm_inf(f), norm_inf(g), norm_inf(h)};
}

DoublingState initial_blocks(const FluidModel& model, double alpha, double beta) {
    const PartitionedMatrix t = model.blocks();
    const Eigen::Index np = model.n_plus();
    const Eigen::Index nm = model.n_minus();
    const Matrix c_up = model.up_rates().asDiagonal();
    const Matrix c_down = model.down_speeds().asDiagonal();

    Matrix q(np + nm, np + nm);
    q << c_up - alpha * t.pp, -beta * t.pm,
         -alpha * t.mp, c_down - beta * t.mm;
    Matrix r(np + nm, np + nm);
    r << c_up + beta * t.pp, alpha * t.pm,
         beta * t.mp, c_down + alpha * t.mm;

    Matrix x;
    try {
        x = solve_linear(q, r);
    } catch (const Error& e) {
        throw Error(ErrorCode::SingularQ, std::string("initialization: Q is singular: ") + e.what());
    }
    DoublingState s;
    s.e = x.topLeftCorner(np, np);
    s.g = x.topRightCorner(np, nm);
    s.h = x.bottomLeftCorner(nm, np);
    s.f = x.bottomRightCorner(nm, nm);
    s.k = 0;
    s.history.push_back(s.norms());
    return s;
}

DoublingState initialize(const FluidModel& model, const DoublingParams& params) {
    check_admissible(model, params.alpha, params.beta);
    return initial_blocks(model, params.alpha, params.beta);
}

DoublingState step(const DoublingState& s) {
    const Eigen::Index np = s.e.rows();
    const Eigen::Index nm = s.f.rows();
    DoublingState next;
    try {
        const LinearSolver up(Matrix::Identity(np, np) - s.g * s.h);
        const LinearSolver down(Matrix::Identity(nm, nm) - s.h * s.g);
        Matrix rhs_up(np, np + nm);
        rhs_up << s.e, s.g * s.f;
        Matrix rhs_down(nm, nm + np);
        rhs_down << s.f, s.h * s.e;
        const Matrix y_up = up.solve(rhs_up);
        const Matrix y_down = down.solve(rhs_down);
        next.e = s.e * y_up.leftCols(np);
        next.g = s.g + s.e * y_up.rightCols(nm);
        next.f = s.f * y_down.leftCols(nm);
        next.h = s.h + s.f * y_down.rightCols(np);
    } catch (const Error& e) {
        std::ostringstream os;
        os << "doubling step " << s.k + 1 << ": " << e.what();
        throw Error(ErrorCode::SingularCascade, os.str());
    }
    next.k = s.k + 1;
    next.history = s.history;
    next.history.push_back(next.norms());
    return next;
}

SolveReport solve(const FluidModel& model, const SolveOptions& options) {
    if (!(options.epsilon > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
    }
    if (options.max_iter < 0) {
        throw Error(ErrorCode::InvalidArgument, "max_iter must be nonnegative");
    }
    if (options.alpha.has_value() != options.beta.has_value()) {
        throw Error(ErrorCode::InvalidArgument, "alpha and beta must be given together");
    }

    DoublingParams params;
    if (options.alpha) {
        params = {*options.alpha, *options.beta, Variant::Custom};
    } else {
        params = variant_parameters(options.variant, optimal_parameters(model));
    }

    const DoublingState start = initialize(model, params);
    DoublingState s = start;
    auto product = [](const DoublingState& st) { return norm_inf(st.e) * norm_inf(st.f); };

    int run = 0;
    int longest_run = 0;
    double prev = product(s);
    while (prev > options.epsilon && s.k < options.max_iter) {
        s = step(s);
        const double cur = product(s);
        run = (cur >= kLinearStepRatio * prev) ? run + 1 : 0;
        longest_run = std::max(longest_run, run);
        prev = cur;
    }

    SolveReport rep;
    rep.psi = s.g;
    rep.psi_hat = s.h;
    rep.iterations = s.k;
    rep.converged = prev <= options.epsilon;
    rep.params = params;
    rep.history = s.history;
    rep.convergence = longest_run >= kLinearRunLength ? ConvergenceKind::Linear
                                                      : ConvergenceKind::Quadratic;
    rep.null_recurrence_suspected = longest_run >= kLinearRunLength;
    rep.riccati_residual = riccati_residual(model, rep.psi);
    rep.dual_residual = dual_riccati_residual(model, rep.psi_hat);
    rep.dare_residual = dare_residual(start.e, start.f, start.g, start.h, rep.psi);

    if (model.is_irreducible()) {
        try {
            rep.classification = classify_recurrence(model, rep.psi, rep.psi_hat);
        } catch (const Error&) {
            rep.classification = Classification::Unknown;
        }
    }
    return rep;
}

}  // namespace fluidq
