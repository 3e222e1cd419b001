#include "fluidq/verify.hpp"

#include "fluidq/analysis.hpp"
#include "fluidq/doubling.hpp"
#include "fluidq/error.hpp"
#include "fluidq/oracles.hpp"
#include "fluidq/qbd.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <tuple>
#include <sstream>

namespace fluidq {

namespace {

constexpr double kStochTol = 1e-9;
constexpr double kQbdStochTol = 1e-10;
constexpr double kIdentityTol = 1e-9;
constexpr double kDareTol = 1e-10;
constexpr double kOracleTol = 1e-9;
constexpr double kSeriesTol = 1e-8;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

}  // namespace

bool VerifyReport::all_pass() const {
    return !checks.empty() &&
           std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

VerifyReport verify_model(const FluidModel& model, const VerifyOptions& options) {
    const FluidModel unit = rescale_to_unit_rates(model);
    VerifyReport rep;
    const double rate = 2.0 * unit.max_exit_rate();
    rep.lambda = options.lambda.value_or(rate);
    rep.mu = options.mu.value_or(rate);

    auto run = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
        CheckResult c;
        c.name = name;
        try {
            std::tie(c.pass, c.detail) = body();
        } catch (const Error& e) {
            c.pass = false;
            c.detail = std::string(error_code_name(e.code())) + ": " + e.what();
        }
        rep.checks.push_back(std::move(c));
    };

    SolveReport solved;
    run("doubling converges", [&] {
        solved = solve(model);
        return std::pair{solved.converged, std::to_string(solved.iterations) + " iterations, riccati residual " +
                                               fmt(solved.riccati_residual)};
    });
    if (solved.psi.size() == 0) {
        return rep;
    }
    const Matrix& psi = solved.psi;

    run("doubling stochasticity", [&] {
        double worst = 0.0;
        DoublingState s = initialize(model, solved.params);
        for (;;) {
            const Vector rows = s.assemble().rowwise().sum();
            worst = std::max(worst, (rows.array() - 1.0).abs().maxCoeff());
            if (s.k >= solved.iterations) break;
            s = step(s);
        }
        return std::pair{worst <= kStochTol, "max row-sum gap " + fmt(worst)};
    });

    // A, B and C carry (I - U/lambda)^{-1}, V_mu or W, whose rows lose mass
    // exactly when Psi does, so for transient models they are substochastic.
    // The other kinds are built from P_lambda, P_mu or [E G; H F] and must be
    // stochastic.
    run("qbd stochasticity", [&] {
        double worst = 0.0;
        int built = 0;
        for (QbdKind k : all_qbd_kinds()) {
            try {
                const Qbd q = build_qbd(unit, k, rep.lambda, rep.mu, psi);
                const bool lossy = k == QbdKind::A || k == QbdKind::B || k == QbdKind::C;
                worst = std::max(worst, lossy ? std::max(0.0, q.row_sum_excess()) : q.stochasticity_gap());
                ++built;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::RateTooSmall && e.code() != ErrorCode::BadParams) throw;
            }
        }
        return std::pair{built > 0 && worst <= kQbdStochTol,
                         std::to_string(built) + " kinds built, max row-sum gap " + fmt(worst)};
    });

    run("g-equivalence", [&] {
        const GEquivalenceReport g = g_equivalence_check(unit, psi, rep.lambda, rep.mu);
        int built = 0;
        for (const auto& k : g.kinds) built += k.built ? 1 : 0;
        return std::pair{g.holds(kIdentityTol),
                         std::to_string(built) + " kinds, worst gap " + fmt(g.worst_gap)};
    });

    run("perron identities", [&] {
        const DerivedMatrices d = derived_matrices(unit, psi, rep.lambda, rep.mu);
        const PerronIdentityReport p = perron_identities(d);
        const double gap = std::max(std::abs(p.rho_w - p.rho_w_formula), std::abs(p.rho_r1 - p.rho_r1_formula));
        return std::pair{p.holds(kIdentityTol) && p.r1_forms_gap <= 1e-10,
                         "rho(W) gap " + fmt(std::abs(p.rho_w - p.rho_w_formula)) + ", rho(R1) gap " +
                             fmt(std::abs(p.rho_r1 - p.rho_r1_formula)) + ", R1 forms gap " +
                             fmt(p.r1_forms_gap) + (gap > kIdentityTol ? " (too large)" : "")};
    });

    run("rho(R_C') = rho(R1)", [&] {
        const DerivedMatrices d = derived_matrices(unit, psi, rep.lambda, rep.mu);
        const Qbd c = build_qbd(unit, QbdKind::Cprime, rep.lambda, rep.mu, psi);
        const Matrix r = r_matrix(c, cyclic_reduction(c).g);
        const double gap = std::abs(max_abs_eigenvalue(r) - max_abs_eigenvalue(d.r1));
        return std::pair{gap <= kIdentityTol, "gap " + fmt(gap)};
    });

    run("dare residual", [&] {
        return std::pair{solved.dare_residual <= kDareTol, fmt(solved.dare_residual)};
    });

    run("recurrence classification", [&] {
        const RecurrenceEvidence ev = recurrence_evidence(model, psi, solved.psi_hat);
        return std::pair{true, std::string(classification_name(ev.classification)) + ", drift " +
                                   fmt(ev.drift)};
    });

    run("fixed-point oracle", [&] {
        const FixedPointResult fp = riccati_fixed_point(model);
        const double gap = norm_inf(fp.psi - psi);
        return std::pair{fp.converged && gap <= kOracleTol,
                         "gap " + fmt(gap) + " after " + std::to_string(fp.iterations) + " iterations" +
                             (fp.converged ? "" : " (not converged)")};
    });

    for (Representation r : {Representation::DoubleSum, Representation::Sum1, Representation::Sum2,
                             Representation::Sum3}) {
        run("series " + std::string(representation_name(r)), [&] {
            // The double sum costs a quadratic number of products in its truncation.
            const int terms = r == Representation::DoubleSum ? std::min(options.series_terms, 1024)
                                                             : options.series_terms;
            const SeriesEstimate s = series_psi(unit, psi, rep.lambda, rep.mu, r, terms);
            const double gap = norm_inf(s.value - psi);
            return std::pair{gap <= kSeriesTol, "gap " + fmt(gap) + " with " + std::to_string(s.terms_used) +
                                                    " terms"};
        });
    }
    return rep;
}

}  // namespace fluidq
