#include "fluidq/analysis.hpp"

#include "fluidq/doubling.hpp"
#include "fluidq/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fluidq {

namespace {

constexpr double kZeroTol = 1e-9;
constexpr double kDriftZeroTol = 1e-10;
// Doubling resolves Psi only to about sqrt(machine epsilon) at null
// recurrence, so gamma and delta land near -1e-8 there instead of inside
// kZeroTol. When the drift is zero they are accepted as zero up to this.
constexpr double kNullSlack = 1e-6;
constexpr double kPsiSlack = 1e-10;
constexpr double kMonotoneSlack = 1e-10;

void require_unit_rates(const FluidModel& model) {
    if (!model.has_unit_rates()) {
        throw Error(ErrorCode::NonUnitRates, "model must have rates +-1; rescale it first");
    }
}

void require_psi_shape(const FluidModel& model, const Matrix& psi, bool hat) {
    const Eigen::Index r = hat ? model.n_minus() : model.n_plus();
    const Eigen::Index c = hat ? model.n_plus() : model.n_minus();
    if (psi.rows() != r || psi.cols() != c) {
        std::ostringstream os;
        os << (hat ? "psi_hat" : "psi") << " must be " << r << "x" << c << ", got " << psi.rows()
           << "x" << psi.cols();
        throw Error(ErrorCode::InvalidArgument, os.str());
    }
}

double perron_value(const Matrix& m) { return perron_left_pair(m).value; }

}  // namespace

std::string_view classification_name(Classification c) {
    switch (c) {
        case Classification::PositiveRecurrent: return "positive_recurrent";
        case Classification::NullRecurrent: return "null_recurrent";
        case Classification::Transient: return "transient";
        case Classification::Unknown: return "unknown";
    }
    return "unknown";
}

DerivedMatrices derived_matrices(const FluidModel& unit_model, const Matrix& psi, double lambda,
                                 double mu) {
    require_unit_rates(unit_model);
    require_psi_shape(unit_model, psi, false);
    if (!(lambda > 0.0) || !(mu > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "lambda and mu must be positive");
    }
    if (psi.minCoeff() < -kPsiSlack || psi.maxCoeff() > 1.0 + kPsiSlack) {
        throw Error(ErrorCode::BadPsi, "psi has entries outside [0, 1]");
    }

    const PartitionedMatrix t = unit_model.blocks();
    const Eigen::Index n = unit_model.size();
    const Eigen::Index np = unit_model.n_plus();
    const Eigen::Index nm = unit_model.n_minus();
    const Matrix i_n = Matrix::Identity(n, n);
    const Matrix i_p = Matrix::Identity(np, np);
    const Matrix i_m = Matrix::Identity(nm, nm);

    DerivedMatrices d;
    d.lambda = lambda;
    d.mu = mu;
    d.u = t.mm + t.mp * psi;
    d.k = t.pp + psi * t.mp;
    d.p_lambda = i_n + unit_model.generator() / lambda;
    d.p_mu = i_n + unit_model.generator() / mu;
    d.v_lambda = i_m + d.u / lambda;
    d.v_mu = i_m + d.u / mu;
    d.w = solve_linear_right(i_m - d.u / lambda, d.v_mu);
    d.q_w = solve_linear(i_p - t.pp / mu, i_p + t.pp / lambda);
    d.r1 = solve_linear(i_p - d.k / mu, i_p + d.k / lambda);

    const DoublingState blocks = initial_blocks(unit_model, 1.0 / mu, 1.0 / lambda);
    d.r1_block = solve_linear_right(i_p - psi * blocks.h, blocks.e);
    return d;
}

double riccati_residual(const FluidModel& model, const Matrix& psi) {
    require_psi_shape(model, psi, false);
    const PartitionedMatrix t = model.blocks();
    const Vector up_inv = model.up_rates().cwiseInverse();
    const Vector down_inv = model.down_speeds().cwiseInverse();
    const Matrix b = up_inv.asDiagonal() * t.pm;
    const Matrix a = up_inv.asDiagonal() * t.pp;
    const Matrix d = down_inv.asDiagonal() * t.mm;
    const Matrix c = down_inv.asDiagonal() * t.mp;
    return norm_inf(b + psi * d + a * psi + psi * c * psi);
}

double dual_riccati_residual(const FluidModel& model, const Matrix& psi_hat) {
    require_psi_shape(model, psi_hat, true);
    const PartitionedMatrix t = model.blocks();
    const Vector up_inv = model.up_rates().cwiseInverse();
    const Vector down_inv = model.down_speeds().cwiseInverse();
    return norm_inf(down_inv.asDiagonal() * t.mp + psi_hat * up_inv.asDiagonal() * t.pp +
                    down_inv.asDiagonal() * t.mm * psi_hat +
                    psi_hat * up_inv.asDiagonal() * t.pm * psi_hat);
}

RecurrenceEvidence recurrence_evidence(const FluidModel& model, const Matrix& psi,
                                       const Matrix& psi_hat) {
    require_psi_shape(model, psi, false);
    require_psi_shape(model, psi_hat, true);
    if (!model.is_irreducible()) {
        throw Error(ErrorCode::Reducible, "recurrence is only classified for irreducible T");
    }
    const FluidModel unit = rescale_to_unit_rates(model);
    const PartitionedMatrix t = unit.blocks();

    RecurrenceEvidence ev;
    ev.gamma = perron_value(t.mm + t.mp * psi);
    ev.delta = perron_value(t.pp + psi * t.mp);
    ev.gamma_hat = perron_value(t.pp + t.pm * psi_hat);
    ev.drift = mean_drift(model);

    const bool drift_null = std::abs(ev.drift) < kDriftZeroTol;
    const double zero_tol = drift_null ? kNullSlack : kZeroTol;
    auto is_zero = [&](double x) { return std::abs(x) <= zero_tol; };

    Classification from_drift = drift_null      ? Classification::NullRecurrent
                                : ev.drift > 0.0 ? Classification::Transient
                                                 : Classification::PositiveRecurrent;
    if (is_zero(ev.gamma) && is_zero(ev.delta)) {
        ev.classification = Classification::NullRecurrent;
    } else if (ev.gamma < -zero_tol) {
        ev.classification = Classification::Transient;
    } else if (ev.delta < -zero_tol) {
        ev.classification = Classification::PositiveRecurrent;
    }

    // The level-reversed queue swaps transient and positive recurrent, so its
    // U has a zero Perron value unless this queue is positive recurrent.
    const bool hat_ok = ev.classification == Classification::PositiveRecurrent
                            ? ev.gamma_hat < -zero_tol
                            : is_zero(ev.gamma_hat);
    if (ev.classification != from_drift || !hat_ok) {
        std::ostringstream os;
        os << "recurrence evidence disagrees: gamma = " << ev.gamma << ", delta = " << ev.delta
           << ", gamma_hat = " << ev.gamma_hat << ", drift = " << ev.drift;
        throw Error(ErrorCode::Inconsistent, os.str());
    }
    return ev;
}

Classification classify_recurrence(const FluidModel& model, const Matrix& psi,
                                   const Matrix& psi_hat) {
    return recurrence_evidence(model, psi, psi_hat).classification;
}

bool PerronIdentityReport::holds(double tol) const {
    return std::abs(rho_w - rho_w_formula) <= tol && std::abs(rho_r1 - rho_r1_formula) <= tol;
}

PerronIdentityReport perron_identities(const DerivedMatrices& d) {
    PerronIdentityReport rep;
    rep.gamma = perron_value(d.u);
    rep.delta = perron_value(d.k);
    rep.rho_w = spectral_radius(d.w);
    rep.rho_r1 = spectral_radius(d.r1);
    rep.rho_w_formula = (1.0 + rep.gamma / d.mu) / (1.0 - rep.gamma / d.lambda);
    rep.rho_r1_formula = (1.0 + rep.delta / d.lambda) / (1.0 - rep.delta / d.mu);
    rep.r1_forms_gap = norm_inf(d.r1 - d.r1_block);
    return rep;
}

MonotonicityTable monotonicity_probe(const FluidModel& unit_model, const Matrix& psi,
                                     std::vector<double> lambdas, std::vector<double> mus) {
    if (lambdas.empty() || mus.empty()) {
        throw Error(ErrorCode::InvalidArgument, "monotonicity grid must be nonempty");
    }
    std::sort(lambdas.begin(), lambdas.end());
    std::sort(mus.begin(), mus.end());

    MonotonicityTable tab;
    const auto nl = static_cast<Eigen::Index>(lambdas.size());
    const auto nmu = static_cast<Eigen::Index>(mus.size());
    tab.rho_w.resize(nl, nmu);
    tab.rho_r1.resize(nl, nmu);
    for (Eigen::Index i = 0; i < nl; ++i) {
        for (Eigen::Index j = 0; j < nmu; ++j) {
            const DerivedMatrices d = derived_matrices(unit_model, psi, lambdas[static_cast<std::size_t>(i)],
                                                       mus[static_cast<std::size_t>(j)]);
            tab.rho_w(i, j) = spectral_radius(d.w);
            tab.rho_r1(i, j) = spectral_radius(d.r1);
        }
    }
    auto scan = [&](const Matrix& m) {
        for (Eigen::Index i = 0; i < nl; ++i) {
            for (Eigen::Index j = 0; j < nmu; ++j) {
                if (i > 0) tab.worst_decrease = std::max(tab.worst_decrease, m(i - 1, j) - m(i, j));
                if (j > 0) tab.worst_decrease = std::max(tab.worst_decrease, m(i, j - 1) - m(i, j));
            }
        }
    };
    scan(tab.rho_w);
    scan(tab.rho_r1);
    tab.monotone = tab.worst_decrease <= kMonotoneSlack;
    tab.lambdas = std::move(lambdas);
    tab.mus = std::move(mus);
    return tab;
}

}  // namespace fluidq
