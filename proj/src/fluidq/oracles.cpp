#include "fluidq/oracles.hpp"

#include "fluidq/analysis.hpp"
#include "fluidq/error.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace fluidq {

namespace {

constexpr double kSignSlack = 1e-12;
constexpr double kEarlyExit = 1e-14;

void require_stochastic_factor(const Matrix& m, const char* name, double lambda, double mu) {
    if (m.size() == 0 || m.minCoeff() >= -kSignSlack) {
        return;
    }
    const auto [i, j] = argmin_entry(m);
    std::ostringstream os;
    os << name << " has entry (" << i << ", " << j << ") = " << m(i, j) << " at lambda = " << lambda
       << ", mu = " << mu << "; raise the rate";
    throw Error(ErrorCode::RateTooSmall, os.str());
}

}  // namespace

FixedPointResult riccati_fixed_point(const FluidModel& model, double tol, int max_iter) {
    if (!(tol > 0.0) || max_iter < 1) {
        throw Error(ErrorCode::InvalidArgument, "riccati_fixed_point: need tol > 0, max_iter >= 1");
    }
    const PartitionedMatrix t = model.blocks();
    const Vector up_inv = model.up_rates().cwiseInverse();
    const Vector down_inv = model.down_speeds().cwiseInverse();
    const Matrix a = -(up_inv.asDiagonal() * t.pp);
    const Matrix d = -(down_inv.asDiagonal() * t.mm);
    const Matrix b = up_inv.asDiagonal() * t.pm;
    const Matrix gamma = down_inv.asDiagonal() * t.mp;
    const SylvesterSolver sylvester(a, d);

    FixedPointResult r;
    r.psi = Matrix::Zero(model.n_plus(), model.n_minus());
    for (int it = 1; it <= max_iter; ++it) {
        r.psi = sylvester.solve(b + r.psi * gamma * r.psi);
        r.iterations = it;
        r.residual = riccati_residual(model, r.psi);
        if (r.residual <= tol) {
            r.converged = true;
            break;
        }
    }
    return r;
}

double gamma_weight(int k, int n, double lambda, double mu) {
    if (k < 0 || n < 0 || !(lambda > 0.0) || !(mu > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "gamma_weight: need k, n >= 0 and lambda, mu > 0");
    }
    const double kk = k;
    const double nn = n;
    const double log_binom = std::lgamma(kk + nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn + 1.0);
    const double log_p = std::log(lambda) - std::log(lambda + mu);
    const double log_q = std::log(mu) - std::log(lambda + mu);
    return std::exp(log_binom + (kk + 1.0) * log_p + nn * log_q);
}

std::string_view representation_name(Representation r) {
    switch (r) {
        case Representation::DoubleSum: return "doublesum";
        case Representation::Sum1: return "sum1";
        case Representation::Sum2: return "sum2";
        case Representation::Sum3: return "sum3";
    }
    return "?";
}

std::optional<Representation> parse_representation(std::string_view name) {
    if (name == "doublesum" || name == "double" || name == "0") return Representation::DoubleSum;
    if (name == "1" || name == "sum1") return Representation::Sum1;
    if (name == "2" || name == "sum2") return Representation::Sum2;
    if (name == "3" || name == "sum3") return Representation::Sum3;
    return std::nullopt;
}

SeriesEstimate series_psi(const FluidModel& unit_model, const Matrix& psi_ref, double lambda,
                          double mu, Representation rep, int truncation) {
    if (truncation < 0) {
        throw Error(ErrorCode::InvalidArgument, "series truncation must be nonnegative");
    }
    const DerivedMatrices d = derived_matrices(unit_model, psi_ref, lambda, mu);
    const Eigen::Index np = unit_model.n_plus();
    const Eigen::Index nm = unit_model.n_minus();
    const PartitionedMatrix t = unit_model.blocks();
    const PartitionedMatrix pl = partition(d.p_lambda, np);
    const PartitionedMatrix pmu = partition(d.p_mu, np);
    const Matrix i_p = Matrix::Identity(np, np);
    const Matrix i_m = Matrix::Identity(nm, nm);

    SeriesEstimate est;
    est.representation = rep;
    est.value = Matrix::Zero(np, nm);

    auto accumulate = [&](const Matrix& inc) {
        est.value += inc;
        est.last_increment_norm = norm_inf(inc);
        ++est.terms_used;
        return est.last_increment_norm < kEarlyExit && est.terms_used > 1;
    };

    switch (rep) {
        case Representation::DoubleSum: {
            require_stochastic_factor(pl.pp, "P_lambda++", lambda, mu);
            require_stochastic_factor(d.v_mu, "V_mu", lambda, mu);
            // a[k] = P++^k P+-, advanced one power per diagonal.
            std::vector<Matrix> a;
            std::vector<Matrix> av;  // a[k] V^{d-k} for the current diagonal d
            for (int diag = 0; diag <= truncation; ++diag) {
                for (auto& m : av) m = m * d.v_mu;
                a.push_back(diag == 0 ? pl.pm : Matrix(pl.pp * a.back()));
                av.push_back(a.back());
                Matrix inc = Matrix::Zero(np, nm);
                for (int k = 0; k <= diag; ++k) {
                    inc += gamma_weight(k, diag - k, lambda, mu) * av[static_cast<std::size_t>(k)];
                }
                if (accumulate(inc)) break;
            }
            break;
        }
        case Representation::Sum1: {
            require_stochastic_factor(pl.pp, "P_lambda++", lambda, mu);
            // X (I - U/lambda) = B solved as the transposed system, factored once.
            const LinearSolver right(Matrix((i_m - d.u / lambda).transpose()));
            auto times_inverse = [&](const Matrix& b) -> Matrix {
                return right.solve(b.transpose()).transpose();
            };
            Matrix inc = times_inverse(pl.pm);
            for (int k = 0; k <= truncation; ++k) {
                if (accumulate(inc)) break;
                inc = times_inverse(pl.pp * inc);
            }
            break;
        }
        case Representation::Sum2: {
            require_stochastic_factor(d.v_mu, "V_mu", lambda, mu);
            const LinearSolver left(i_p - t.pp / mu);
            Matrix inc = left.solve(pmu.pm);
            for (int n = 0; n <= truncation; ++n) {
                if (accumulate(inc)) break;
                inc = left.solve(Matrix(inc * d.v_mu));
            }
            break;
        }
        case Representation::Sum3: {
            require_stochastic_factor(d.q_w, "Q_W", lambda, mu);
            require_stochastic_factor(d.w, "W", lambda, mu);
            const LinearSolver left(i_p - t.pp / mu);
            Matrix inc = left.solve(Matrix(pl.pm * d.w + pmu.pm));
            for (int m = 0; m <= truncation; ++m) {
                if (accumulate(inc)) break;
                inc = d.q_w * inc * d.w;
            }
            break;
        }
    }
    return est;
}

}  // namespace fluidq
