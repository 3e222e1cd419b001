#pragma once

#include "fluidq/model.hpp"

#include <string_view>
#include <vector>

namespace fluidq {

enum class Classification { PositiveRecurrent, NullRecurrent, Transient, Unknown };

[[nodiscard]] std::string_view classification_name(Classification c);

/// Matrices derived from Psi for a unit-rate model and a pair of
/// uniformization rates (lambda for the ascent, mu for the downward record).
struct DerivedMatrices {
    double lambda = 0.0;
    double mu = 0.0;
    Matrix u;         // T-- + T-+ Psi, generator of the downward record phase
    Matrix k;         // T++ + Psi T-+
    Matrix p_lambda;  // I + T / lambda
    Matrix p_mu;      // I + T / mu
    Matrix v_lambda;  // I + U / lambda
    Matrix v_mu;      // I + U / mu
    Matrix w;         // (I + U/mu)(I - U/lambda)^{-1}
    Matrix q_w;       // (I - T++/mu)^{-1} (I + T++/lambda), the ascent factor
    Matrix r1;        // (I - K/mu)^{-1} (I + K/lambda)
    Matrix r1_block;  // E (I - Psi H)^{-1} with E, H at alpha = 1/mu, beta = 1/lambda
};

/// Throws Error{NonUnitRates}, Error{BadPsi} (entry outside [-1e-10, 1+1e-10])
/// or Error{InvalidArgument} for non-positive rates.
[[nodiscard]] DerivedMatrices derived_matrices(const FluidModel& unit_model, const Matrix& psi,
                                               double lambda, double mu);

/// ||C+^{-1} T+- + Psi |C-|^{-1} T-- + C+^{-1} T++ Psi + Psi |C-|^{-1} T-+ Psi||_inf
[[nodiscard]] double riccati_residual(const FluidModel& model, const Matrix& psi);

/// Residual of the level-reversed equation for Psi-hat.
[[nodiscard]] double dual_riccati_residual(const FluidModel& model, const Matrix& psi_hat);

struct RecurrenceEvidence {
    double gamma = 0.0;      // Perron eigenvalue of U
    double delta = 0.0;      // Perron eigenvalue of K
    double gamma_hat = 0.0;  // Perron eigenvalue of the level-reversed U
    double drift = 0.0;
    Classification classification = Classification::Unknown;
};

/// Eigenvalue rule with tolerance 1e-9: gamma < 0 transient, else delta < 0
/// positive recurrent, else null recurrent. The mean drift must agree.
/// Throws Error{Reducible} or Error{Inconsistent}.
[[nodiscard]] RecurrenceEvidence recurrence_evidence(const FluidModel& model, const Matrix& psi,
                                                     const Matrix& psi_hat);

[[nodiscard]] Classification classify_recurrence(const FluidModel& model, const Matrix& psi,
                                                  const Matrix& psi_hat);

struct PerronIdentityReport {
    double gamma = 0.0;
    double delta = 0.0;
    double rho_w = 0.0;
    double rho_w_formula = 0.0;   // (1 + gamma/mu) / (1 - gamma/lambda)
    double rho_r1 = 0.0;
    double rho_r1_formula = 0.0;  // (1 + delta/lambda) / (1 - delta/mu)
    double r1_forms_gap = 0.0;    // ||r1 - r1_block||_inf

    [[nodiscard]] bool holds(double tol = 1e-9) const;
};

[[nodiscard]] PerronIdentityReport perron_identities(const DerivedMatrices& d);

struct MonotonicityTable {
    std::vector<double> lambdas;
    std::vector<double> mus;
    Matrix rho_w;   // rows follow lambdas, columns follow mus
    Matrix rho_r1;
    double worst_decrease = 0.0;  // largest drop along either axis
    bool monotone = true;
};

/// Tabulates rho(W) and rho(R1) on the grid and flags any decrease beyond
/// 1e-10 along either axis. Grid values are sorted ascending first.
[[nodiscard]] MonotonicityTable monotonicity_probe(const FluidModel& unit_model, const Matrix& psi,
                                                   std::vector<double> lambdas,
                                                   std::vector<double> mus);

}  // namespace fluidq
