#pragma once

#include "fluidq/analysis.hpp"
#include "fluidq/model.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace fluidq {

enum class Variant { Sda, SdaSs, Adda, Custom };

[[nodiscard]] std::string_view variant_name(Variant v);
[[nodiscard]] std::optional<Variant> parse_variant(std::string_view name);

/// Uniformization-type parameters of the doubling family. Units of
/// time per level; alpha weighs the down-phases, beta the up-phases.
struct DoublingParams {
    double alpha = 0.0;
    double beta = 0.0;
    Variant variant = Variant::Custom;
};

struct OptimalParameters {
    double alpha_opt = 0.0;  // min over down-phases of |c_i / T_ii|
    double beta_opt = 0.0;   // min over up-phases of |c_i / T_ii|
};

/// Throws Error{DegenerateDiagonal} if some T_ii is zero.
[[nodiscard]] OptimalParameters optimal_parameters(const FluidModel& model);

/// SDA: alpha = beta = min of the two optima. SDA-ss: (0, beta_opt).
/// ADDA: (alpha_opt, beta_opt).
[[nodiscard]] DoublingParams variant_parameters(Variant variant, const OptimalParameters& opt);

/// Throws Error{BadParams} unless 0 <= alpha <= alpha_opt,
/// 0 <= beta <= beta_opt and the pair is not (0, 0).
void check_admissible(const FluidModel& model, double alpha, double beta);

struct IterationNorms {
    int k = 0;
    double norm_e = 0.0;
    double norm_f = 0.0;
    double norm_g = 0.0;
    double norm_h = 0.0;
};

/// Iterate of the doubling recursion. [E G; H F] is row-stochastic.
struct DoublingState {
    Matrix e;  // n+ x n+
    Matrix f;  // n- x n-
    Matrix g;  // n+ x n-
    Matrix h;  // n- x n+
    int k = 0;
    std::vector<IterationNorms> history;

    [[nodiscard]] Matrix assemble() const;
    [[nodiscard]] IterationNorms norms() const;
};

/// Blocks of Q^{-1} R for arbitrary (alpha, beta) with no admissibility check.
/// Outside the admissible box the blocks may be negative; algebraic identities
/// still hold. Throws Error{SingularQ}.
[[nodiscard]] DoublingState initial_blocks(const FluidModel& model, double alpha, double beta);

/// Admissibility check followed by initial_blocks; the history holds k = 0.
[[nodiscard]] DoublingState initialize(const FluidModel& model, const DoublingParams& params);

/// One doubling step:
///   E' = E (I - GH)^{-1} E,       F' = F (I - HG)^{-1} F,
///   G' = G + E (I - GH)^{-1} G F, H' = H + F (I - HG)^{-1} H E.
/// Throws Error{SingularCascade} naming the iteration index.
[[nodiscard]] DoublingState step(const DoublingState& state);

struct SolveOptions {
    Variant variant = Variant::Adda;
    std::optional<double> alpha;  // both set => custom parameters
    std::optional<double> beta;
    double epsilon = 1e-16;
    int max_iter = 64;
};

enum class ConvergenceKind { Quadratic, Linear };

struct SolveReport {
    Matrix psi;      // n+ x n-
    Matrix psi_hat;  // n- x n+
    double riccati_residual = 0.0;
    double dual_residual = 0.0;
    double dare_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    Classification classification = Classification::Unknown;
    ConvergenceKind convergence = ConvergenceKind::Quadratic;
    /// Set when ||E_k|| ||F_k|| shrank by less than a factor 10 per step for
    /// five or more consecutive steps, the signature of null recurrence.
    bool null_recurrence_suspected = false;
    DoublingParams params;
    std::vector<IterationNorms> history;
};

/// Runs the doubling loop while ||E||_inf ||F||_inf > epsilon and k < max_iter,
/// then reports Psi = G and Psi-hat = H. Hitting max_iter does not throw; the
/// report comes back with converged == false.
[[nodiscard]] SolveReport solve(const FluidModel& model, const SolveOptions& options = {});

}  // namespace fluidq
