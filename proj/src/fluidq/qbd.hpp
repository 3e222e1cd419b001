#pragma once

#include "fluidq/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fluidq {

enum class QbdKind { A, B, C, Aprime, Bprime, Cprime, Delta, Theta, MidLevelD };

[[nodiscard]] std::string_view qbd_kind_name(QbdKind kind);
[[nodiscard]] std::optional<QbdKind> parse_qbd_kind(std::string_view name);
[[nodiscard]] const std::vector<QbdKind>& all_qbd_kinds();

/// A, B, C and MidLevelD embed matrices derived from Psi.
[[nodiscard]] bool qbd_needs_psi(QbdKind kind);

/// Discrete-time QBD on levels x phases. Each block is n x n with the up
/// phases first, matching the fluid model's canonical order.
struct Qbd {
    Matrix down;  // L-, one level lower
    Matrix same;  // L0
    Matrix up;    // L+, one level higher
    QbdKind kind = QbdKind::A;
    double lambda = 0.0;
    double mu = 0.0;
    bool signed_blocks = false;  // built with allow_signed and has a negative entry

    [[nodiscard]] Eigen::Index phases() const { return same.rows(); }
    /// Largest |(down + same + up) 1 - 1| over the rows.
    [[nodiscard]] double stochasticity_gap() const;
    /// Largest (down + same + up) 1 - 1 over the rows; at most zero when substochastic.
    [[nodiscard]] double row_sum_excess() const;
};

/// Builds one of the nine QBDs from a unit-rate model.
///
/// Kinds A, B, C and MidLevelD embed matrices derived from Psi and need it.
/// Kinds built from P_lambda = I + T/lambda need lambda >= max_i |T_ii|, those
/// built from P_mu need the same of mu, and MidLevelD needs 1/mu <= alpha_opt
/// and 1/lambda <= beta_opt. allow_signed skips all of these rate checks and
/// the entrywise sign check; the result is then only fit for algebraic use.
///
/// Throws Error{NeedPsi}, Error{RateTooSmall}, Error{BadParams} or
/// Error{NonUnitRates}.
[[nodiscard]] Qbd build_qbd(const FluidModel& unit_model, QbdKind kind, double lambda, double mu,
                            const std::optional<Matrix>& psi = std::nullopt,
                            bool allow_signed = false);

struct MidLevelBlocks {
    Matrix e;
    Matrix f;
    Matrix g;
    Matrix h;
};

/// The level-change chain of C': J-1 = (I - C'0)^{-1} C'-1 and
/// J1 = (I - C'0)^{-1} C'1, rearranged as E = J1(+,+), H = J1(-,+),
/// G = J-1(+,-), F = J-1(-,-). No rate checks.
[[nodiscard]] MidLevelBlocks embedded_level_blocks(const FluidModel& unit_model, double lambda,
                                                   double mu);

/// embedded_level_blocks after checking 1/mu <= alpha_opt and
/// 1/lambda <= beta_opt. Throws Error{BadParams} or Error{NonUnitRates}.
[[nodiscard]] MidLevelBlocks mid_level_blocks(const FluidModel& unit_model, double lambda,
                                              double mu);

/// Places E, F, G, H into the D-1, D0, D1 pattern.
[[nodiscard]] Qbd mid_level_qbd(const MidLevelBlocks& b, double lambda = 0.0, double mu = 0.0);

/// Reads E, F, G, H back out of a MidLevelD QBD and reports the largest entry
/// found outside the four block positions.
[[nodiscard]] MidLevelBlocks split_mid_level(const Qbd& d, Eigen::Index n_plus,
                                             double* off_pattern = nullptr);

struct GSolution {
    Matrix g;
    int iterations = 0;
    double residual = 0.0;  // ||L- + L0 G + L+ G^2 - G||_inf
    bool converged = false;
};

/// G <- L- + L0 G + L+ G^2 from G = 0, stopped once the update is at most tol.
/// Throws Error{MaxIterExceeded} when max_iter is reached first.
[[nodiscard]] GSolution g_matrix_fixed_point(const Qbd& qbd, double tol = 1e-13,
                                             int max_iter = 1'000'000);

/// (L-, L0, L+) -> (L- K L-, L0 + L- K L+ + L+ K L-, L+ K L+) with K = (I - L0)^{-1}.
/// Throws Error{SingularCascade}.
[[nodiscard]] Qbd cr_step(const Qbd& qbd);

/// Cyclic reduction with the accumulator A^ <- A^ + L+ K L-, started at L0, and
/// G = (I - A^)^{-1} L-. Stops when ||L-_k|| ||L+_k|| <= tol. on_step, when set,
/// sees every reduced QBD. Throws Error{SingularCascade} or
/// Error{MaxIterExceeded}.
[[nodiscard]] GSolution cyclic_reduction(const Qbd& qbd, double tol = 1e-15, int max_iter = 64,
                                         const std::function<void(const Qbd&)>& on_step = {});

/// R = L+ (I - L0 - L+ G)^{-1}. Throws Error{Singular}.
[[nodiscard]] Matrix r_matrix(const Qbd& qbd, const Matrix& g);

/// ||G + E Psi (I - H Psi)^{-1} F - Psi||_inf. Throws Error{Singular}.
[[nodiscard]] double dare_residual(const Matrix& e, const Matrix& f, const Matrix& g,
                                   const Matrix& h, const Matrix& psi);

struct KindCheck {
    QbdKind kind = QbdKind::A;
    bool built = false;
    std::string skipped_because;
    Matrix g_cr;
    Matrix g_fixed_point;  // empty when the fixed point was not run
    double solver_gap = 0.0;     // ||g_cr - g_fixed_point||_inf
    double closed_form_gap = 0.0;
    double psi_gap = 0.0;        // top-right block against the input psi
};

struct GEquivalenceReport {
    std::vector<KindCheck> kinds;
    Matrix g_a;  // [[0, Psi], [0, (I - U/lambda)^{-1}]]
    Matrix g_b;  // [[0, Psi], [0, V_mu]]
    Matrix g_c;  // [[0, Psi], [0, W]]
    Matrix g_d;  // [[0, Psi W], [0, W]]
    double worst_gap = 0.0;

    [[nodiscard]] bool holds(double tol = 1e-9) const;
};

struct GEquivalenceOptions {
    bool fixed_point = true;  // also run the slow fixed point as a second solver
    bool allow_signed = false;
};

/// Builds every kind that the rates allow, solves for G and compares against
/// the closed forms built from psi. Kinds that cannot be built are recorded
/// as skipped.
[[nodiscard]] GEquivalenceReport g_equivalence_check(const FluidModel& unit_model,
                                                     const Matrix& psi, double lambda, double mu,
                                                     const GEquivalenceOptions& options = {});

}  // namespace fluidq
