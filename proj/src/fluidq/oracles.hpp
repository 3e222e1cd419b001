#pragma once

#include "fluidq/model.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace fluidq {

struct FixedPointResult {
    Matrix psi;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;  // false => max_iter hit, psi is the last iterate
};

/// Monotone Riccati iteration from X = 0:
///   A X_{k+1} + X_{k+1} D = B + X_k Gamma X_k,
/// A = -C+^{-1} T++, D = -|C-|^{-1} T--, B = C+^{-1} T+-, Gamma = |C-|^{-1} T-+.
/// Stops once riccati_residual <= tol. Never throws on max_iter; check
/// converged instead.
[[nodiscard]] FixedPointResult riccati_fixed_point(const FluidModel& model, double tol = 1e-13,
                                                   int max_iter = 200'000);

/// (k+n)! / (k! n!) * lambda^{k+1} mu^n / (lambda+mu)^{k+n+1}, in log space.
[[nodiscard]] double gamma_weight(int k, int n, double lambda, double mu);

enum class Representation { DoubleSum, Sum1, Sum2, Sum3 };

[[nodiscard]] std::string_view representation_name(Representation r);
/// Accepts "doublesum", "1".."3" and "sum1".."sum3".
[[nodiscard]] std::optional<Representation> parse_representation(std::string_view name);

struct SeriesEstimate {
    Matrix value;
    int terms_used = 0;
    double last_increment_norm = 0.0;
    Representation representation = Representation::Sum1;
};

/// Partial sum through index K of one of the series for Psi. The double sum is
/// truncated on the diagonals k + n <= K. Summation stops early once an
/// increment falls below 1e-14.
///
/// The series are consistency checks: U is built from psi_ref. Throws
/// Error{RateTooSmall} when a factor that should be stochastic has an entry
/// below -1e-12, Error{NonUnitRates}, or Error{InvalidArgument}.
[[nodiscard]] SeriesEstimate series_psi(const FluidModel& unit_model, const Matrix& psi_ref,
                                        double lambda, double mu, Representation rep,
                                        int truncation = 64);

struct McEstimate {
    Matrix mean;       // n+ x n-
    Matrix halfwidth;  // 95% normal-approximation half-width
    long long trials = 0;  // per starting phase
    std::uint64_t seed = 0;
    long long capped_paths = 0;
};

struct SimulationOptions {
    long long trials = 100'000;
    double level_cap = 1e4;
    double time_cap = 1e6;
    std::uint64_t seed = 1;
    int replicas = 8;  // fixed so results do not depend on the thread count
    int threads = 0;   // 0 => hardware concurrency
};

/// Simulates the fluid from level 0 in up-phase start_phase (canonical index)
/// until it first returns to 0. The result has a single row. Deterministic in
/// (seed, replicas, trials).
[[nodiscard]] McEstimate simulate_return_probability(const FluidModel& model,
                                                     Eigen::Index start_phase,
                                                     const SimulationOptions& options = {});

/// Every up-phase as a start, stacked into an n+ x n- estimate.
[[nodiscard]] McEstimate simulate_return_matrix(const FluidModel& model,
                                                const SimulationOptions& options = {});

}  // namespace fluidq
