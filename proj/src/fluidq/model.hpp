#pragma once

#include "fluidq/numerics.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace fluidq {

/// The four sign blocks of an n x n matrix, up-phases first.
struct PartitionedMatrix {
    Matrix pp;  // n+ x n+
    Matrix pm;  // n+ x n-
    Matrix mp;  // n- x n+
    Matrix mm;  // n- x n-

    [[nodiscard]] Matrix assemble() const;
};

[[nodiscard]] PartitionedMatrix partition(const Matrix& m, Eigen::Index n_plus);

/// A Markov-modulated fluid queue: phase generator T and fluid rates c.
///
/// Instances are only produced by validate_model (or the rescaling below) and
/// are immutable afterwards. Phases are stored canonically with every up-phase
/// (c_i > 0) ahead of every down-phase (c_i < 0); within each side the
/// caller's relative order is kept, so a matrix indexed by up x down phases
/// reads the same in either ordering.
class FluidModel {
public:
    [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }
    [[nodiscard]] const Matrix& generator() const { return generator_; }
    [[nodiscard]] const Vector& rates() const { return rates_; }
    [[nodiscard]] Eigen::Index size() const { return generator_.rows(); }
    [[nodiscard]] Eigen::Index n_plus() const { return n_plus_; }
    [[nodiscard]] Eigen::Index n_minus() const { return size() - n_plus_; }

    /// permutation()[k] is the caller's index of canonical phase k.
    [[nodiscard]] const std::vector<std::size_t>& permutation() const { return permutation_; }

    [[nodiscard]] PartitionedMatrix blocks() const { return partition(generator_, n_plus_); }
    [[nodiscard]] Vector up_rates() const { return rates_.head(n_plus_); }
    /// |c_i| over the down-phases.
    [[nodiscard]] Vector down_speeds() const { return rates_.tail(n_minus()).cwiseAbs(); }

    [[nodiscard]] std::vector<std::string> up_labels() const;
    [[nodiscard]] std::vector<std::string> down_labels() const;

    [[nodiscard]] bool has_unit_rates() const;
    [[nodiscard]] bool is_irreducible() const { return fluidq::is_irreducible(generator_); }
    [[nodiscard]] double max_exit_rate() const;

    friend bool operator==(const FluidModel& a, const FluidModel& b);

private:
    friend FluidModel validate_model(const Matrix&, const Vector&, std::vector<std::string>);
    friend FluidModel rescale_to_unit_rates(const FluidModel&);

    FluidModel() = default;

    std::vector<std::string> labels_;
    Matrix generator_;
    Vector rates_;
    Eigen::Index n_plus_ = 0;
    std::vector<std::size_t> permutation_;
};

/// Checks and canonicalizes a raw (T, c) pair. Empty labels default to
/// "0", "1", ... in input order.
///
/// Throws Error{NonGenerator} for a negative off-diagonal or a row sum beyond
/// 1e-12 * max(1, ||T||_inf), Error{ZeroRate} for c_i == 0 and
/// Error{EmptySide} when there is no up-phase or no down-phase.
[[nodiscard]] FluidModel validate_model(const Matrix& generator, const Vector& rates,
                                        std::vector<std::string> labels = {});

/// T' = |C|^{-1} T, c' = sign(c). Leaves Psi unchanged.
[[nodiscard]] FluidModel rescale_to_unit_rates(const FluidModel& model);

/// Same phase process with every rate negated (the level-reversed queue).
[[nodiscard]] FluidModel reverse_rates(const FluidModel& model);

/// Stationary row vector pi of T (pi T = 0, pi 1 = 1). Throws Error{Reducible}.
[[nodiscard]] RowVector stationary_distribution(const FluidModel& model);

/// pi . c. Negative means positive recurrent, positive means transient.
[[nodiscard]] double mean_drift(const FluidModel& model);

}  // namespace fluidq
