#pragma once

#include <Eigen/Dense>

#include <utility>

// Small dense kernel shared by every other module. Matrices here are at most a
// few dozen rows, so everything is dense and factorized with partial pivoting.
namespace fluidq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Max absolute row sum. The library-wide default norm.
[[nodiscard]] double norm_inf(const Matrix& m);

/// Solves A X = B. Throws Error{Singular} when a pivot falls below
/// 1e-14 * max(1, ||A||_inf).
[[nodiscard]] Matrix solve_linear(const Matrix& a, const Matrix& b);

/// Solves X A = B, i.e. B A^{-1}, without forming the inverse.
[[nodiscard]] Matrix solve_linear_right(const Matrix& a, const Matrix& b);

/// Factorization of a square matrix checked for singularity once, reusable
/// for many right-hand sides.
class LinearSolver {
public:
    explicit LinearSolver(const Matrix& a);

    [[nodiscard]] Matrix solve(const Matrix& b) const;
    [[nodiscard]] Eigen::Index size() const { return lu_.rows(); }

private:
    Eigen::PartialPivLU<Matrix> lu_;
};

/// Perron root of a nonnegative matrix.
///
/// Power iteration from the all-ones vector, stopped when the Collatz-Wielandt
/// bracket min_i (Mx)_i/x_i <= rho <= max_i (Mx)_i/x_i closes to 1e-12
/// relative. Periodic or reducible inputs, where the bracket does not close,
/// fall back to a dense eigensolve.
[[nodiscard]] double spectral_radius(const Matrix& m);

/// max |eigenvalue| of an arbitrary square matrix, by dense eigensolve. Used
/// where blocks may carry signs, so no Perron structure is assumed.
[[nodiscard]] double max_abs_eigenvalue(const Matrix& m);

/// True when the directed graph of nonzero off-diagonal entries is strongly
/// connected. A 1x1 matrix is irreducible.
[[nodiscard]] bool is_irreducible(const Matrix& m);

struct PerronPair {
    double value = 0.0;
    RowVector vector;  // positive, sums to one
};

/// Perron eigenvalue and left eigenvector of a matrix with nonnegative
/// off-diagonal entries (a generator, subgenerator or nonnegative matrix).
/// Throws Error{Reducible} if the off-diagonal graph is not strongly connected.
[[nodiscard]] PerronPair perron_left_pair(const Matrix& m);

/// Solves A X + X D = RHS by Kronecker vectorization.
[[nodiscard]] Matrix solve_sylvester(const Matrix& a, const Matrix& d, const Matrix& rhs);

/// Sylvester operator with its Kronecker factorization cached, for fixed-point
/// schemes that solve many right-hand sides against the same A and D.
class SylvesterSolver {
public:
    SylvesterSolver(const Matrix& a, const Matrix& d);

    [[nodiscard]] Matrix solve(const Matrix& rhs) const;

private:
    Matrix a_;
    Matrix d_;
    LinearSolver kron_;
};

/// Entry with the smallest value, returned as (row, col).
[[nodiscard]] std::pair<Eigen::Index, Eigen::Index> argmin_entry(const Matrix& m);

}  // namespace fluidq
