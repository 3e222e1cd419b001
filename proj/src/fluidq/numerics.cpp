#include "fluidq/numerics.hpp"

#include "fluidq/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace fluidq {

namespace {

constexpr double kPivotThreshold = 1e-14;
constexpr double kNonnegSlack = 1e-14;
constexpr int kPowerIterCap = 5000;
constexpr double kBracketTol = 1e-12;

void require_square(const Matrix& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        std::ostringstream os;
        os << what << ": expected a nonempty square matrix, got " << a.rows() << "x" << a.cols();
        throw Error(ErrorCode::InvalidArgument, os.str());
    }
}

}  // namespace

double norm_inf(const Matrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

LinearSolver::LinearSolver(const Matrix& a) {
    require_square(a, "solve_linear");
    if (!a.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "solve_linear: non-finite coefficient matrix");
    }
    lu_.compute(a);
    const double scale = std::max(1.0, norm_inf(a));
    const auto diag = lu_.matrixLU().diagonal().cwiseAbs();
    Eigen::Index where = 0;
    const double smallest = diag.minCoeff(&where);
    if (!(smallest > kPivotThreshold * scale)) {
        std::ostringstream os;
        os << "matrix is numerically singular (pivot " << smallest << " at step " << where
           << ", threshold " << kPivotThreshold * scale << ")";
        throw Error(ErrorCode::Singular, os.str());
    }
}

Matrix LinearSolver::solve(const Matrix& b) const {
    if (b.rows() != lu_.rows()) {
        throw Error(ErrorCode::InvalidArgument, "solve_linear: right-hand side has wrong row count");
    }
    return lu_.solve(b);
}

Matrix solve_linear(const Matrix& a, const Matrix& b) {
    return LinearSolver(a).solve(b);
}

Matrix solve_linear_right(const Matrix& a, const Matrix& b) {
    // X A = B  <=>  A^T X^T = B^T
    return LinearSolver(a.transpose()).solve(b.transpose()).transpose();
}

double spectral_radius(const Matrix& m_in) {
    require_square(m_in, "spectral_radius");
    if (m_in.minCoeff() < -kNonnegSlack) {
        throw Error(ErrorCode::InvalidArgument, "spectral_radius: matrix has negative entries");
    }
    const Matrix m = m_in.cwiseMax(0.0);
    const Eigen::Index n = m.rows();

    Vector x = Vector::Ones(n);
    for (int it = 0; it < kPowerIterCap; ++it) {
        const Vector y = m * x;
        const double top = y.maxCoeff();
        if (top == 0.0) {
            return 0.0;  // nilpotent along this orbit; only possible for reducible m
        }
        if ((y.array() <= 0.0).any()) {
            break;  // bracket cannot close, reducible
        }
        const Eigen::ArrayXd ratio = y.array() / x.array();
        const double lo = ratio.minCoeff();
        const double hi = ratio.maxCoeff();
        if (hi - lo <= kBracketTol * hi) {
            return 0.5 * (lo + hi);
        }
        x = y / top;
    }

    Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::NoConvergence, "spectral_radius: eigensolver did not converge");
    }
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double max_abs_eigenvalue(const Matrix& m) {
    require_square(m, "max_abs_eigenvalue");
    if (m.rows() == 0) {
        return 0.0;
    }
    Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::NoConvergence, "max_abs_eigenvalue: eigensolver did not converge");
    }
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_irreducible(const Matrix& m) {
    const Eigen::Index n = m.rows();
    if (n <= 1) {
        return true;
    }
    auto reaches_all = [&](bool transpose) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<Eigen::Index> stack{0};
        seen[0] = 1;
        Eigen::Index count = 1;
        while (!stack.empty()) {
            const Eigen::Index i = stack.back();
            stack.pop_back();
            for (Eigen::Index j = 0; j < n; ++j) {
                const double w = transpose ? m(j, i) : m(i, j);
                if (j != i && w != 0.0 && !seen[static_cast<std::size_t>(j)]) {
                    seen[static_cast<std::size_t>(j)] = 1;
                    ++count;
                    stack.push_back(j);
                }
            }
        }
        return count == n;
    };
    return reaches_all(false) && reaches_all(true);
}

PerronPair perron_left_pair(const Matrix& m) {
    require_square(m, "perron_left_pair");
    const Eigen::Index n = m.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && m(i, j) < -kNonnegSlack) {
                throw Error(ErrorCode::InvalidArgument,
                            "perron_left_pair: negative off-diagonal entry");
            }
        }
    }
    if (!is_irreducible(m)) {
        throw Error(ErrorCode::Reducible, "perron_left_pair: matrix is reducible");
    }
    if (n == 1) {
        return {m(0, 0), RowVector::Ones(1)};
    }

    // The Perron eigenvalue of a Metzler matrix is the eigenvalue of largest
    // real part; it is real and simple when the matrix is irreducible.
    Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::NoConvergence, "perron_left_pair: eigensolver did not converge");
    }
    double gamma = es.eigenvalues().real().maxCoeff();

    // v (M - gamma I) = 0 with v 1 = 1: transpose, and trade the last equation
    // for the normalization. Two refinement sweeps polish gamma as v M 1.
    RowVector v;
    for (int sweep = 0; sweep < 3; ++sweep) {
        Matrix sys = (m - gamma * Matrix::Identity(n, n)).transpose();
        sys.row(n - 1).setOnes();
        Vector rhs = Vector::Zero(n);
        rhs(n - 1) = 1.0;
        v = solve_linear(sys, rhs).transpose();
        gamma = (v * m).sum() / v.sum();
    }
    if ((v.array() <= 0.0).any()) {
        throw Error(ErrorCode::NoConvergence, "perron_left_pair: eigenvector is not positive");
    }
    v /= v.sum();
    return {gamma, v};
}

SylvesterSolver::SylvesterSolver(const Matrix& a, const Matrix& d)
    : a_(a), d_(d), kron_([&] {
          require_square(a, "solve_sylvester");
          require_square(d, "solve_sylvester");
          const Eigen::Index p = a.rows();
          const Eigen::Index q = d.rows();
          // Column-major vec: vec(A X + X D) = (I_q kron A + D^T kron I_p) vec(X).
          Matrix k = Matrix::Zero(p * q, p * q);
          for (Eigen::Index j = 0; j < q; ++j) {
              k.block(j * p, j * p, p, p) += a;
              for (Eigen::Index l = 0; l < q; ++l) {
                  k.block(l * p, j * p, p, p).diagonal().array() += d(j, l);
              }
          }
          return LinearSolver(k);
      }()) {}

Matrix SylvesterSolver::solve(const Matrix& rhs) const {
    const Eigen::Index p = a_.rows();
    const Eigen::Index q = d_.rows();
    if (rhs.rows() != p || rhs.cols() != q) {
        throw Error(ErrorCode::InvalidArgument, "solve_sylvester: right-hand side has wrong shape");
    }
    const Vector b = Eigen::Map<const Vector>(rhs.data(), p * q);
    const Vector x = kron_.solve(b);
    Matrix out = Eigen::Map<const Matrix>(x.data(), p, q);

    const double res = norm_inf(a_ * out + out * d_ - rhs);
    const double scale = std::max(norm_inf(rhs), (norm_inf(a_) + norm_inf(d_)) * norm_inf(out));
    if (res > 1e-10 * scale) {
        std::ostringstream os;
        os << "solve_sylvester: residual " << res << " too large; spectra of A and -D overlap";
        throw Error(ErrorCode::Singular, os.str());
    }
    return out;
}

Matrix solve_sylvester(const Matrix& a, const Matrix& d, const Matrix& rhs) {
    return SylvesterSolver(a, d).solve(rhs);
}

std::pair<Eigen::Index, Eigen::Index> argmin_entry(const Matrix& m) {
    Eigen::Index r = 0;
    Eigen::Index c = 0;
    m.minCoeff(&r, &c);
    return {r, c};
}

}  // namespace fluidq
