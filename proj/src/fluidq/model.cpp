#include "fluidq/model.hpp"

#include "fluidq/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fluidq {

namespace {

constexpr double kRowSumTol = 1e-12;

}  // namespace

Matrix PartitionedMatrix::assemble() const {
    const Eigen::Index np = pp.rows();
    const Eigen::Index nm = mm.rows();
    Matrix m(np + nm, np + nm);
    m << pp, pm, mp, mm;
    return m;
}

PartitionedMatrix partition(const Matrix& m, Eigen::Index n_plus) {
    const Eigen::Index n = m.rows();
    const Eigen::Index n_minus = n - n_plus;
    return {m.topLeftCorner(n_plus, n_plus), m.topRightCorner(n_plus, n_minus),
            m.bottomLeftCorner(n_minus, n_plus), m.bottomRightCorner(n_minus, n_minus)};
}

std::vector<std::string> FluidModel::up_labels() const {
    return {labels_.begin(), labels_.begin() + n_plus_};
}

std::vector<std::string> FluidModel::down_labels() const {
    return {labels_.begin() + n_plus_, labels_.end()};
}

bool FluidModel::has_unit_rates() const {
    return (rates_.array().abs() == 1.0).all();
}

double FluidModel::max_exit_rate() const {
    return generator_.diagonal().cwiseAbs().maxCoeff();
}

bool operator==(const FluidModel& a, const FluidModel& b) {
    return a.labels_ == b.labels_ && a.n_plus_ == b.n_plus_ && a.generator_ == b.generator_ &&
           a.rates_ == b.rates_;
}

FluidModel validate_model(const Matrix& generator, const Vector& rates,
                          std::vector<std::string> labels) {
    const Eigen::Index n = generator.rows();
    if (n == 0 || generator.cols() != n) {
        throw Error(ErrorCode::InvalidArgument, "generator must be a nonempty square matrix");
    }
    if (rates.size() != n) {
        std::ostringstream os;
        os << "rates has length " << rates.size() << " but the generator is " << n << "x" << n;
        throw Error(ErrorCode::InvalidArgument, os.str());
    }
    if (labels.empty()) {
        for (Eigen::Index i = 0; i < n; ++i) {
            labels.push_back(std::to_string(i));
        }
    }
    if (static_cast<Eigen::Index>(labels.size()) != n) {
        throw Error(ErrorCode::InvalidArgument, "number of phase labels does not match the generator");
    }
    if (!generator.allFinite() || !rates.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "generator and rates must be finite");
    }

    const double tol = kRowSumTol * std::max(1.0, norm_inf(generator));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && generator(i, j) < 0.0) {
                std::ostringstream os;
                os << "not a generator: negative off-diagonal entry " << generator(i, j) << " at ("
                   << i << ", " << j << ")";
                throw Error(ErrorCode::NonGenerator, os.str());
            }
        }
        const double row_sum = generator.row(i).sum();
        if (std::abs(row_sum) > tol) {
            std::ostringstream os;
            os << "not a generator: row " << i << " sums to " << row_sum;
            throw Error(ErrorCode::NonGenerator, os.str());
        }
    }

    std::vector<std::size_t> up;
    std::vector<std::size_t> down;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (rates(i) == 0.0) {
            std::ostringstream os;
            os << "phase '" << labels[static_cast<std::size_t>(i)] << "' has zero fluid rate";
            throw Error(ErrorCode::ZeroRate, os.str());
        }
        (rates(i) > 0.0 ? up : down).push_back(static_cast<std::size_t>(i));
    }
    if (up.empty() || down.empty()) {
        throw Error(ErrorCode::EmptySide,
                    up.empty() ? "model has no phase with positive rate"
                               : "model has no phase with negative rate");
    }

    FluidModel m;
    m.n_plus_ = static_cast<Eigen::Index>(up.size());
    m.permutation_ = up;
    m.permutation_.insert(m.permutation_.end(), down.begin(), down.end());
    m.generator_.resize(n, n);
    m.rates_.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto src = static_cast<Eigen::Index>(m.permutation_[static_cast<std::size_t>(k)]);
        m.rates_(k) = rates(src);
        m.labels_.push_back(labels[static_cast<std::size_t>(src)]);
        for (Eigen::Index l = 0; l < n; ++l) {
            m.generator_(k, l) =
                generator(src, static_cast<Eigen::Index>(m.permutation_[static_cast<std::size_t>(l)]));
        }
    }
    return m;
}

FluidModel rescale_to_unit_rates(const FluidModel& model) {
    FluidModel out = model;
    const Vector speed = model.rates_.cwiseAbs();
    out.generator_ = speed.cwiseInverse().asDiagonal() * model.generator_;
    out.rates_ = model.rates_.array().sign().matrix();
    return out;
}

FluidModel reverse_rates(const FluidModel& model) {
    // Goes back through validation so the new up-phases are moved to the front.
    Matrix t(model.size(), model.size());
    Vector c(model.size());
    std::vector<std::string> labels(static_cast<std::size_t>(model.size()));
    const auto& perm = model.permutation();
    for (Eigen::Index k = 0; k < model.size(); ++k) {
        const auto dst = static_cast<Eigen::Index>(perm[static_cast<std::size_t>(k)]);
        c(dst) = -model.rates()(k);
        labels[static_cast<std::size_t>(dst)] = model.labels()[static_cast<std::size_t>(k)];
        for (Eigen::Index l = 0; l < model.size(); ++l) {
            t(dst, static_cast<Eigen::Index>(perm[static_cast<std::size_t>(l)])) =
                model.generator()(k, l);
        }
    }
    return validate_model(t, c, std::move(labels));
}

RowVector stationary_distribution(const FluidModel& model) {
    if (!model.is_irreducible()) {
        throw Error(ErrorCode::Reducible, "phase generator is reducible; no unique stationary vector");
    }
    const Eigen::Index n = model.size();
    Matrix sys = model.generator().transpose();
    sys.row(n - 1).setOnes();
    Vector rhs = Vector::Zero(n);
    rhs(n - 1) = 1.0;
    return solve_linear(sys, rhs).transpose();
}

double mean_drift(const FluidModel& model) {
    return stationary_distribution(model).dot(model.rates().transpose());
}

}  // namespace fluidq
