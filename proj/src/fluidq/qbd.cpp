#include "fluidq/qbd.hpp"

#include "fluidq/analysis.hpp"
#include "fluidq/doubling.hpp"
#include "fluidq/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace fluidq {

namespace {

constexpr double kSignSlack = 1e-12;
constexpr double kBoxSlack = 1e-12;

Matrix blocks(const Matrix& pp, const Matrix& pm, const Matrix& mp, const Matrix& mm) {
    PartitionedMatrix p{pp, pm, mp, mm};
    return p.assemble();
}

struct Layout {
    Eigen::Index np = 0;
    Eigen::Index nm = 0;

    [[nodiscard]] Matrix zpp() const { return Matrix::Zero(np, np); }
    [[nodiscard]] Matrix zpm() const { return Matrix::Zero(np, nm); }
    [[nodiscard]] Matrix zmp() const { return Matrix::Zero(nm, np); }
    [[nodiscard]] Matrix zmm() const { return Matrix::Zero(nm, nm); }
    [[nodiscard]] Matrix ip() const { return Matrix::Identity(np, np); }
    [[nodiscard]] Matrix im() const { return Matrix::Identity(nm, nm); }
};

bool uses_lambda(QbdKind k) {
    return k == QbdKind::A || k == QbdKind::Aprime || k == QbdKind::Delta || k == QbdKind::C ||
           k == QbdKind::Cprime;
}

bool uses_mu(QbdKind k) {
    return k == QbdKind::B || k == QbdKind::Bprime || k == QbdKind::Theta || k == QbdKind::C ||
           k == QbdKind::Cprime;
}

void require_unit(const FluidModel& m) {
    if (!m.has_unit_rates()) {
        throw Error(ErrorCode::NonUnitRates, "QBD constructions need a model with rates +-1");
    }
}

void require_uniformizable(const FluidModel& m, double rate, const char* name) {
    const double bound = m.max_exit_rate();
    if (rate >= bound) {
        return;
    }
    const Matrix p = Matrix::Identity(m.size(), m.size()) + m.generator() / rate;
    const auto [i, j] = argmin_entry(p);
    std::ostringstream os;
    os << name << " = " << rate << " is below max_i |T_ii| = " << bound << "; I + T/" << name
       << " has entry (" << m.labels()[static_cast<std::size_t>(i)] << ", "
       << m.labels()[static_cast<std::size_t>(j)] << ") = " << p(i, j);
    throw Error(ErrorCode::RateTooSmall, os.str());
}

void check_box(const FluidModel& m, double lambda, double mu) {
    const OptimalParameters opt = optimal_parameters(m);
    std::ostringstream os;
    if (!(lambda > 0.0) || !(mu > 0.0)) {
        os << "lambda and mu must be positive";
    } else if (1.0 / mu > opt.alpha_opt * (1.0 + kBoxSlack)) {
        os << "1/mu = " << 1.0 / mu << " exceeds alpha_opt = " << opt.alpha_opt;
    } else if (1.0 / lambda > opt.beta_opt * (1.0 + kBoxSlack)) {
        os << "1/lambda = " << 1.0 / lambda << " exceeds beta_opt = " << opt.beta_opt;
    } else {
        return;
    }
    throw Error(ErrorCode::BadParams, os.str());
}

Qbd cprime_blocks(const FluidModel& m, double lambda, double mu) {
    const Layout z{m.n_plus(), m.n_minus()};
    const Matrix eye = Matrix::Identity(m.size(), m.size());
    const PartitionedMatrix pl = partition(eye + m.generator() / lambda, z.np);
    const PartitionedMatrix pmu = partition(eye + m.generator() / mu, z.np);
    Qbd q;
    q.down = 0.5 * blocks(z.zpp(), pmu.pm, z.zmp(), pmu.mm);
    q.same = 0.5 * blocks(pmu.pp, pl.pm, pmu.mp, pl.mm);
    q.up = 0.5 * blocks(pl.pp, z.zpm(), pl.mp, z.zmm());
    q.kind = QbdKind::Cprime;
    q.lambda = lambda;
    q.mu = mu;
    return q;
}

struct Reduced {
    Qbd next;
    Matrix up_k_down;  // L+ K L-, the accumulator increment
};

Reduced reduce(const Qbd& q) {
    const Eigen::Index n = q.phases();
    Reduced r;
    try {
        const LinearSolver k(Matrix::Identity(n, n) - q.same);
        const Matrix kd = k.solve(q.down);
        const Matrix ku = k.solve(q.up);
        r.next = q;
        r.next.down = q.down * kd;
        r.next.up = q.up * ku;
        r.next.same = q.same + q.down * ku + q.up * kd;
        r.up_k_down = q.up * kd;
    } catch (const Error& e) {
        throw Error(ErrorCode::SingularCascade, std::string("cyclic reduction: ") + e.what());
    }
    return r;
}

double g_residual(const Qbd& q, const Matrix& g) {
    return norm_inf(q.down + q.same * g + q.up * g * g - g);
}

}  // namespace

std::string_view qbd_kind_name(QbdKind kind) {
    switch (kind) {
        case QbdKind::A: return "A";
        case QbdKind::B: return "B";
        case QbdKind::C: return "C";
        case QbdKind::Aprime: return "Aprime";
        case QbdKind::Bprime: return "Bprime";
        case QbdKind::Cprime: return "Cprime";
        case QbdKind::Delta: return "Delta";
        case QbdKind::Theta: return "Theta";
        case QbdKind::MidLevelD: return "MidLevelD";
    }
    return "?";
}

std::optional<QbdKind> parse_qbd_kind(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    for (QbdKind k : all_qbd_kinds()) {
        std::string n(qbd_kind_name(k));
        std::transform(n.begin(), n.end(), n.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        if (n == lower) return k;
    }
    if (lower == "a'" || lower == "a_prime") return QbdKind::Aprime;
    if (lower == "b'" || lower == "b_prime") return QbdKind::Bprime;
    if (lower == "c'" || lower == "c_prime") return QbdKind::Cprime;
    if (lower == "d" || lower == "mid" || lower == "midlevel") return QbdKind::MidLevelD;
    return std::nullopt;
}

const std::vector<QbdKind>& all_qbd_kinds() {
    static const std::vector<QbdKind> kinds{QbdKind::A,      QbdKind::B,      QbdKind::C,
                                            QbdKind::Aprime, QbdKind::Bprime, QbdKind::Cprime,
                                            QbdKind::Delta,  QbdKind::Theta,  QbdKind::MidLevelD};
    return kinds;
}

bool qbd_needs_psi(QbdKind k) {
    return k == QbdKind::A || k == QbdKind::B || k == QbdKind::C || k == QbdKind::MidLevelD;
}

double Qbd::row_sum_excess() const {
    return ((down + same + up).rowwise().sum().array() - 1.0).maxCoeff();
}

double Qbd::stochasticity_gap() const {
    const Vector rows = (down + same + up).rowwise().sum();
    return (rows.array() - 1.0).abs().maxCoeff();
}

Qbd build_qbd(const FluidModel& unit_model, QbdKind kind, double lambda, double mu,
              const std::optional<Matrix>& psi, bool allow_signed) {
    require_unit(unit_model);
    if (!(lambda > 0.0) || !(mu > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "lambda and mu must be positive");
    }
    if (qbd_needs_psi(kind) && !psi) {
        throw Error(ErrorCode::NeedPsi,
                    "QBD kind " + std::string(qbd_kind_name(kind)) + " is built from Psi");
    }
    if (!allow_signed) {
        if (uses_lambda(kind)) require_uniformizable(unit_model, lambda, "lambda");
        if (uses_mu(kind)) require_uniformizable(unit_model, mu, "mu");
        if (kind == QbdKind::MidLevelD) check_box(unit_model, lambda, mu);
    }

    const Layout z{unit_model.n_plus(), unit_model.n_minus()};
    const PartitionedMatrix t = unit_model.blocks();
    const Matrix eye = Matrix::Identity(unit_model.size(), unit_model.size());
    const PartitionedMatrix pl = partition(eye + unit_model.generator() / lambda, z.np);
    const PartitionedMatrix pmu = partition(eye + unit_model.generator() / mu, z.np);

    Qbd q;
    switch (kind) {
        case QbdKind::A: {
            const DerivedMatrices d = derived_matrices(unit_model, *psi, lambda, mu);
            q.down = blocks(z.zpp(), z.zpm(), z.zmp(), solve_linear(z.im() - d.u / lambda, z.im()));
            q.same = blocks(z.zpp(), pl.pm, z.zmp(), z.zmm());
            q.up = blocks(pl.pp, z.zpm(), z.zmp(), z.zmm());
            break;
        }
        case QbdKind::B: {
            const DerivedMatrices d = derived_matrices(unit_model, *psi, lambda, mu);
            const LinearSolver s(z.ip() - t.pp / mu);
            q.down = blocks(z.zpp(), s.solve(pmu.pm), z.zmp(), d.v_mu);
            q.same = Matrix::Zero(unit_model.size(), unit_model.size());
            q.up = blocks(s.solve(z.ip()), z.zpm(), z.zmp(), z.zmm());
            break;
        }
        case QbdKind::C: {
            const DerivedMatrices d = derived_matrices(unit_model, *psi, lambda, mu);
            const LinearSolver s(z.ip() - t.pp / mu);
            q.down = blocks(z.zpp(), s.solve(pmu.pm), z.zmp(), d.w);
            q.same = blocks(z.zpp(), s.solve(pl.pm), z.zmp(), z.zmm());
            q.up = blocks(s.solve(pl.pp), z.zpm(), z.zmp(), z.zmm());
            break;
        }
        case QbdKind::Aprime:
            q.down = 0.5 * blocks(z.zpp(), z.zpm(), z.zmp(), z.im());
            q.same = 0.5 * blocks(z.ip(), pl.pm, z.zmp(), pl.mm);
            q.up = 0.5 * blocks(pl.pp, z.zpm(), pl.mp, z.zmm());
            break;
        case QbdKind::Bprime:
            q.down = 0.5 * blocks(z.zpp(), pmu.pm, z.zmp(), pmu.mm);
            q.same = 0.5 * blocks(pmu.pp, z.zpm(), pmu.mp, z.im());
            q.up = 0.5 * blocks(z.ip(), z.zpm(), z.zmp(), z.zmm());
            break;
        case QbdKind::Cprime:
            q = cprime_blocks(unit_model, lambda, mu);
            break;
        case QbdKind::Delta:
            q.down = 0.5 * blocks(z.zpp(), z.zpm(), z.zmp(), z.im());
            q.same = blocks(z.zpp(), pl.pm, z.zmp(), 0.5 * pl.mm);
            q.up = blocks(pl.pp, z.zpm(), 0.5 * pl.mp, z.zmm());
            break;
        case QbdKind::Theta:
            q.down = blocks(z.zpp(), 0.5 * pmu.pm, z.zmp(), pmu.mm);
            q.same = blocks(0.5 * pmu.pp, z.zpm(), pmu.mp, z.zmm());
            q.up = 0.5 * blocks(z.ip(), z.zpm(), z.zmp(), z.zmm());
            break;
        case QbdKind::MidLevelD:
            q = mid_level_qbd(embedded_level_blocks(unit_model, lambda, mu));
            break;
    }
    q.kind = kind;
    q.lambda = lambda;
    q.mu = mu;

    const double lowest =
        std::min({q.down.minCoeff(), q.same.minCoeff(), q.up.minCoeff()});
    q.signed_blocks = lowest < -kSignSlack;
    if (q.signed_blocks && !allow_signed) {
        std::ostringstream os;
        os << "QBD " << qbd_kind_name(kind) << " at lambda = " << lambda << ", mu = " << mu
           << " has a negative block entry " << lowest;
        throw Error(ErrorCode::RateTooSmall, os.str());
    }
    return q;
}

MidLevelBlocks embedded_level_blocks(const FluidModel& unit_model, double lambda, double mu) {
    require_unit(unit_model);
    const Qbd c = cprime_blocks(unit_model, lambda, mu);
    const Eigen::Index np = unit_model.n_plus();
    const Eigen::Index nm = unit_model.n_minus();
    Matrix rhs(c.phases(), 2 * c.phases());
    rhs << c.down, c.up;
    const Matrix j = solve_linear(Matrix::Identity(c.phases(), c.phases()) - c.same, rhs);
    const auto j_down = j.leftCols(c.phases());
    const auto j_up = j.rightCols(c.phases());
    MidLevelBlocks b;
    b.e = j_up.topLeftCorner(np, np);
    b.h = j_up.bottomLeftCorner(nm, np);
    b.g = j_down.topRightCorner(np, nm);
    b.f = j_down.bottomRightCorner(nm, nm);
    return b;
}

MidLevelBlocks mid_level_blocks(const FluidModel& unit_model, double lambda, double mu) {
    require_unit(unit_model);
    check_box(unit_model, lambda, mu);
    return embedded_level_blocks(unit_model, lambda, mu);
}

Qbd mid_level_qbd(const MidLevelBlocks& b, double lambda, double mu) {
    const Layout z{b.e.rows(), b.f.rows()};
    Qbd q;
    q.down = blocks(z.zpp(), z.zpm(), z.zmp(), b.f);
    q.same = blocks(z.zpp(), b.g, b.h, z.zmm());
    q.up = blocks(b.e, z.zpm(), z.zmp(), z.zmm());
    q.kind = QbdKind::MidLevelD;
    q.lambda = lambda;
    q.mu = mu;
    return q;
}

MidLevelBlocks split_mid_level(const Qbd& d, Eigen::Index n_plus, double* off_pattern) {
    const PartitionedMatrix dn = partition(d.down, n_plus);
    const PartitionedMatrix sm = partition(d.same, n_plus);
    const PartitionedMatrix up = partition(d.up, n_plus);
    if (off_pattern) {
        auto amax = [](const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); };
        *off_pattern = std::max({amax(dn.pp), amax(dn.pm), amax(dn.mp), amax(sm.pp), amax(sm.mm),
                                 amax(up.pm), amax(up.mp), amax(up.mm)});
    }
    return {up.pp, dn.mm, sm.pm, sm.mp};
}

GSolution g_matrix_fixed_point(const Qbd& qbd, double tol, int max_iter) {
    const Eigen::Index n = qbd.phases();
    GSolution s;
    s.g = Matrix::Zero(n, n);
    for (int it = 1; it <= max_iter; ++it) {
        const Matrix next = qbd.down + qbd.same * s.g + qbd.up * s.g * s.g;
        const double change = norm_inf(next - s.g);
        s.g = next;
        s.iterations = it;
        if (change <= tol) {
            s.residual = g_residual(qbd, s.g);
            s.converged = true;
            return s;
        }
    }
    std::ostringstream os;
    os << "G fixed point for QBD " << qbd_kind_name(qbd.kind) << " did not reach " << tol
       << " in " << max_iter << " iterations (residual " << g_residual(qbd, s.g) << ")";
    throw Error(ErrorCode::MaxIterExceeded, os.str());
}

Qbd cr_step(const Qbd& qbd) { return reduce(qbd).next; }

GSolution cyclic_reduction(const Qbd& qbd, double tol, int max_iter,
                           const std::function<void(const Qbd&)>& on_step) {
    const Eigen::Index n = qbd.phases();
    Qbd cur = qbd;
    Matrix acc = qbd.same;
    GSolution s;
    while (norm_inf(cur.down) * norm_inf(cur.up) > tol) {
        if (s.iterations >= max_iter) {
            std::ostringstream os;
            os << "cyclic reduction for QBD " << qbd_kind_name(qbd.kind) << " did not reach "
               << tol << " in " << max_iter << " steps";
            throw Error(ErrorCode::MaxIterExceeded, os.str());
        }
        Reduced r = reduce(cur);
        acc += r.up_k_down;
        cur = std::move(r.next);
        ++s.iterations;
        if (on_step) on_step(cur);
    }
    try {
        s.g = solve_linear(Matrix::Identity(n, n) - acc, qbd.down);
    } catch (const Error& e) {
        throw Error(ErrorCode::SingularCascade, std::string("cyclic reduction: ") + e.what());
    }
    s.residual = g_residual(qbd, s.g);
    s.converged = true;
    return s;
}

Matrix r_matrix(const Qbd& qbd, const Matrix& g) {
    const Eigen::Index n = qbd.phases();
    return solve_linear_right(Matrix::Identity(n, n) - qbd.same - qbd.up * g, qbd.up);
}

double dare_residual(const Matrix& e, const Matrix& f, const Matrix& g, const Matrix& h,
                     const Matrix& psi) {
    const Eigen::Index nm = f.rows();
    const Matrix tail = solve_linear(Matrix::Identity(nm, nm) - h * psi, f);
    return norm_inf(g + e * psi * tail - psi);
}

bool GEquivalenceReport::holds(double tol) const {
    const bool any = std::any_of(kinds.begin(), kinds.end(), [](const KindCheck& k) { return k.built; });
    return any && worst_gap <= tol;
}

GEquivalenceReport g_equivalence_check(const FluidModel& unit_model, const Matrix& psi,
                                       double lambda, double mu,
                                       const GEquivalenceOptions& options) {
    const DerivedMatrices d = derived_matrices(unit_model, psi, lambda, mu);
    const Layout z{unit_model.n_plus(), unit_model.n_minus()};

    GEquivalenceReport rep;
    rep.g_a = blocks(z.zpp(), psi, z.zmp(), solve_linear(z.im() - d.u / lambda, z.im()));
    rep.g_b = blocks(z.zpp(), psi, z.zmp(), d.v_mu);
    rep.g_c = blocks(z.zpp(), psi, z.zmp(), d.w);
    rep.g_d = blocks(z.zpp(), psi * d.w, z.zmp(), d.w);

    for (QbdKind kind : all_qbd_kinds()) {
        KindCheck kc;
        kc.kind = kind;
        Qbd q;
        try {
            q = build_qbd(unit_model, kind, lambda, mu, psi, options.allow_signed);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::RateTooSmall && e.code() != ErrorCode::BadParams) throw;
            kc.skipped_because = e.what();
            rep.kinds.push_back(std::move(kc));
            continue;
        }
        kc.built = true;
        kc.g_cr = cyclic_reduction(q).g;
        if (options.fixed_point && !q.signed_blocks) {
            kc.g_fixed_point = g_matrix_fixed_point(q).g;
            kc.solver_gap = norm_inf(kc.g_cr - kc.g_fixed_point);
        }
        const Matrix* expected = nullptr;
        switch (kind) {
            case QbdKind::A:
            case QbdKind::Aprime:
            case QbdKind::Delta: expected = &rep.g_a; break;
            case QbdKind::B:
            case QbdKind::Bprime:
            case QbdKind::Theta: expected = &rep.g_b; break;
            case QbdKind::C:
            case QbdKind::Cprime: expected = &rep.g_c; break;
            case QbdKind::MidLevelD: expected = &rep.g_d; break;
        }
        kc.closed_form_gap = norm_inf(kc.g_cr - *expected);
        if (kind != QbdKind::MidLevelD) {
            kc.psi_gap = norm_inf(kc.g_cr.topRightCorner(z.np, z.nm) - psi);
        }
        rep.worst_gap = std::max({rep.worst_gap, kc.solver_gap, kc.closed_form_gap, kc.psi_gap});
        rep.kinds.push_back(std::move(kc));
    }
    return rep;
}

}  // namespace fluidq
