#include "fluidq/error.hpp"
#include "fluidq/oracles.hpp"
#include "fluidq/philox.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

namespace fluidq {

namespace {

struct JumpTable {
    Vector exit_rate;                        // -T_ii
    std::vector<std::vector<double>> cum;    // cumulative jump probabilities per row
};

JumpTable jump_table(const FluidModel& model) {
    const Matrix& t = model.generator();
    const Eigen::Index n = model.size();
    JumpTable jt;
    jt.exit_rate = -t.diagonal();
    jt.cum.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& row = jt.cum[static_cast<std::size_t>(i)];
        row.resize(static_cast<std::size_t>(n));
        double acc = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i && jt.exit_rate(i) > 0.0) acc += t(i, j) / jt.exit_rate(i);
            row[static_cast<std::size_t>(j)] = acc;
        }
        for (double& v : row) v /= acc > 0.0 ? acc : 1.0;
    }
    return jt;
}

struct Tally {
    std::vector<long long> returns;  // by canonical down-phase, offset by n+
    long long capped = 0;
};

// One path from level 0. Returns the canonical phase of first return, or -1.
Eigen::Index run_path(const FluidModel& model, const JumpTable& jt, Eigen::Index start,
                      double level_cap, double time_cap, PhiloxStream& rng, bool& capped) {
    const Vector& c = model.rates();
    const Eigen::Index n = model.size();
    Eigen::Index phase = start;
    double level = 0.0;
    double time = 0.0;
    capped = false;
    for (;;) {
        const double rate = jt.exit_rate(phase);
        const double hold = rate > 0.0 ? rng.next_exponential(rate)
                                       : std::numeric_limits<double>::infinity();
        const double speed = c(phase);
        if (speed < 0.0 && level + speed * hold <= 0.0) {
            return phase;
        }
        level += speed * hold;
        time += hold;
        if (level > level_cap || time > time_cap) {
            capped = true;
            return -1;
        }
        const double u = rng.next_open_closed();
        const auto& row = jt.cum[static_cast<std::size_t>(phase)];
        Eigen::Index next = 0;
        while (next < n - 1 && (next == phase || row[static_cast<std::size_t>(next)] < u)) {
            ++next;
        }
        if (next == phase) next = (phase + 1) % n;  // unreachable for a valid generator
        phase = next;
    }
}

void check_options(const SimulationOptions& o) {
    if (o.trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be at least 1");
    if (!(o.level_cap > 0.0) || !(o.time_cap > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "level and time caps must be positive");
    }
    if (o.replicas < 1) throw Error(ErrorCode::InvalidArgument, "replicas must be at least 1");
}

Tally simulate_row(const FluidModel& model, const JumpTable& jt, Eigen::Index start,
                   const SimulationOptions& o) {
    const auto replicas = static_cast<std::size_t>(o.replicas);
    std::vector<Tally> parts(replicas);
    for (auto& p : parts) p.returns.assign(static_cast<std::size_t>(model.n_minus()), 0);

    auto work = [&](std::size_t r) {
        const long long begin = o.trials * static_cast<long long>(r) / o.replicas;
        const long long end = o.trials * static_cast<long long>(r + 1) / o.replicas;
        PhiloxStream rng(o.seed, static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(start));
        Tally& t = parts[r];
        for (long long i = begin; i < end; ++i) {
            bool capped = false;
            const Eigen::Index hit = run_path(model, jt, start, o.level_cap, o.time_cap, rng, capped);
            if (hit >= 0) {
                ++t.returns[static_cast<std::size_t>(hit - model.n_plus())];
            } else if (capped) {
                ++t.capped;
            }
        }
    };

    unsigned threads = o.threads > 0 ? static_cast<unsigned>(o.threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(replicas));
    if (threads <= 1) {
        for (std::size_t r = 0; r < replicas; ++r) work(r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < replicas; r = next++) work(r);
            });
        }
        for (auto& th : pool) th.join();
    }

    Tally total;
    total.returns.assign(static_cast<std::size_t>(model.n_minus()), 0);
    for (const auto& p : parts) {
        for (std::size_t j = 0; j < total.returns.size(); ++j) total.returns[j] += p.returns[j];
        total.capped += p.capped;
    }
    return total;
}

void fill_row(McEstimate& est, Eigen::Index row, const Tally& t, long long trials) {
    const double n = static_cast<double>(trials);
    for (std::size_t j = 0; j < t.returns.size(); ++j) {
        const double p = static_cast<double>(t.returns[j]) / n;
        const auto col = static_cast<Eigen::Index>(j);
        est.mean(row, col) = p;
        est.halfwidth(row, col) = 1.96 * std::sqrt(p * (1.0 - p) / n);
    }
    est.capped_paths += t.capped;
}

}  // namespace

McEstimate simulate_return_probability(const FluidModel& model, Eigen::Index start_phase,
                                       const SimulationOptions& options) {
    check_options(options);
    if (start_phase < 0 || start_phase >= model.n_plus()) {
        throw Error(ErrorCode::InvalidArgument, "start phase must be an up-phase");
    }
    const JumpTable jt = jump_table(model);
    McEstimate est;
    est.mean = Matrix::Zero(1, model.n_minus());
    est.halfwidth = Matrix::Zero(1, model.n_minus());
    est.trials = options.trials;
    est.seed = options.seed;
    fill_row(est, 0, simulate_row(model, jt, start_phase, options), options.trials);
    return est;
}

McEstimate simulate_return_matrix(const FluidModel& model, const SimulationOptions& options) {
    check_options(options);
    const JumpTable jt = jump_table(model);
    McEstimate est;
    est.mean = Matrix::Zero(model.n_plus(), model.n_minus());
    est.halfwidth = Matrix::Zero(model.n_plus(), model.n_minus());
    est.trials = options.trials;
    est.seed = options.seed;
    for (Eigen::Index i = 0; i < model.n_plus(); ++i) {
        fill_row(est, i, simulate_row(model, jt, i, options), options.trials);
    }
    return est;
}

}  // namespace fluidq
