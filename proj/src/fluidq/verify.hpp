#pragma once

#include "fluidq/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fluidq {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    double lambda = 0.0;
    double mu = 0.0;
    std::vector<CheckResult> checks;

    [[nodiscard]] bool all_pass() const;
};

struct VerifyOptions {
    std::optional<double> lambda;  // default 2 max_i |T_ii| of the unit-rate model
    std::optional<double> mu;
    int series_terms = 4096;       // the series exit early once increments vanish
};

/// Runs the invariant battery on a model: doubling stochasticity, QBD
/// stochasticity, G-equivalence, Perron identities, DARE residual, recurrence
/// classification and agreement with the independent oracles. A check that
/// throws is recorded as failed with the error message as detail.
[[nodiscard]] VerifyReport verify_model(const FluidModel& model, const VerifyOptions& options = {});

}  // namespace fluidq
