#pragma once

#include "fluidq/doubling.hpp"
#include "fluidq/oracles.hpp"
#include "fluidq/qbd.hpp"
#include "fluidq/verify.hpp"

#include <string>

// JSON renderings of the result types. Doubles are written in the shortest
// form that parses back to the identical value, so a report re-read and
// re-checked reproduces its residuals exactly.
namespace fluidq {

[[nodiscard]] std::string solve_report_json(const FluidModel& model, const SolveReport& report);
[[nodiscard]] std::string series_json(const FluidModel& model, const SeriesEstimate& est,
                                      double lambda, double mu);
[[nodiscard]] std::string mc_json(const FluidModel& model, const McEstimate& est,
                                  const SimulationOptions& options);
[[nodiscard]] std::string verify_json(const VerifyReport& report);
[[nodiscard]] std::string qbd_json(const FluidModel& unit_model, const Qbd& qbd,
                                   const GSolution* cr, const GSolution* fixed_point);

/// Reads the psi and psi_hat arrays back out of a solve report.
struct ParsedSolveReport {
    Matrix psi;
    Matrix psi_hat;
    double riccati = 0.0;
    double dual = 0.0;
    double dare = 0.0;
    int iterations = 0;
    std::string classification;
};

/// Throws Error{Parse}.
[[nodiscard]] ParsedSolveReport parse_solve_report(const std::string& text);

}  // namespace fluidq
