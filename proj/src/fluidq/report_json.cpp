#include "fluidq/report_json.hpp"

#include "fluidq/error.hpp"

#include <json.hpp>

namespace fluidq {

using nlohmann::json;

namespace {

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix json_matrix(const json& j, const char* what) {
    if (!j.is_array()) throw Error(ErrorCode::Parse, std::string("report: ") + what + " must be an array");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw Error(ErrorCode::Parse, std::string("report: ") + what + " is ragged");
        }
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    return m;
}

json phases_json(const FluidModel& model) {
    return json{{"up", model.up_labels()}, {"down", model.down_labels()}};
}

}  // namespace

std::string solve_report_json(const FluidModel& model, const SolveReport& r) {
    json history = json::array();
    for (const auto& h : r.history) {
        history.push_back({{"k", h.k}, {"normE", h.norm_e}, {"normF", h.norm_f}, {"normG", h.norm_g},
                           {"normH", h.norm_h}});
    }
    json doc{
        {"psi", matrix_json(r.psi)},
        {"psi_hat", matrix_json(r.psi_hat)},
        {"residuals", {{"riccati", r.riccati_residual}, {"dual", r.dual_residual}, {"dare", r.dare_residual}}},
        {"iterations", r.iterations},
        {"converged", r.converged},
        {"classification", std::string(classification_name(r.classification))},
        {"convergence", r.convergence == ConvergenceKind::Linear ? "linear" : "quadratic"},
        {"null_recurrence_suspected", r.null_recurrence_suspected},
        {"history", history},
        {"params",
         {{"alpha", r.params.alpha}, {"beta", r.params.beta}, {"variant", std::string(variant_name(r.params.variant))}}},
        {"phases", phases_json(model)},
    };
    return doc.dump(2);
}

std::string series_json(const FluidModel& model, const SeriesEstimate& est, double lambda, double mu) {
    json doc{{"value", matrix_json(est.value)},
             {"terms_used", est.terms_used},
             {"last_increment_norm", est.last_increment_norm},
             {"representation", std::string(representation_name(est.representation))},
             {"lambda", lambda},
             {"mu", mu},
             {"phases", phases_json(model)}};
    return doc.dump(2);
}

std::string mc_json(const FluidModel& model, const McEstimate& est, const SimulationOptions& options) {
    json doc{{"mean", matrix_json(est.mean)},
             {"halfwidth", matrix_json(est.halfwidth)},
             {"trials", est.trials},
             {"seed", est.seed},
             {"capped_paths", est.capped_paths},
             {"level_cap", options.level_cap},
             {"time_cap", options.time_cap},
             {"replicas", options.replicas},
             {"phases", phases_json(model)}};
    return doc.dump(2);
}

std::string verify_json(const VerifyReport& report) {
    json checks = json::array();
    for (const auto& c : report.checks) {
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    json doc{{"lambda", report.lambda}, {"mu", report.mu}, {"all_pass", report.all_pass()}, {"checks", checks}};
    return doc.dump(2);
}

std::string qbd_json(const FluidModel& unit_model, const Qbd& q, const GSolution* cr,
                     const GSolution* fixed_point) {
    json doc{{"kind", std::string(qbd_kind_name(q.kind))},
             {"lambda", q.lambda},
             {"mu", q.mu},
             {"signed", q.signed_blocks},
             {"down", matrix_json(q.down)},
             {"same", matrix_json(q.same)},
             {"up", matrix_json(q.up)},
             {"phases", phases_json(unit_model)}};
    auto sol = [](const GSolution& s) {
        return json{{"g", matrix_json(s.g)}, {"iterations", s.iterations}, {"residual", s.residual}};
    };
    if (cr) doc["cyclic_reduction"] = sol(*cr);
    if (fixed_point) doc["fixed_point"] = sol(*fixed_point);
    return doc.dump(2);
}

ParsedSolveReport parse_solve_report(const std::string& text) {
    ParsedSolveReport p;
    try {
        const json doc = json::parse(text);
        p.psi = json_matrix(doc.at("psi"), "psi");
        p.psi_hat = json_matrix(doc.at("psi_hat"), "psi_hat");
        const json& res = doc.at("residuals");
        p.riccati = res.at("riccati").get<double>();
        p.dual = res.at("dual").get<double>();
        p.dare = res.at("dare").get<double>();
        p.iterations = doc.at("iterations").get<int>();
        p.classification = doc.at("classification").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("report: ") + e.what());
    }
    return p;
}

}  // namespace fluidq
