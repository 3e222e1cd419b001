#include "fluidq/model_io.hpp"

#include "fluidq/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace fluidq {

using nlohmann::json;

namespace {

const json& require_array(const json& doc, const char* key) {
    const auto it = doc.find(key);
    if (it == doc.end()) {
        throw Error(ErrorCode::Parse, std::string("model file: missing field \"") + key + "\"");
    }
    if (!it->is_array()) {
        throw Error(ErrorCode::Parse, std::string("model file: field \"") + key + "\" must be an array");
    }
    return *it;
}

double require_number(const json& v, const char* what) {
    if (!v.is_number()) {
        throw Error(ErrorCode::Parse, std::string("model file: non-numeric entry in \"") + what + "\"");
    }
    return v.get<double>();
}

}  // namespace

FluidModel parse_model_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Parse, std::string("model file: ") + e.what());
    }
    if (!doc.is_object()) {
        throw Error(ErrorCode::Parse, "model file: top level must be an object");
    }

    const json& rates_j = require_array(doc, "rates");
    const json& gen_j = require_array(doc, "generator");
    const auto n = static_cast<Eigen::Index>(rates_j.size());

    std::vector<std::string> labels;
    if (doc.contains("phases")) {
        for (const auto& p : require_array(doc, "phases")) {
            if (!p.is_string()) {
                throw Error(ErrorCode::Parse, "model file: phase labels must be strings");
            }
            labels.push_back(p.get<std::string>());
        }
    }

    Vector rates(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        rates(i) = require_number(rates_j[static_cast<std::size_t>(i)], "rates");
    }
    if (static_cast<Eigen::Index>(gen_j.size()) != n) {
        throw Error(ErrorCode::Parse, "model file: generator must have one row per rate");
    }
    Matrix t(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const json& row = gen_j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
            throw Error(ErrorCode::Parse, "model file: generator must be square");
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            t(i, j) = require_number(row[static_cast<std::size_t>(j)], "generator");
        }
    }
    return validate_model(t, rates, std::move(labels));
}

FluidModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open model file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_json(buf.str());
}

std::string model_to_json(const FluidModel& model) {
    const auto n = static_cast<std::size_t>(model.size());
    const auto& perm = model.permutation();
    json phases = json::array();
    json rates = json::array();
    json gen = json::array();
    std::vector<std::size_t> canon_of(n);
    for (std::size_t k = 0; k < n; ++k) {
        canon_of[perm[k]] = k;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto ci = static_cast<Eigen::Index>(canon_of[i]);
        phases.push_back(model.labels()[canon_of[i]]);
        rates.push_back(model.rates()(ci));
        json row = json::array();
        for (std::size_t j = 0; j < n; ++j) {
            row.push_back(model.generator()(ci, static_cast<Eigen::Index>(canon_of[j])));
        }
        gen.push_back(std::move(row));
    }
    return json{{"phases", phases}, {"rates", rates}, {"generator", gen}}.dump(2);
}

}  // namespace fluidq
