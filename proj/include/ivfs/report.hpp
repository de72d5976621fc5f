#pragma once

#include "ivfs/evaluation.hpp"

#include <json.hpp>

namespace ivfs {

namespace detail {

inline nlohmann::ordered_json number_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

}  // namespace detail

/// Flat JSON object: the metric fields in fixed order, then `parameters`.
inline nlohmann::ordered_json to_json(const EvaluationReport& r) {
    nlohmann::ordered_json j;
    for (const auto& name : metric_names()) j[name] = detail::number_or_null(r.get(name));
    j["elapsed_seconds"] = r.elapsed_seconds;
    j["parameters"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.parameters) j["parameters"][k] = v;
    return j;
}

inline EvaluationReport report_from_json(const nlohmann::ordered_json& j) {
    EvaluationReport r;
    auto num = [&](const char* key) {
        const auto& v = j.at(key);
        return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    r.knn_accuracy = num("knn_accuracy");
    r.kmeans_accuracy = num("kmeans_accuracy");
    r.nmi = num("nmi");
    r.w1 = num("w1");
    r.w_inf = num("w_inf");
    r.l_inf = num("l_inf");
    r.l1_over_n2 = num("l1_over_n2");
    r.l2 = num("l2");
    r.elapsed_seconds = j.at("elapsed_seconds").get<double>();
    for (const auto& [k, v] : j.at("parameters").items()) r.parameters[k] = v.get<std::string>();
    return r;
}

}  // namespace ivfs
