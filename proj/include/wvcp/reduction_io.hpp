#pragma once

#include <json.hpp>

#include "wvcp/reduction.hpp"

namespace wvcp {

inline nlohmann::json reduction_report_json(const WeightedGraph& original,
                                            const WeightedGraph& reduced,
                                            const ReductionReport& report) {
    nlohmann::json j;
    j["instance"] = original.name();
    j["original_vertices"] = original.n();
    j["reduced_vertices"] = reduced.n();
    j["removed"] = nlohmann::json::array();
    for (const auto& r : report.removed)
        j["removed"].push_back({{"vertex", r.vertex}, {"rule", rule_name(r.rule)}});
    j["kept_to_original"] = report.kept_to_original;
    return j;
}

}  // namespace wvcp
