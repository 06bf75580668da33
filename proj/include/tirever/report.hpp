#pragma once

#include "tirever/montecarlo.hpp"
#include "tirever/strategies.hpp"

#include <json.hpp>

#include <string>

namespace tirever {

inline constexpr const char* kVersion = "1.0.0";

nlohmann::json to_json(const NormalityReport& r);
nlohmann::json to_json(const MarFit& fit);
nlohmann::json to_json(const TrVerdict& v);
nlohmann::json to_json(const RrReport& r);
nlohmann::json to_json(const PipelineResult& r);
nlohmann::json to_json(const McCell& c);

/// Verdict class recorded in a serialized pipeline result ("rr" reports map
/// to irreversible/reversible at the recorded alpha).
Verdict verdict_from_json(const nlohmann::json& result, double alpha);

/// Human-readable verdict block: verdict, orders, coefficient table with
/// standard errors in parentheses, decisive statistic and p-value.
std::string render(const PipelineResult& r, const Criterion& criterion);

}  // namespace tirever
