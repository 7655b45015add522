#pragma once

// JSON forms of the domain types. Field order is fixed so that written files
// diff cleanly.

#include "json.hpp"
#include "mcqa/analysis.hpp"
#include "mcqa/core_model.hpp"

namespace mcqa {

using Json = nlohmann::ordered_json;

void to_json(Json& j, const McqItem& item);
void from_json(const Json& j, McqItem& item);

void to_json(Json& j, const PredictionRecord& record);
void from_json(const Json& j, PredictionRecord& record);

void to_json(Json& j, const CalibrationResult& result);
void from_json(const Json& j, CalibrationResult& result);

void to_json(Json& j, const QuestionMetrics& metrics);
void from_json(const Json& j, QuestionMetrics& metrics);

void to_json(Json& j, const BinRow& row);
void from_json(const Json& j, BinRow& row);

void to_json(Json& j, const MiCurveRow& row);
void from_json(const Json& j, MiCurveRow& row);

void to_json(Json& j, const FlagSet& flags);
void from_json(const Json& j, FlagSet& flags);

void to_json(Json& j, const CrossRun& run);
void from_json(const Json& j, CrossRun& run);

// ProbDist has no default state, so it gets explicit helpers.
Json dist_to_json(const ProbDist& dist);
ProbDist dist_from_json(const Json& j);

}  // namespace mcqa
