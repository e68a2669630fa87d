#ifndef SOCRATIC_REPORT_H_
#define SOCRATIC_REPORT_H_

// JSON forms of models, configurations and reports.

#include <json.hpp>

#include "socratic/discmodel.h"
#include "socratic/genmodel.h"
#include "socratic/metrics.h"
#include "socratic/socratic.h"
#include "socratic/synth.h"
#include "socratic/theory.h"

namespace socratic {

using Json = nlohmann::ordered_json;

Json to_json(const FitConfig& config);
Json to_json(const DiscConfig& config);
Json to_json(const PathOptions& options);
Json to_json(const RunConfig& config);
Json to_json(const E2EScenario& scenario);

// {"phi": [...], "w": [[...]], "selected": [...], "config": {...}}; the SP
// model has an empty w and selected.
Json gen_model_json(const GenParams& params, const FitConfig& config);
// Throws DataError on a malformed document.
GenParams gen_params_from_json(const Json& doc);

// {"theta": [...], "bias": r}
Json disc_model_json(const DiscParams& params);
DiscParams disc_params_from_json(const Json& doc);

Json to_json(const ClassificationScores& scores);
Json to_json(const ConditionReport& report);
Json to_json(const ValidationReport& report);

// Per-iteration parameters, selections (with column names), agreement and
// dev metrics.
Json run_report_json(const RunReport& report, const Dataset& dataset);

}  // namespace socratic

#endif  // SOCRATIC_REPORT_H_
