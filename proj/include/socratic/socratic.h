#ifndef SOCRATIC_SOCRATIC_H_
#define SOCRATIC_SOCRATIC_H_

// The generative/discriminative dialogue loop:
//
//   fit SP generative model -> soft labels Y_G -> fit discriminative model
//   -> hard labels Y_D -> disagreement -Y_G Y_D -> LASSO path on binary
//   features; then for K = 1, 2, ...: take the first K path features, fit the
//   augmented generative model, relabel, refit the discriminative model and
//   record metrics, until the tracked metric stops improving.
//
// The tracked metric is the discriminative model's dev score when the dataset
// carries truth, else the generative/discriminative agreement rate.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "socratic/data.h"
#include "socratic/diffmodel.h"
#include "socratic/discmodel.h"
#include "socratic/genmodel.h"

namespace socratic {

enum class DevMetric { kAccuracy, kF1 };

enum class StopReason { kMetricDeclined, kKMax, kPathExhausted };

const char* to_string(DevMetric metric);
const char* to_string(StopReason reason);

struct RunConfig {
  int k_max = 10;
  int patience = 1;
  DevMetric dev_metric = DevMetric::kAccuracy;
  FitConfig gen;
  DiscConfig disc;
  PathOptions path;
  bool standardize = false;  // z-score real features on the training data
  // Recompute the disagreement and path from each K's models instead of once
  // from the K = 0 models. Off by default; selections then need not nest.
  bool refresh_disagreement = false;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

using GenParams = std::variant<GenParamsSP, GenParamsAug>;

struct IterationRecord {
  int k = 0;
  std::vector<int> selected;
  double agreement = 0.0;
  std::optional<double> dev_metric;
  GenParams gen_params;
  DiscParams disc_params;
  double gen_objective = 0.0;  // final (penalized) mean log-likelihood
  double disc_loss = 0.0;
  ProbLabelVector gen_labels;
  HardLabelVector disc_labels;

  double tracked_metric() const { return dev_metric ? *dev_metric : agreement; }
};

struct RunReport {
  std::vector<IterationRecord> iterations;  // k = 0, 1, ...
  int best_k = 0;
  StopReason stop_reason = StopReason::kKMax;
  std::optional<double> lambda_max;  // of the K = 0 disagreement
  std::vector<int> entry_order;      // of the K = 0 path
  ProbLabelVector final_labels;
};

// Fraction of objects where sign(Y_G) agrees with Y_D, with sign(0) = +1.
double agreement_rate(const ProbLabelVector& gen_labels, const HardLabelVector& disc_labels);

// True when each of the last `patience` values fails to exceed the maximum of
// all values before it.
bool stopping_rule(const std::vector<double>& history, int patience);

RunReport run(const Dataset& dataset, const RunConfig& config);

}  // namespace socratic

#endif  // SOCRATIC_SOCRATIC_H_
