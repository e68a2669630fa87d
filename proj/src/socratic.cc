#include "socratic/socratic.h"

#include <algorithm>

#include "socratic/error.h"
#include "socratic/metrics.h"

namespace socratic {
namespace {

struct Stage {
  ProbLabelVector gen_labels;
  DiscParams disc;
  double disc_loss;
  HardLabelVector disc_labels;
};

Stage discriminate(const FeatureMatrixReal& v, ProbLabelVector gen_labels,
                   const DiscConfig& config) {
  DiscFitTrace trace;
  DiscParams disc = fit_disc(v, gen_labels, config, &trace);
  HardLabelVector disc_labels = predict(disc, v).labels;
  return {std::move(gen_labels), std::move(disc), trace.final_loss, std::move(disc_labels)};
}

std::optional<double> dev_score(const HardLabelVector& pred, const Dataset& dataset,
                                DevMetric metric) {
  if (!dataset.truth) return std::nullopt;
  const ClassificationScores s = score(pred, *dataset.truth);
  return metric == DevMetric::kF1 ? s.f1 : s.accuracy;
}

}  // namespace

const char* to_string(DevMetric metric) {
  return metric == DevMetric::kF1 ? "f1" : "accuracy";
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kMetricDeclined:
      return "metric_declined";
    case StopReason::kKMax:
      return "k_max";
    case StopReason::kPathExhausted:
      return "path_exhausted";
  }
  return "unknown";
}

void RunConfig::validate() const {
  if (k_max < 0) throw ConfigError("k_max must be >= 0");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  gen.validate();
  disc.validate();
  path.validate();
}

double agreement_rate(const ProbLabelVector& gen_labels, const HardLabelVector& disc_labels) {
  if (gen_labels.size() != disc_labels.size()) {
    throw DataError("generative labels have " + std::to_string(gen_labels.size()) +
                    " entries, discriminative labels have " + std::to_string(disc_labels.size()));
  }
  if (gen_labels.size() == 0) return 0.0;
  int agree = 0;
  for (int o = 0; o < gen_labels.size(); ++o) {
    const double sign = gen_labels[o] >= 0.0 ? 1.0 : -1.0;
    if (sign * disc_labels[o] > 0.0) ++agree;
  }
  return static_cast<double>(agree) / gen_labels.size();
}

bool stopping_rule(const std::vector<double>& history, int patience) {
  if (history.empty()) throw ConfigError("stopping rule needs a non-empty history");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  const auto size = static_cast<int>(history.size());
  if (size <= patience) return false;
  for (int i = size - patience; i < size; ++i) {
    const double before = *std::max_element(history.begin(), history.begin() + i);
    if (history[i] > before) return false;
  }
  return true;
}

RunReport run(const Dataset& dataset, const RunConfig& config) {
  config.validate();
  const ValidationReport validation = validate(dataset);
  for (const auto& f : validation.findings) {
    if (f.severity == ValidationFinding::Severity::kFatal) throw DataError(f.message);
  }
  if (!dataset.real_features) throw DataError("run requires real-valued features");

  const FeatureMatrixReal v = config.standardize
                                  ? Standardization::fit(*dataset.real_features)
                                        .apply(*dataset.real_features)
                                  : *dataset.real_features;
  const LabelMatrix& labels = dataset.labels;
  const FeatureMatrixBinary& x = dataset.bin_features;

  auto make_record = [&](int k, std::vector<int> selected, GenParams params, double objective,
                         Stage stage) {
    IterationRecord r{k,
                      std::move(selected),
                      agreement_rate(stage.gen_labels, stage.disc_labels),
                      dev_score(stage.disc_labels, dataset, config.dev_metric),
                      std::move(params),
                      std::move(stage.disc),
                      objective,
                      stage.disc_loss,
                      std::move(stage.gen_labels),
                      std::move(stage.disc_labels)};
    return r;
  };

  FitTrace trace;
  GenParamsSP sp = fit_sp(labels, config.gen, &trace);
  Stage base = discriminate(v, label_sp(sp, labels), config.disc);
  std::vector<IterationRecord> iterations;
  iterations.push_back(make_record(0, {}, sp, trace.final_objective, std::move(base)));

  auto build_path = [&](const IterationRecord& from) -> std::optional<RegPath> {
    try {
      return regularization_path(x, disagreement(from.gen_labels, from.disc_labels), config.path);
    } catch (const DataError&) {
      return std::nullopt;  // no disagreement signal
    }
  };
  std::optional<RegPath> path = build_path(iterations.front());

  RunReport report{{}, 0, StopReason::kKMax, std::nullopt, {}, iterations.front().gen_labels};
  if (path) {
    report.lambda_max = path->lambdas.front();
    report.entry_order = path->entry_order;
  }

  std::vector<double> history = {iterations.front().tracked_metric()};
  for (int k = 1; k <= config.k_max; ++k) {
    bool truncated = true;
    std::vector<int> selected;
    if (path) selected = select_features(*path, k, &truncated);
    if (truncated) {
      report.stop_reason = StopReason::kPathExhausted;
      break;
    }
    GenParamsAug aug = fit_aug(labels, x, selected, config.gen, &trace);
    Stage stage = discriminate(v, label_aug(aug, labels, x), config.disc);
    iterations.push_back(
        make_record(k, std::move(selected), std::move(aug), trace.final_objective, std::move(stage)));
    history.push_back(iterations.back().tracked_metric());
    if (stopping_rule(history, config.patience)) {
      report.stop_reason = StopReason::kMetricDeclined;
      break;
    }
    if (config.refresh_disagreement) path = build_path(iterations.back());
  }

  int best = 0;
  for (std::size_t i = 1; i < iterations.size(); ++i) {
    if (iterations[i].tracked_metric() > iterations[best].tracked_metric()) {
      best = static_cast<int>(i);
    }
  }
  report.best_k = iterations[best].k;
  report.final_labels = iterations[best].gen_labels;
  report.iterations = std::move(iterations);
  return report;
}

}  // namespace socratic
