#include "socratic/metrics.h"

#include <cstdio>

#include "socratic/error.h"
#include "socratic/rng.h"

namespace socratic {

HardLabelVector majority_vote(const LabelMatrix& labels, std::uint64_t seed) {
  Rng rng(seed);
  const VectorXd sums = labels.votes().colwise().sum().transpose();
  VectorXd out(sums.size());
  for (Eigen::Index o = 0; o < sums.size(); ++o) {
    if (sums[o] > 0) {
      out[o] = 1.0;
    } else if (sums[o] < 0) {
      out[o] = -1.0;
    } else {
      out[o] = rng.sign();
    }
  }
  return HardLabelVector(std::move(out), labels.object_ids());
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

ClassificationScores score(const HardLabelVector& pred, const HardLabelVector& truth,
                           int positive_class) {
  if (pred.size() != truth.size()) {
    throw DataError("predictions have " + std::to_string(pred.size()) + " entries, truth has " +
                    std::to_string(truth.size()));
  }
  if (positive_class != 1 && positive_class != -1) {
    throw ConfigError("positive_class must be +1 or -1");
  }
  ClassificationScores s;
  for (int o = 0; o < pred.size(); ++o) {
    const bool p = pred[o] == positive_class;
    const bool t = truth[o] == positive_class;
    if (p && t) ++s.tp;
    if (p && !t) ++s.fp;
    if (!p && !t) ++s.tn;
    if (!p && t) ++s.fn;
  }
  const int n = pred.size();
  s.accuracy = n > 0 ? static_cast<double>(s.tp + s.tn) / n : 0.0;
  s.precision = s.tp + s.fp > 0 ? static_cast<double>(s.tp) / (s.tp + s.fp) : 0.0;
  s.recall = s.tp + s.fn > 0 ? static_cast<double>(s.tp) / (s.tp + s.fn) : 0.0;
  s.f1 = f1_score(s.precision, s.recall);
  return s;
}

double soft_label_accuracy(const ProbLabelVector& soft, const HardLabelVector& truth) {
  if (soft.size() != truth.size()) {
    throw DataError("soft labels have " + std::to_string(soft.size()) + " entries, truth has " +
                    std::to_string(truth.size()));
  }
  if (soft.size() == 0) return 0.0;
  int correct = 0;
  for (int o = 0; o < soft.size(); ++o) {
    const double sign = soft[o] >= 0.0 ? 1.0 : -1.0;
    if (sign == truth[o]) ++correct;
  }
  return static_cast<double>(correct) / soft.size();
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * fraction);
  return buf;
}

}  // namespace socratic
