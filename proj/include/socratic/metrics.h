#ifndef SOCRATIC_METRICS_H_
#define SOCRATIC_METRICS_H_

#include <cstdint>
#include <string>

#include "socratic/data.h"

namespace socratic {

struct ClassificationScores {
  int tp = 0;
  int fp = 0;
  int tn = 0;
  int fn = 0;
  double accuracy = 0.0;
  double precision = 0.0;  // 0 when nothing is predicted positive
  double recall = 0.0;     // 0 when nothing is truly positive
  double f1 = 0.0;         // 0 when precision + recall = 0
};

// Sign of the vote sum over non-abstaining sources. Ties, including objects
// every source abstains on, are broken by a fair coin drawn from `seed`.
HardLabelVector majority_vote(const LabelMatrix& labels, std::uint64_t seed);

ClassificationScores score(const HardLabelVector& pred, const HardLabelVector& truth,
                           int positive_class = 1);

// Harmonic mean with f1 = 0 when precision + recall = 0.
double f1_score(double precision, double recall);

// Accuracy of sign(soft) with sign(0) = +1.
double soft_label_accuracy(const ProbLabelVector& soft, const HardLabelVector& truth);

// Fraction rendered as a percentage with two decimals, e.g. 0.5592 -> "55.92".
std::string format_percent(double fraction);

}  // namespace socratic

#endif  // SOCRATIC_METRICS_H_
