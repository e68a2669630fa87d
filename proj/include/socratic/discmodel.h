#ifndef SOCRATIC_DISCMODEL_H_
#define SOCRATIC_DISCMODEL_H_

// Noise-aware logistic regression trained on soft labels. With
// p_o = (1 + E[Y_o]) / 2 and score s_o = theta^T v_o + bias the per-object
// loss is the expected logistic loss
//
//   p_o log(1 + exp(-s_o)) + (1 - p_o) log(1 + exp(s_o)),
//
// averaged over objects, plus (l2 / 2) ||theta||^2 (the bias is unpenalized).

#include <cstdint>

#include "socratic/data.h"

namespace socratic {

struct DiscParams {
  VectorXd theta;
  double bias = 0.0;
};

struct DiscConfig {
  double learning_rate = 0.5;
  int max_iters = 2000;
  double grad_tol = 1e-6;
  double l2 = 0.01;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct DiscFitTrace {
  int iterations = 0;
  bool converged = false;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double final_grad_norm = 0.0;
};

// log(1 + exp(x)) without overflow.
double softplus(double x);

double noise_aware_loss(const DiscParams& params, const FeatureMatrixReal& features,
                        const ProbLabelVector& soft_labels, double l2);
// Gradient in the same shape as the parameters.
DiscParams noise_aware_grad(const DiscParams& params, const FeatureMatrixReal& features,
                            const ProbLabelVector& soft_labels, double l2);

DiscParams fit_disc(const FeatureMatrixReal& features, const ProbLabelVector& soft_labels,
                    const DiscConfig& config, DiscFitTrace* trace = nullptr);

struct Prediction {
  HardLabelVector labels;
  VectorXd scores;
};

// sign(theta^T v + bias) with sign(0) = +1.
Prediction predict(const DiscParams& params, const FeatureMatrixReal& features);

// Column z-scoring estimated on training data. Constant columns keep scale 1.
struct Standardization {
  VectorXd mean;
  VectorXd scale;

  static Standardization fit(const FeatureMatrixReal& train);
  FeatureMatrixReal apply(const FeatureMatrixReal& features) const;
};

}  // namespace socratic

#endif  // SOCRATIC_DISCMODEL_H_
