#include "socratic/discmodel.h"

#include <cmath>
#include <string>

#include "socratic/error.h"

namespace socratic {
namespace {

void check_dims(const DiscParams& params, const FeatureMatrixReal& features) {
  if (params.theta.size() != features.num_features()) {
    throw DataError("theta has " + std::to_string(params.theta.size()) +
                    " entries, features have " + std::to_string(features.num_features()) +
                    " columns");
  }
}

void check_dims(const DiscParams& params, const FeatureMatrixReal& features,
                const ProbLabelVector& soft_labels) {
  check_dims(params, features);
  if (soft_labels.size() != features.num_objects()) {
    throw DataError("soft labels have " + std::to_string(soft_labels.size()) +
                    " objects, features have " + std::to_string(features.num_objects()));
  }
}

VectorXd scores_of(const DiscParams& params, const FeatureMatrixReal& features) {
  return (features.values() * params.theta).array() + params.bias;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

void DiscConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (max_iters < 0) throw ConfigError("max_iters must be >= 0");
  if (!(grad_tol > 0.0)) throw ConfigError("grad_tol must be > 0");
  if (!(l2 >= 0.0)) throw ConfigError("l2 must be >= 0");
}

double softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double noise_aware_loss(const DiscParams& params, const FeatureMatrixReal& features,
                        const ProbLabelVector& soft_labels, double l2) {
  check_dims(params, features, soft_labels);
  const VectorXd s = scores_of(params, features);
  double total = 0.0;
  for (Eigen::Index o = 0; o < s.size(); ++o) {
    const double p = soft_labels.probability(static_cast<int>(o));
    total += p * softplus(-s[o]) + (1.0 - p) * softplus(s[o]);
  }
  return total / static_cast<double>(s.size()) + 0.5 * l2 * params.theta.squaredNorm();
}

DiscParams noise_aware_grad(const DiscParams& params, const FeatureMatrixReal& features,
                            const ProbLabelVector& soft_labels, double l2) {
  check_dims(params, features, soft_labels);
  const VectorXd s = scores_of(params, features);
  VectorXd r(s.size());  // d loss_o / d s_o = sigmoid(s_o) - p_o
  for (Eigen::Index o = 0; o < s.size(); ++o) {
    r[o] = sigmoid(s[o]) - soft_labels.probability(static_cast<int>(o));
  }
  const double n = static_cast<double>(s.size());
  DiscParams g;
  g.theta = features.values().transpose() * r / n + l2 * params.theta;
  g.bias = r.sum() / n;
  return g;
}

DiscParams fit_disc(const FeatureMatrixReal& features, const ProbLabelVector& soft_labels,
                    const DiscConfig& config, DiscFitTrace* trace) {
  config.validate();
  constexpr int kMaxHalvings = 40;
  DiscParams params{VectorXd::Zero(features.num_features()), 0.0};
  auto loss_at = [&](const DiscParams& p, int iter) {
    const double f = noise_aware_loss(p, features, soft_labels, config.l2);
    if (!std::isfinite(f)) {
      throw NumericError("non-finite discriminative loss at iteration " + std::to_string(iter));
    }
    return f;
  };
  double f = loss_at(params, 0);
  DiscFitTrace local;
  local.initial_loss = f;
  int iter = 0;
  double grad_norm = 0.0;
  for (; iter < config.max_iters; ++iter) {
    const DiscParams g = noise_aware_grad(params, features, soft_labels, config.l2);
    grad_norm = std::max(g.theta.size() ? g.theta.lpNorm<Eigen::Infinity>() : 0.0,
                         std::abs(g.bias));
    if (grad_norm < config.grad_tol) {
      local.converged = true;
      break;
    }
    // Descent with step halving; the loss never increases.
    double step = config.learning_rate;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, step *= 0.5) {
      DiscParams candidate{params.theta - step * g.theta, params.bias - step * g.bias};
      if (candidate.theta == params.theta && candidate.bias == params.bias) break;
      const double fc = loss_at(candidate, iter + 1);
      if (fc <= f) {
        params = std::move(candidate);
        f = fc;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  local.iterations = iter;
  local.final_loss = f;
  local.final_grad_norm = grad_norm;
  if (trace) *trace = local;
  return params;
}

Prediction predict(const DiscParams& params, const FeatureMatrixReal& features) {
  check_dims(params, features);
  VectorXd scores = scores_of(params, features);
  VectorXd labels = (scores.array() >= 0.0).select(VectorXd::Ones(scores.size()),
                                                   -VectorXd::Ones(scores.size()));
  return {HardLabelVector(std::move(labels), features.object_ids()), std::move(scores)};
}

Standardization Standardization::fit(const FeatureMatrixReal& train) {
  const auto& v = train.values();
  Standardization out;
  out.mean = v.colwise().mean().transpose();
  out.scale = VectorXd::Ones(v.cols());
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    const double var = (v.col(i).array() - out.mean[i]).square().mean();
    if (var > 0.0) out.scale[i] = std::sqrt(var);
  }
  return out;
}

FeatureMatrixReal Standardization::apply(const FeatureMatrixReal& features) const {
  if (features.num_features() != mean.size()) {
    throw DataError("standardization was fit on a different number of columns");
  }
  MatrixXd v = features.values();
  v.rowwise() -= mean.transpose();
  v.array().rowwise() /= scale.transpose().array();
  return FeatureMatrixReal(std::move(v), features.column_names(), features.object_ids());
}

}  // namespace socratic
