#include "socratic/theory.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "socratic/error.h"

namespace socratic {

double inf_norm(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double inf_norm(const VectorXd& v) {
  if (v.size() == 0) return 0.0;
  return v.cwiseAbs().maxCoeff();
}

SigmaBlocks compute_sigmas(const MatrixXd& x_s, const MatrixXd& x_sbar) {
  if (x_s.cols() < 1) throw ConfigError("support must contain at least one feature");
  if (x_sbar.cols() > 0 && x_sbar.rows() != x_s.rows()) {
    throw DataError("relevant and irrelevant feature blocks differ in row count");
  }
  const double n = static_cast<double>(x_s.rows());
  SigmaBlocks out;
  out.sigma_ss = x_s.transpose() * x_s / n;
  out.sigma_s_sbar = x_s.transpose() * x_sbar / n;

  const Eigen::JacobiSVD<MatrixXd> svd(out.sigma_ss);
  const VectorXd& sv = svd.singularValues();
  out.min_singular_value = sv[sv.size() - 1];
  const double largest = sv[0];
  if (!(out.min_singular_value > 1e-10 * std::max(1.0, largest))) {
    std::ostringstream msg;
    msg << "singular Sigma_SS (smallest singular value " << out.min_singular_value << ")";
    throw NumericError(msg.str());
  }
  out.condition_number = largest / out.min_singular_value;
  return out;
}

VectorXd projection_residual(const MatrixXd& x_s, const VectorXd& target) {
  const VectorXd coef = x_s.colPivHouseholderQr().solve(target);
  return target - x_s * coef;
}

ConditionReport check_conditions(const MatrixXd& x_s, const MatrixXd& x_sbar,
                                 const VectorXd& target, double delta) {
  if (target.size() != x_s.rows()) {
    throw DataError("target length does not match feature row count");
  }
  const SigmaBlocks sig = compute_sigmas(x_s, x_sbar);
  const double n = static_cast<double>(x_s.rows());
  const MatrixXd inv = sig.sigma_ss.partialPivLu().inverse();

  ConditionReport r;
  r.sigma_ss = sig.sigma_ss;
  r.sigma_s_sbar = sig.sigma_s_sbar;
  r.condition_number = sig.condition_number;
  r.num_objects = static_cast<int>(x_s.rows());
  r.num_features = static_cast<int>(x_s.cols() + x_sbar.cols());
  r.delta = delta;

  r.alpha = 1.0 - inf_norm(MatrixXd(sig.sigma_s_sbar.transpose() * inv));
  r.beta = inf_norm(inv);
  const VectorXd weights = inv * (x_s.transpose() * target / n);
  r.gamma = weights.cwiseAbs().minCoeff();
  const VectorXd residual = projection_residual(x_s, target);
  r.irrelevant_residual_corr =
      x_sbar.cols() > 0 ? inf_norm(VectorXd(x_sbar.transpose() * residual / n)) : 0.0;
  r.c = r.alpha * r.gamma / r.beta - r.irrelevant_residual_corr;

  r.incoherence = r.alpha > 0.0;
  r.relevance = r.gamma > 0.0;
  r.irrelevance = r.c > 0.0;

  r.admissible_lambda_high = r.gamma / r.beta;
  if (r.alpha > 0.0) {
    r.admissible_lambda_low = r.irrelevant_residual_corr / r.alpha;
    const double lam = r.gamma / r.beta - r.c / r.alpha;
    if (lam > 0.0) r.recommended_lambda = lam;
  }
  if (r.relevance && r.irrelevance && delta > 0.0 && delta < 1.0) {
    r.n_bound = sample_bound(r.beta, r.gamma, r.c, r.num_features, delta);
  }
  return r;
}

ConditionReport check_conditions(const FeatureMatrixBinary& features,
                                 const DisagreementVector& target,
                                 const std::vector<int>& support, double delta) {
  if (target.size() != features.num_objects()) {
    throw DataError("disagreement has " + std::to_string(target.size()) +
                    " objects, features have " + std::to_string(features.num_objects()));
  }
  std::vector<bool> in_support(static_cast<std::size_t>(features.num_features()), false);
  for (int j : support) {
    if (j < 0 || j >= features.num_features()) {
      throw DataError("support index " + std::to_string(j) + " out of range");
    }
    if (in_support[j]) throw DataError("support index " + std::to_string(j) + " repeated");
    in_support[j] = true;
  }
  std::vector<int> rest;
  for (int j = 0; j < features.num_features(); ++j) {
    if (!in_support[j]) rest.push_back(j);
  }
  return check_conditions(features.columns(support), features.columns(rest), target.values(),
                          delta);
}

std::int64_t sample_bound(double beta, double gamma, double c, std::int64_t p, double delta) {
  if (!(gamma > 0.0) || !(c > 0.0)) throw ConfigError("conditions unsatisfied");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
  if (p < 1) throw ConfigError("feature count must be >= 1");
  const double lead = std::max(8.0 * std::pow(beta, 4) / (gamma * gamma), 32.0);
  const double bound =
      std::ceil(lead / (c * c) * std::log(4.0 * static_cast<double>(p) / delta));
  if (!(bound < static_cast<double>(std::numeric_limits<std::int64_t>::max()))) {
    throw NumericError("sample bound exceeds the representable range");
  }
  return static_cast<std::int64_t>(bound);
}

double recommended_lambda(double alpha, double beta, double gamma, double c) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw ConfigError("alpha and beta must be > 0");
  const double lam = gamma / beta - c / alpha;
  if (!(lam > 0.0)) throw ConfigError("no admissible lambda; conditions too weak");
  return lam;
}

}  // namespace socratic
