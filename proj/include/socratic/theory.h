#ifndef SOCRATIC_THEORY_H_
#define SOCRATIC_THEORY_H_

// Empirical plug-in evaluation of the support-recovery conditions for the
// difference model. With Sigma_SS = X_S^T X_S / N and
// Sigma_SSbar = X_S^T X_Sbar / N:
//
//   incoherence  ||Sigma_SSbar^T Sigma_SS^-1||_inf <= 1 - alpha
//   dependence   ||Sigma_SS^-1||_inf <= beta
//   relevance    min_i |Sigma_SS^-1 X_S^T target / N|_i >= gamma > 0
//   irrelevance  ||X_Sbar^T (Pi_S - I) target / N||_inf <= alpha gamma / beta - c
//
// where Pi_S projects onto the column space of X_S. Sample averages stand in
// for expectations, so every quantity here is "empirical".

#include <cstdint>
#include <optional>
#include <vector>

#include "socratic/data.h"
#include "socratic/diffmodel.h"

namespace socratic {

// Maximum absolute row sum.
double inf_norm(const MatrixXd& m);
// Maximum absolute entry.
double inf_norm(const VectorXd& v);

struct SigmaBlocks {
  MatrixXd sigma_ss;      // K x K
  MatrixXd sigma_s_sbar;  // K x (P - K)
  double condition_number = 0.0;
  double min_singular_value = 0.0;
};

// Throws NumericError carrying the smallest singular value when Sigma_SS is
// singular.
SigmaBlocks compute_sigmas(const MatrixXd& x_s, const MatrixXd& x_sbar);

// target - Pi_S target, via least squares on X_S.
VectorXd projection_residual(const MatrixXd& x_s, const VectorXd& target);

struct ConditionReport {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double c = 0.0;
  double irrelevant_residual_corr = 0.0;  // ||X_Sbar^T (Pi_S - I) target / N||_inf
  MatrixXd sigma_ss;
  MatrixXd sigma_s_sbar;
  double condition_number = 0.0;
  int num_objects = 0;
  int num_features = 0;  // P
  double delta = 0.0;

  bool incoherence = false;  // alpha > 0
  bool relevance = false;    // gamma > 0
  bool irrelevance = false;  // c > 0
  bool all_satisfied() const { return incoherence && relevance && irrelevance; }

  // gamma / beta - c / alpha, when positive and alpha > 0.
  std::optional<double> recommended_lambda;
  // Admissible interval [eps / alpha, gamma / beta) with eps the irrelevant
  // residual correlation; empty when alpha <= 0.
  std::optional<double> admissible_lambda_low;
  double admissible_lambda_high = 0.0;
  // Sample-size bound, when gamma > 0 and c > 0.
  std::optional<std::int64_t> n_bound;
};

// `delta` is the tolerated failure probability used for n_bound.
ConditionReport check_conditions(const MatrixXd& x_s, const MatrixXd& x_sbar,
                                 const VectorXd& target, double delta);
// Splits the feature matrix into the declared support and its complement.
ConditionReport check_conditions(const FeatureMatrixBinary& features,
                                 const DisagreementVector& target,
                                 const std::vector<int>& support, double delta);

// ceil( max(8 beta^4 / gamma^2, 32) / c^2 * ln(4 P / delta) ).
// Throws ConfigError "conditions unsatisfied" for gamma <= 0 or c <= 0.
std::int64_t sample_bound(double beta, double gamma, double c, std::int64_t p, double delta);

// gamma / beta - c / alpha. Throws ConfigError when the result is not
// positive or alpha, beta are not positive.
double recommended_lambda(double alpha, double beta, double gamma, double c);

}  // namespace socratic

#endif  // SOCRATIC_THEORY_H_
