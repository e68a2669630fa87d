#ifndef SOCRATIC_GENMODEL_H_
#define SOCRATIC_GENMODEL_H_

// Generative label models over labeling-function votes.
//
// Single-parameter (SP) model, per object with votes l in {-1,0,1}^M and
// latent class y in {-1,+1}:
//
//   pi(l, y) = exp(y * phi^T l) / Z(phi),
//   log Z(phi) = log 2 + sum_j log(2 cosh(phi_j) + 1).
//
// Z factorizes because there are no cross-source factors, so likelihoods,
// gradients and posteriors are exact and O(M) per object.
//
// The augmented model replaces phi with a per-object effective accuracy
// phi + sum_i x_i W_i, where x are selected binary features of the object.
// It is fit conditionally on x (x is an observed covariate).

#include <cstdint>
#include <vector>

#include "socratic/data.h"

namespace socratic {

struct FitConfig {
  double learning_rate = 0.1;
  int max_iters = 2000;
  double grad_tol = 1e-6;
  // Positive initial accuracy breaks the phi -> -phi symmetry of the marginal.
  double phi_init = 0.5;
  double w_l2 = 0.01;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct GenParamsSP {
  VectorXd phi;
};

struct GenParamsAug {
  VectorXd phi;
  MatrixXd w;                 // K x M; row i adjusts accuracies for feature selected[i]
  std::vector<int> selected;  // columns of the binary feature matrix

  int num_selected() const { return static_cast<int>(selected.size()); }
};

// Diagnostics from a gradient-ascent fit.
struct FitTrace {
  int iterations = 0;
  bool converged = false;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  double final_grad_norm = 0.0;      // infinity norm
  std::vector<int> frozen_sources;  // all-abstain sources kept at phi_init
};

// log(2 cosh x), stable for large |x|.
double log_two_cosh(double x);
// log(2 cosh x + 1): the per-source factor of Z.
double log_source_partition(double x);
// d/dx log(2 cosh x + 1) = 2 sinh x / (2 cosh x + 1).
double d_log_source_partition(double x);

double log_partition(const VectorXd& phi);
double log_partition_sp(const GenParamsSP& params);

// Mean per-object log marginal likelihood of the votes.
double marginal_loglik_sp(const GenParamsSP& params, const LabelMatrix& labels);
VectorXd grad_marginal_sp(const GenParamsSP& params, const LabelMatrix& labels);

GenParamsSP fit_sp(const LabelMatrix& labels, const FitConfig& config, FitTrace* trace = nullptr);

// P(Y = +1 | votes) = sigmoid(2 phi^T l).
double posterior_sp(const GenParamsSP& params, const VectorXd& vote_column);
// E[Y | votes] = tanh(phi^T l) per object.
ProbLabelVector label_sp(const GenParamsSP& params, const LabelMatrix& labels);

VectorXd effective_phi(const GenParamsAug& params, const VectorXd& feature_row);
// N x M matrix whose row o is the effective accuracy vector of object o.
MatrixXd effective_phi_all(const GenParamsAug& params, const FeatureMatrixBinary& features);

struct AugGradient {
  VectorXd phi;
  MatrixXd w;
};

// Mean per-object conditional log-likelihood minus (w_l2 / 2) ||W||^2.
double marginal_loglik_aug(const GenParamsAug& params, const LabelMatrix& labels,
                           const FeatureMatrixBinary& features, double w_l2);
AugGradient grad_marginal_aug(const GenParamsAug& params, const LabelMatrix& labels,
                              const FeatureMatrixBinary& features, double w_l2);

GenParamsAug fit_aug(const LabelMatrix& labels, const FeatureMatrixBinary& features,
                     const std::vector<int>& selected, const FitConfig& config,
                     FitTrace* trace = nullptr);

ProbLabelVector label_aug(const GenParamsAug& params, const LabelMatrix& labels,
                          const FeatureMatrixBinary& features);

// Exhaustive table of the SP joint over all (l, y) for small M; used as an
// oracle for the factorized computations.
class JointTable {
 public:
  static constexpr int kMaxSources = 8;

  // Throws ConfigError when M > kMaxSources.
  explicit JointTable(const VectorXd& phi);

  int num_sources() const { return num_sources_; }
  int num_states() const { return static_cast<int>(prob_.size()); }
  // State s encodes y in its lowest bit and the votes in base 3 above it.
  VectorXd votes_of(int state) const;
  int label_of(int state) const { return (state & 1) ? 1 : -1; }
  double probability(int state) const { return prob_[state]; }

  double log_partition() const { return log_partition_; }
  double marginal(const VectorXd& votes) const;        // P(l)
  double posterior_positive(const VectorXd& votes) const;  // P(y=+1 | l)

 private:
  int state_of(const VectorXd& votes, int y) const;

  int num_sources_;
  double log_partition_;
  std::vector<double> prob_;
};

JointTable brute_force_joint(const VectorXd& phi_eff);

}  // namespace socratic

#endif  // SOCRATIC_GENMODEL_H_
