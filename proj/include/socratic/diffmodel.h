#ifndef SOCRATIC_DIFFMODEL_H_
#define SOCRATIC_DIFFMODEL_H_

// Difference model: LASSO regression of the generative/discriminative
// disagreement on binary features.
//
// The solver minimizes the normalized objective
//
//   (1 / (2N)) ||X coef - target||^2 + lambda ||coef||_1,
//
// which shares its lambda axis with the recovery conditions in theory.h.
// The unnormalized form ||X coef - target||^2 + lambda' ||coef||_1 has the
// same minimizer at lambda' = 2N lambda (see unnormalized_lambda).

#include <vector>

#include "socratic/data.h"

namespace socratic {

// -Y_G * Y_D elementwise; positive where the two models conflict.
class DisagreementVector {
 public:
  explicit DisagreementVector(VectorXd values, std::vector<std::string> object_ids = {});

  int size() const { return static_cast<int>(values_.size()); }
  const VectorXd& values() const { return values_; }
  double operator[](int i) const { return values_[i]; }
  const std::vector<std::string>& object_ids() const { return object_ids_; }

 private:
  VectorXd values_;
  std::vector<std::string> object_ids_;
};

DisagreementVector disagreement(const ProbLabelVector& gen_labels,
                                const HardLabelVector& disc_labels);

DisagreementVector load_disagreement(std::istream& in, const std::string& source = "disagreement");
// object_id,disagreement
void write_disagreement(std::ostream& out, const DisagreementVector& target);

struct LassoOptions {
  double tol = 1e-8;  // max coordinate change per sweep at convergence
  int max_sweeps = 10000;
  bool record_objective = false;
};

struct LassoFit {
  VectorXd coef;
  double lambda = 0.0;
  std::vector<int> active_set;  // indices with coef != 0, ascending
  double kkt_residual = 0.0;
  int sweeps = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // after each sweep, if recorded
};

// Sufficient statistics of one (features, target) pair: the Gram matrix
// X^T X / N and the correlations X^T target / N. Built once, reused by every
// fit along a path.
class LassoProblem {
 public:
  LassoProblem(const FeatureMatrixBinary& features, const DisagreementVector& target);

  int num_features() const { return static_cast<int>(gram_.rows()); }
  int num_objects() const { return n_; }
  const MatrixXd& gram() const { return gram_; }
  const VectorXd& correlation() const { return corr_; }
  // ||X^T target / N||_inf: the smallest lambda with an all-zero solution.
  double lambda_max() const;

  // Cyclic coordinate descent (order 0..P-1) from `warm_start` (zero when
  // empty). Converged once a sweep moves no coordinate by `tol` or more and
  // the KKT residual is at most `tol`.
  LassoFit solve(double lambda, const LassoOptions& options,
                 const VectorXd& warm_start = VectorXd()) const;

  double objective(const VectorXd& coef, double lambda) const;
  // KKT residual from the sufficient statistics (same quantity as the free
  // function kkt_residual, without touching the raw data).
  double kkt_residual(const VectorXd& coef, double lambda) const;

 private:
  int n_;
  double target_sq_;  // target^T target / N
  MatrixXd gram_;
  VectorXd corr_;
};

double soft_threshold(double x, double lambda);

double lambda_max(const FeatureMatrixBinary& features, const DisagreementVector& target);

LassoFit lasso_fit(const FeatureMatrixBinary& features, const DisagreementVector& target,
                   double lambda, double tol = 1e-8);
LassoFit lasso_fit(const FeatureMatrixBinary& features, const DisagreementVector& target,
                   double lambda, const LassoOptions& options);

// Largest violation of the optimality conditions, computed directly from the
// data: |g_j| - lambda (if positive) for zero coefficients and
// |g_j + lambda sign(coef_j)| for nonzero ones, g = X^T (X coef - target) / N.
double kkt_residual(const FeatureMatrixBinary& features, const DisagreementVector& target,
                    const VectorXd& coef, double lambda);
double kkt_residual(const FeatureMatrixBinary& features, const DisagreementVector& target,
                    const LassoFit& fit);

double unnormalized_lambda(double lambda, int num_objects);

struct PathOptions {
  int grid_size = 100;
  double lambda_min_ratio = 1e-3;
  double tol = 1e-8;
  int max_sweeps = 10000;
  // Stop descending the grid once this many features have activated
  // (0 = full path). The entry-order prefix is unaffected.
  int max_entries = 0;

  void validate() const;  // throws ConfigError
};

struct RegPath {
  std::vector<double> lambdas;       // strictly decreasing
  std::vector<int> entry_order;      // features by first activation
  std::vector<int> entry_grid_index; // grid point at which entry_order[i] activated
  std::vector<LassoFit> fits;        // one per grid point
};

// Warm-started fits over a geometric grid from lambda_max down to
// lambda_max * lambda_min_ratio. Features activating at the same grid point
// are ordered by larger |coef|, then by lower column index. Throws DataError
// "no disagreement signal" when lambda_max is zero.
RegPath regularization_path(const FeatureMatrixBinary& features, const DisagreementVector& target,
                            const PathOptions& options = {});

// First min(k, |entry_order|) features of the path. `truncated` is set when
// fewer than k features ever activated.
std::vector<int> select_features(const RegPath& path, int k, bool* truncated = nullptr);

}  // namespace socratic

#endif  // SOCRATIC_DIFFMODEL_H_
