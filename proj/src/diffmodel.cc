#include "socratic/diffmodel.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "socratic/csv.h"
#include "socratic/error.h"

namespace socratic {
namespace {

void check_pair(const FeatureMatrixBinary& features, const DisagreementVector& target) {
  if (features.num_objects() != target.size()) {
    throw DataError("binary features have " + std::to_string(features.num_objects()) +
                    " objects, disagreement has " + std::to_string(target.size()));
  }
}

std::vector<int> nonzero_indices(const VectorXd& coef) {
  std::vector<int> out;
  for (Eigen::Index j = 0; j < coef.size(); ++j) {
    if (coef[j] != 0.0) out.push_back(static_cast<int>(j));
  }
  return out;
}

// Violation of the optimality conditions given gradient g of the smooth part.
double kkt_violation(const VectorXd& g, const VectorXd& coef, double lambda) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < coef.size(); ++j) {
    const double v = coef[j] == 0.0 ? std::max(0.0, std::abs(g[j]) - lambda)
                                    : std::abs(g[j] + (coef[j] > 0 ? lambda : -lambda));
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

DisagreementVector::DisagreementVector(VectorXd values, std::vector<std::string> object_ids)
    : values_(std::move(values)), object_ids_(std::move(object_ids)) {
  if (!values_.allFinite()) throw DataError("disagreement: non-finite entry");
  if ((values_.array().abs() > 1.0).any()) throw DataError("disagreement: entries must lie in [-1,1]");
  if (!object_ids_.empty() && static_cast<int>(object_ids_.size()) != size()) {
    throw DataError("disagreement: object id count does not match length");
  }
}

DisagreementVector disagreement(const ProbLabelVector& gen_labels,
                                const HardLabelVector& disc_labels) {
  if (gen_labels.size() != disc_labels.size()) {
    throw DataError("generative labels have " + std::to_string(gen_labels.size()) +
                    " entries, discriminative labels have " + std::to_string(disc_labels.size()));
  }
  VectorXd v = -(gen_labels.expected().array() * disc_labels.values().array()).matrix();
  return DisagreementVector(std::move(v), gen_labels.object_ids());
}

DisagreementVector load_disagreement(std::istream& in, const std::string& source) {
  const CsvTable table = read_csv(in, source);
  if (table.header.empty() || table.header[0] != "object_id") {
    throw DataError(source + ": first header column must be object_id");
  }
  if (table.rows.empty()) throw DataError(source + ": no objects");
  const int col = table.column_index("disagreement");
  if (col < 0) throw DataError(source + ": missing column disagreement");
  VectorXd v(static_cast<Eigen::Index>(table.rows.size()));
  std::vector<std::string> ids;
  for (std::size_t o = 0; o < table.rows.size(); ++o) {
    const auto& cell = table.rows[o][col];
    const auto x = parse_real(cell);
    if (!x || !(std::abs(*x) <= 1.0)) table.fail(o, col, "value '" + cell + "' not in [-1,1]");
    v[static_cast<Eigen::Index>(o)] = *x;
    ids.push_back(table.rows[o][0]);
  }
  return DisagreementVector(std::move(v), std::move(ids));
}

void write_disagreement(std::ostream& out, const DisagreementVector& target) {
  out << "object_id,disagreement\n";
  for (int o = 0; o < target.size(); ++o) {
    out << object_id_at(target.object_ids(), o) << ',' << format_real(target[o]) << '\n';
  }
}

double soft_threshold(double x, double lambda) {
  if (x > lambda) return x - lambda;
  if (x < -lambda) return x + lambda;
  return 0.0;
}

LassoProblem::LassoProblem(const FeatureMatrixBinary& features, const DisagreementVector& target)
    : n_(features.num_objects()) {
  check_pair(features, target);
  const auto& x = features.values();
  const double n = static_cast<double>(n_);
  const Eigen::Index p = x.cols();
  gram_ = MatrixXd::Zero(p, p);
  gram_.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), 1.0 / n);
  gram_.triangularView<Eigen::StrictlyUpper>() = gram_.transpose();
  corr_ = x.transpose() * target.values() / n;
  target_sq_ = target.values().squaredNorm() / n;
}

double LassoProblem::lambda_max() const {
  return corr_.size() ? corr_.lpNorm<Eigen::Infinity>() : 0.0;
}

double LassoProblem::objective(const VectorXd& coef, double lambda) const {
  const double quad = coef.dot(gram_ * coef) - 2.0 * coef.dot(corr_) + target_sq_;
  return 0.5 * quad + lambda * coef.lpNorm<1>();
}

double LassoProblem::kkt_residual(const VectorXd& coef, double lambda) const {
  return kkt_violation(gram_ * coef - corr_, coef, lambda);
}

LassoFit LassoProblem::solve(double lambda, const LassoOptions& options,
                             const VectorXd& warm_start) const {
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (!(options.tol > 0.0)) throw ConfigError("lasso tol must be > 0");
  const Eigen::Index p = gram_.rows();
  LassoFit fit;
  fit.lambda = lambda;
  fit.coef = warm_start.size() == p ? warm_start : VectorXd::Zero(p);

  // h = X^T (target - X coef) / N, maintained under coordinate updates.
  VectorXd h = corr_ - gram_ * fit.coef;
  for (fit.sweeps = 0; fit.sweeps < options.max_sweeps;) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double z = gram_(j, j);
      const double old = fit.coef[j];
      const double updated = soft_threshold(h[j] + z * old, lambda) / z;
      const double delta = updated - old;
      if (delta != 0.0) {
        h.noalias() -= gram_.col(j) * delta;
        fit.coef[j] = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    ++fit.sweeps;
    if (options.record_objective) fit.objective_trace.push_back(objective(fit.coef, lambda));
    if (max_change < options.tol) {
      // Refresh the running gradient to shed accumulated rounding, then
      // require the optimality conditions as well.
      h = corr_ - gram_ * fit.coef;
      if (kkt_violation(-h, fit.coef, lambda) <= options.tol) {
        fit.converged = true;
        break;
      }
    }
  }
  fit.active_set = nonzero_indices(fit.coef);
  fit.kkt_residual = kkt_residual(fit.coef, lambda);
  return fit;
}

double lambda_max(const FeatureMatrixBinary& features, const DisagreementVector& target) {
  check_pair(features, target);
  const VectorXd corr = features.values().transpose() * target.values() /
                        static_cast<double>(features.num_objects());
  return corr.lpNorm<Eigen::Infinity>();
}

LassoFit lasso_fit(const FeatureMatrixBinary& features, const DisagreementVector& target,
                   double lambda, double tol) {
  LassoOptions options;
  options.tol = tol;
  return lasso_fit(features, target, lambda, options);
}

LassoFit lasso_fit(const FeatureMatrixBinary& features, const DisagreementVector& target,
                   double lambda, const LassoOptions& options) {
  LassoFit fit = LassoProblem(features, target).solve(lambda, options);
  fit.kkt_residual = kkt_residual(features, target, fit.coef, lambda);
  return fit;
}

double kkt_residual(const FeatureMatrixBinary& features, const DisagreementVector& target,
                    const VectorXd& coef, double lambda) {
  check_pair(features, target);
  if (coef.size() != features.num_features()) {
    throw DataError("coefficient vector length does not match feature count");
  }
  const auto& x = features.values();
  const VectorXd g = x.transpose() * (x * coef - target.values()) /
                     static_cast<double>(features.num_objects());
  return kkt_violation(g, coef, lambda);
}

double kkt_residual(const FeatureMatrixBinary& features, const DisagreementVector& target,
                    const LassoFit& fit) {
  return kkt_residual(features, target, fit.coef, fit.lambda);
}

double unnormalized_lambda(double lambda, int num_objects) {
  return 2.0 * static_cast<double>(num_objects) * lambda;
}

void PathOptions::validate() const {
  if (grid_size < 2) throw ConfigError("grid_size must be >= 2");
  if (!(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0)) {
    throw ConfigError("lambda_min_ratio must lie in (0,1)");
  }
  if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
  if (max_sweeps < 1) throw ConfigError("max_sweeps must be >= 1");
  if (max_entries < 0) throw ConfigError("max_entries must be >= 0");
}

RegPath regularization_path(const FeatureMatrixBinary& features, const DisagreementVector& target,
                            const PathOptions& options) {
  options.validate();
  const LassoProblem problem(features, target);
  const double top = problem.lambda_max();
  if (!(top > 0.0)) throw DataError("no disagreement signal");

  RegPath path;
  const double denom = static_cast<double>(options.grid_size - 1);
  for (int k = 0; k < options.grid_size; ++k) {
    path.lambdas.push_back(top * std::pow(options.lambda_min_ratio, k / denom));
  }

  LassoOptions lasso;
  lasso.tol = options.tol;
  lasso.max_sweeps = options.max_sweeps;
  std::vector<bool> entered(static_cast<std::size_t>(problem.num_features()), false);
  VectorXd warm;
  for (int k = 0; k < options.grid_size; ++k) {
    LassoFit fit = problem.solve(path.lambdas[k], lasso, warm);
    warm = fit.coef;

    std::vector<int> fresh;
    for (int j : fit.active_set) {
      if (!entered[j]) fresh.push_back(j);
    }
    std::sort(fresh.begin(), fresh.end(), [&](int a, int b) {
      const double ca = std::abs(fit.coef[a]);
      const double cb = std::abs(fit.coef[b]);
      return ca != cb ? ca > cb : a < b;
    });
    for (int j : fresh) {
      entered[j] = true;
      path.entry_order.push_back(j);
      path.entry_grid_index.push_back(k);
    }
    path.fits.push_back(std::move(fit));
    if (options.max_entries > 0 &&
        static_cast<int>(path.entry_order.size()) >= options.max_entries) {
      path.lambdas.resize(path.fits.size());
      break;
    }
  }
  return path;
}

std::vector<int> select_features(const RegPath& path, int k, bool* truncated) {
  if (k < 1) throw ConfigError("number of features to select must be >= 1");
  if (path.fits.empty()) throw DataError("empty regularization path");
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(k), path.entry_order.size());
  if (truncated) *truncated = count < static_cast<std::size_t>(k);
  return {path.entry_order.begin(), path.entry_order.begin() + static_cast<std::ptrdiff_t>(count)};
}

}  // namespace socratic
