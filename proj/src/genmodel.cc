#include "socratic/genmodel.h"

#include <cmath>
#include <functional>
#include <string>
#include <unordered_map>

#include "socratic/error.h"

namespace socratic {
namespace {

void check_votes(const VectorXd& phi, const LabelMatrix& labels) {
  if (phi.size() != labels.num_sources()) {
    throw DataError("phi has " + std::to_string(phi.size()) + " entries, label matrix has " +
                    std::to_string(labels.num_sources()) + " sources");
  }
}

void check_aug(const GenParamsAug& params, const LabelMatrix& labels,
               const FeatureMatrixBinary& features) {
  check_votes(params.phi, labels);
  if (features.num_objects() != labels.num_objects()) {
    throw DataError("binary features have " + std::to_string(features.num_objects()) +
                    " objects, label matrix has " + std::to_string(labels.num_objects()));
  }
  if (params.w.rows() != params.num_selected() || params.w.cols() != params.phi.size()) {
    throw DataError("W must be K x M with K = number of selected features");
  }
}

// Per-object score phi_eff(x_o)^T l_o for an N x M effective-accuracy matrix.
// The SP and augmented paths share these loops so that W = 0 reproduces the
// SP results bit for bit.
VectorXd object_scores(const MatrixXd& phi_eff, const MatrixXd& votes) {
  VectorXd scores(votes.cols());
  for (Eigen::Index o = 0; o < votes.cols(); ++o) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < votes.rows(); ++j) s += phi_eff(o, j) * votes(j, o);
    scores[o] = s;
  }
  return scores;
}

VectorXd object_scores(const VectorXd& phi, const MatrixXd& votes) {
  VectorXd scores(votes.cols());
  for (Eigen::Index o = 0; o < votes.cols(); ++o) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < votes.rows(); ++j) s += phi[j] * votes(j, o);
    scores[o] = s;
  }
  return scores;
}

// Mean over objects of log(2 cosh s_o) - log Z_o.
template <typename LogZ>
double mean_object_loglik(const VectorXd& scores, LogZ&& log_z) {
  double total = 0.0;
  for (Eigen::Index o = 0; o < scores.size(); ++o) total += log_two_cosh(scores[o]) - log_z(o);
  return total / static_cast<double>(scores.size());
}

// Objects grouped by their selected-feature row. Per-object partition terms
// depend only on that row, so they are computed once per distinct pattern.
struct Patterns {
  std::vector<int> of_object;
  std::vector<Eigen::Index> representative;
};

Patterns feature_patterns(const MatrixXd& xs) {
  Patterns out;
  out.of_object.resize(static_cast<std::size_t>(xs.rows()));
  if (xs.cols() > 63) {
    for (Eigen::Index o = 0; o < xs.rows(); ++o) {
      out.of_object[o] = static_cast<int>(o);
      out.representative.push_back(o);
    }
    return out;
  }
  std::unordered_map<std::uint64_t, int> seen;
  for (Eigen::Index o = 0; o < xs.rows(); ++o) {
    std::uint64_t key = 0;
    for (Eigen::Index i = 0; i < xs.cols(); ++i) key |= std::uint64_t{xs(o, i) > 0} << i;
    const auto [it, fresh] = seen.emplace(key, static_cast<int>(out.representative.size()));
    if (fresh) out.representative.push_back(o);
    out.of_object[o] = it->second;
  }
  return out;
}

std::vector<int> silent_sources(const LabelMatrix& labels) {
  std::vector<int> out;
  for (int j = 0; j < labels.num_sources(); ++j) {
    if ((labels.votes().row(j).array() == 0.0).all()) out.push_back(j);
  }
  return out;
}

// Full-batch gradient ascent. A step that lowers the objective is retried at
// half the rate, so the objective never decreases.
VectorXd ascend(VectorXd x, const std::function<double(const VectorXd&)>& objective,
                const std::function<VectorXd(const VectorXd&)>& gradient,
                const VectorXd& mask, const FitConfig& config, FitTrace* trace) {
  constexpr int kMaxHalvings = 40;
  constexpr double kNoise = 1e-13;
  auto checked = [](double f, int iter) {
    if (!std::isfinite(f)) {
      throw NumericError("non-finite objective at iteration " + std::to_string(iter));
    }
    return f;
  };
  double f = checked(objective(x), 0);
  FitTrace local;
  local.initial_objective = f;
  int iter = 0;
  double grad_norm = 0.0;
  for (; iter < config.max_iters; ++iter) {
    const VectorXd g = gradient(x).cwiseProduct(mask);
    if (!g.allFinite()) {
      throw NumericError("non-finite gradient at iteration " + std::to_string(iter));
    }
    grad_norm = g.size() ? g.lpNorm<Eigen::Infinity>() : 0.0;
    if (grad_norm < config.grad_tol) {
      local.converged = true;
      break;
    }
    double step = config.learning_rate;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, step *= 0.5) {
      VectorXd candidate = x + step * g;
      if (candidate == x) break;  // step below machine precision
      const double fc = checked(objective(candidate), iter + 1);
      // Near the optimum the gain per step falls below the rounding noise of
      // a mean over N objects; tolerate that much so the gradient test, not
      // the noise floor, decides convergence.
      if (fc >= f - kNoise * std::max(1.0, std::abs(f))) {
        x = std::move(candidate);
        f = fc;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no ascent direction at machine precision
  }
  local.iterations = iter;
  local.final_objective = f;
  local.final_grad_norm = grad_norm;
  if (trace) *trace = std::move(local);
  return x;
}

}  // namespace

void FitConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (max_iters < 0) throw ConfigError("max_iters must be >= 0");
  if (!(grad_tol > 0.0)) throw ConfigError("grad_tol must be > 0");
  if (!(w_l2 >= 0.0)) throw ConfigError("w_l2 must be >= 0");
  if (!std::isfinite(phi_init)) throw ConfigError("phi_init must be finite");
}

double log_two_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a));
}

double log_source_partition(double x) {
  const double a = std::abs(x);
  const double e = std::exp(-a);
  return a + std::log1p(e + e * e);
}

double d_log_source_partition(double x) {
  const double a = std::abs(x);
  const double e = std::exp(-a);
  const double v = (1.0 - e * e) / (1.0 + e + e * e);
  return x < 0 ? -v : v;
}

double log_partition(const VectorXd& phi) {
  double total = std::log(2.0);
  for (Eigen::Index j = 0; j < phi.size(); ++j) total += log_source_partition(phi[j]);
  return total;
}

double log_partition_sp(const GenParamsSP& params) { return log_partition(params.phi); }

double marginal_loglik_sp(const GenParamsSP& params, const LabelMatrix& labels) {
  check_votes(params.phi, labels);
  const VectorXd scores = object_scores(params.phi, labels.votes());
  const double log_z = log_partition(params.phi);
  return mean_object_loglik(scores, [&](Eigen::Index) { return log_z; });
}

VectorXd grad_marginal_sp(const GenParamsSP& params, const LabelMatrix& labels) {
  check_votes(params.phi, labels);
  const VectorXd scores = object_scores(params.phi, labels.votes());
  const VectorXd t = scores.array().tanh().matrix();
  VectorXd g = labels.votes() * t / static_cast<double>(labels.num_objects());
  for (Eigen::Index j = 0; j < g.size(); ++j) g[j] -= d_log_source_partition(params.phi[j]);
  return g;
}

GenParamsSP fit_sp(const LabelMatrix& labels, const FitConfig& config, FitTrace* trace) {
  config.validate();
  const int m = labels.num_sources();
  VectorXd mask = VectorXd::Ones(m);
  const auto frozen = silent_sources(labels);
  for (int j : frozen) mask[j] = 0.0;

  auto objective = [&](const VectorXd& phi) { return marginal_loglik_sp({phi}, labels); };
  auto gradient = [&](const VectorXd& phi) { return grad_marginal_sp({phi}, labels); };
  GenParamsSP out{ascend(VectorXd::Constant(m, config.phi_init), objective, gradient, mask,
                         config, trace)};
  if (trace) trace->frozen_sources = frozen;
  return out;
}

double posterior_sp(const GenParamsSP& params, const VectorXd& vote_column) {
  if (vote_column.size() != params.phi.size()) {
    throw DataError("vote column length does not match phi");
  }
  const double s = 2.0 * params.phi.dot(vote_column);
  return 1.0 / (1.0 + std::exp(-s));
}

ProbLabelVector label_sp(const GenParamsSP& params, const LabelMatrix& labels) {
  check_votes(params.phi, labels);
  const VectorXd scores = object_scores(params.phi, labels.votes());
  return ProbLabelVector(scores.array().tanh().matrix(), labels.object_ids());
}

VectorXd effective_phi(const GenParamsAug& params, const VectorXd& feature_row) {
  if (feature_row.size() != params.num_selected()) {
    throw DataError("feature row length does not match the number of selected features");
  }
  return params.phi + params.w.transpose() * feature_row;
}

MatrixXd effective_phi_all(const GenParamsAug& params, const FeatureMatrixBinary& features) {
  const MatrixXd xs = features.columns(params.selected);
  MatrixXd phi_eff = xs * params.w;
  phi_eff.rowwise() += params.phi.transpose();
  return phi_eff;
}

namespace {

struct AugContext {
  MatrixXd xs;
  Patterns patterns;

  AugContext(const FeatureMatrixBinary& features, const std::vector<int>& selected)
      : xs(features.columns(selected)), patterns(feature_patterns(xs)) {}
};

MatrixXd effective_phi_all(const GenParamsAug& params, const AugContext& ctx) {
  MatrixXd phi_eff = ctx.xs * params.w;
  phi_eff.rowwise() += params.phi.transpose();
  return phi_eff;
}

double marginal_loglik_aug(const GenParamsAug& params, const LabelMatrix& labels,
                           const AugContext& ctx, double w_l2) {
  const MatrixXd phi_eff = effective_phi_all(params, ctx);
  const VectorXd scores = object_scores(phi_eff, labels.votes());
  std::vector<double> log_z;
  for (Eigen::Index r : ctx.patterns.representative) {
    log_z.push_back(log_partition(phi_eff.row(r).transpose()));
  }
  const double fit =
      mean_object_loglik(scores, [&](Eigen::Index o) { return log_z[ctx.patterns.of_object[o]]; });
  return fit - 0.5 * w_l2 * params.w.squaredNorm();
}

AugGradient grad_marginal_aug(const GenParamsAug& params, const LabelMatrix& labels,
                              const AugContext& ctx, double w_l2) {
  const MatrixXd phi_eff = effective_phi_all(params, ctx);
  const VectorXd t = object_scores(phi_eff, labels.votes()).array().tanh().matrix();

  // Per-object gradient with respect to the effective accuracies.
  MatrixXd g = labels.votes().transpose();
  g.array().colwise() *= t.array();
  const auto& patterns = ctx.patterns;
  MatrixXd d_log_z(static_cast<Eigen::Index>(patterns.representative.size()), phi_eff.cols());
  for (Eigen::Index p = 0; p < d_log_z.rows(); ++p) {
    d_log_z.row(p) = phi_eff.row(patterns.representative[p])
                         .unaryExpr([](double v) { return d_log_source_partition(v); });
  }
  for (Eigen::Index o = 0; o < g.rows(); ++o) g.row(o) -= d_log_z.row(patterns.of_object[o]);

  const double n = static_cast<double>(labels.num_objects());
  AugGradient out;
  out.phi = g.colwise().sum().transpose() / n;
  out.w = ctx.xs.transpose() * g / n - w_l2 * params.w;
  return out;
}

}  // namespace

double marginal_loglik_aug(const GenParamsAug& params, const LabelMatrix& labels,
                           const FeatureMatrixBinary& features, double w_l2) {
  check_aug(params, labels, features);
  return marginal_loglik_aug(params, labels, AugContext(features, params.selected), w_l2);
}

AugGradient grad_marginal_aug(const GenParamsAug& params, const LabelMatrix& labels,
                              const FeatureMatrixBinary& features, double w_l2) {
  check_aug(params, labels, features);
  return grad_marginal_aug(params, labels, AugContext(features, params.selected), w_l2);
}

GenParamsAug fit_aug(const LabelMatrix& labels, const FeatureMatrixBinary& features,
                     const std::vector<int>& selected, const FitConfig& config,
                     FitTrace* trace) {
  config.validate();
  if (selected.empty()) throw ConfigError("fit_aug requires at least one selected feature");
  for (std::size_t a = 0; a < selected.size(); ++a) {
    for (std::size_t b = a + 1; b < selected.size(); ++b) {
      if (selected[a] == selected[b]) throw ConfigError("selected feature indices must be distinct");
    }
  }
  if (features.num_objects() != labels.num_objects()) {
    throw DataError("binary features have " + std::to_string(features.num_objects()) +
                    " objects, label matrix has " + std::to_string(labels.num_objects()));
  }
  const AugContext ctx(features, selected);  // range-checks the selection

  const int m = labels.num_sources();
  const int k = static_cast<int>(selected.size());
  const auto frozen = silent_sources(labels);

  // Parameters flattened as [phi; vec(W)] with W column-major (K x M).
  auto unpack = [&](const VectorXd& x) {
    GenParamsAug p;
    p.phi = x.head(m);
    p.w = Eigen::Map<const MatrixXd>(x.data() + m, k, m);
    p.selected = selected;
    return p;
  };
  VectorXd mask = VectorXd::Ones(m + k * m);
  for (int j : frozen) {
    mask[j] = 0.0;
    for (int i = 0; i < k; ++i) mask[m + j * k + i] = 0.0;
  }
  auto objective = [&](const VectorXd& x) {
    return marginal_loglik_aug(unpack(x), labels, ctx, config.w_l2);
  };
  auto gradient = [&](const VectorXd& x) {
    const AugGradient g = grad_marginal_aug(unpack(x), labels, ctx, config.w_l2);
    VectorXd flat(m + k * m);
    flat.head(m) = g.phi;
    flat.tail(k * m) = Eigen::Map<const VectorXd>(g.w.data(), k * m);
    return flat;
  };
  VectorXd x0 = VectorXd::Zero(m + k * m);
  x0.head(m).setConstant(config.phi_init);
  GenParamsAug out = unpack(ascend(std::move(x0), objective, gradient, mask, config, trace));
  if (trace) trace->frozen_sources = frozen;
  return out;
}

ProbLabelVector label_aug(const GenParamsAug& params, const LabelMatrix& labels,
                          const FeatureMatrixBinary& features) {
  check_aug(params, labels, features);
  const VectorXd scores = object_scores(effective_phi_all(params, features), labels.votes());
  return ProbLabelVector(scores.array().tanh().matrix(), labels.object_ids());
}

}  // namespace socratic
