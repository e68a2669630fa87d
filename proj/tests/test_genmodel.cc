#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "socratic/error.h"
#include "socratic/genmodel.h"
#include "socratic/synth.h"
#include "testing.h"

namespace socratic {
namespace {

using testing::numeric_gradient;
using testing::random_binary;
using testing::random_labels;
using testing::random_vector;
using testing::relative_error;

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

LabelMatrix column(std::initializer_list<double> votes) {
  return LabelMatrix(vec(votes));  // M x 1
}

// Labels drawn from the SP joint by inverse CDF over the enumerated table.
LabelMatrix sample_sp(const VectorXd& phi, int n, Rng& rng) {
  const JointTable table(phi);
  std::vector<double> cdf(static_cast<std::size_t>(table.num_states()));
  double acc = 0.0;
  for (int s = 0; s < table.num_states(); ++s) cdf[s] = acc += table.probability(s);
  MatrixXd votes(phi.size(), n);
  for (int o = 0; o < n; ++o) {
    const double u = rng.uniform() * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const int s = std::min<int>(static_cast<int>(it - cdf.begin()), table.num_states() - 1);
    votes.col(o) = table.votes_of(s);
  }
  return LabelMatrix(std::move(votes));
}

TEST(LogPartition, Examples) {
  EXPECT_NEAR(log_partition_sp({vec({0, 0})}), std::log(18.0), 1e-15);
  EXPECT_NEAR(log_partition_sp({vec({1})}), std::log(2.0 * (2.0 * std::cosh(1.0) + 1.0)), 1e-14);
  EXPECT_NEAR(std::exp(log_partition_sp({vec({1})})), 8.1723, 1e-4);
  EXPECT_NEAR(log_partition_sp({vec({1})}), JointTable(vec({1})).log_partition(), 1e-12);
}

TEST(LogPartition, EvenAndStableForLargePhi) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const VectorXd phi = random_vector(4, 3.0, rng);
    EXPECT_EQ(log_partition_sp({phi}), log_partition_sp({VectorXd(-phi)}));
  }
  const double big = log_partition_sp({vec({800.0})});
  EXPECT_TRUE(std::isfinite(big));
  EXPECT_NEAR(big, std::log(2.0) + 800.0, 1e-12);
}

TEST(LogPartition, MatchesEnumeration) {
  Rng rng(11);
  for (int m = 1; m <= 4; ++m) {
    for (int t = 0; t < 25; ++t) {
      const VectorXd phi = random_vector(m, 2.0, rng);
      const JointTable table(phi);
      EXPECT_NEAR(log_partition_sp({phi}), table.log_partition(), 1e-10);
    }
  }
}

TEST(MarginalSP, Examples) {
  const LabelMatrix l = column({1});
  EXPECT_NEAR(marginal_loglik_sp({vec({0})}, l), -std::log(3.0), 1e-15);
  EXPECT_NEAR(marginal_loglik_sp({vec({0})}, column({0})), -std::log(3.0), 1e-15);
  EXPECT_NEAR(marginal_loglik_sp({vec({1})}, l), std::log(2.0 * std::cosh(1.0)) - std::log(8.1724), 1e-4);
  EXPECT_NEAR(marginal_loglik_sp({vec({1})}, l), std::log(JointTable(vec({1})).marginal(vec({1}))),
              1e-12);
}

TEST(MarginalSP, ExactlyEven) {
  Rng rng(5);
  const LabelMatrix l = random_labels(4, 50, rng);
  for (int t = 0; t < 20; ++t) {
    const VectorXd phi = random_vector(4, 2.0, rng);
    EXPECT_EQ(marginal_loglik_sp({phi}, l), marginal_loglik_sp({VectorXd(-phi)}, l));
  }
}

TEST(MarginalSP, MatchesEnumeration) {
  Rng rng(17);
  for (int m = 1; m <= 4; ++m) {
    const LabelMatrix l = random_labels(m, 30, rng);
    const VectorXd phi = random_vector(m, 2.0, rng);
    const JointTable table(phi);
    double expect = 0.0;
    for (int o = 0; o < l.num_objects(); ++o) expect += std::log(table.marginal(l.votes().col(o)));
    EXPECT_NEAR(marginal_loglik_sp({phi}, l), expect / l.num_objects(), 1e-10);
  }
}

TEST(MarginalSP, DimensionMismatch) {
  EXPECT_THROW(marginal_loglik_sp({vec({1, 2})}, column({1})), DataError);
  EXPECT_THROW(grad_marginal_sp({vec({1, 2})}, column({1})), DataError);
  EXPECT_THROW(label_sp({vec({1, 2})}, column({1})), DataError);
}

TEST(GradSP, ZeroAtOrigin) {
  Rng rng(2);
  const LabelMatrix l = random_labels(3, 40, rng);
  EXPECT_EQ(grad_marginal_sp({VectorXd::Zero(3)}, l), VectorXd::Zero(3));
}

TEST(GradSP, ClosedForm) {
  const LabelMatrix l(MatrixXd::Ones(1, 5));
  const double expect = std::tanh(2.0) - 2.0 * std::sinh(2.0) / (2.0 * std::cosh(2.0) + 1.0);
  EXPECT_NEAR(grad_marginal_sp({vec({2})}, l)[0], expect, 1e-14);
}

TEST(GradSP, FiniteDifferences) {
  Rng rng(23);
  const LabelMatrix l = random_labels(4, 60, rng);
  for (int t = 0; t < 10; ++t) {
    const VectorXd phi = random_vector(4, 1.5, rng);
    const VectorXd numeric =
        numeric_gradient([&](const VectorXd& p) { return marginal_loglik_sp({p}, l); }, phi);
    EXPECT_LT(relative_error(grad_marginal_sp({phi}, l), numeric), 1e-5);
  }
}

TEST(FitSP, RecoversPlantedAccuracies) {
  Rng rng(101);
  const VectorXd truth = vec({1.2, 0.8, 0.5});
  const LabelMatrix l = sample_sp(truth, 50000, rng);
  FitTrace trace;
  const GenParamsSP fit = fit_sp(l, FitConfig{}, &trace);
  EXPECT_TRUE(trace.converged);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(fit.phi[j]), truth[j], 0.1) << j;
  EXPECT_GE(trace.final_objective, trace.initial_objective);
}

TEST(FitSP, StationaryAtZero) {
  Rng rng(7);
  const LabelMatrix l = sample_sp(VectorXd::Zero(3), 20000, rng);
  const GenParamsSP fit = fit_sp(l, FitConfig{});
  // Sample coverage above 2/3 lets a small nonzero phi fit slightly better,
  // so only require that the fit stays near zero and does not lose ground.
  EXPECT_GE(marginal_loglik_sp(fit, l), marginal_loglik_sp({VectorXd::Zero(3)}, l) - 1e-12);
  EXPECT_LT(fit.phi.lpNorm<Eigen::Infinity>(), 0.25);
}

TEST(FitSP, Deterministic) {
  Rng rng(9);
  const LabelMatrix l = sample_sp(vec({1.0, 0.4}), 3000, rng);
  const GenParamsSP a = fit_sp(l, FitConfig{});
  const GenParamsSP b = fit_sp(l, FitConfig{});
  EXPECT_EQ(a.phi, b.phi);
}

TEST(FitSP, ObjectiveNeverDecreases) {
  Rng rng(31);
  const LabelMatrix l = sample_sp(vec({1.0, 0.6, 0.2}), 2000, rng);
  FitConfig config;
  config.learning_rate = 50.0;  // forces step halving
  FitTrace trace;
  fit_sp(l, config, &trace);
  EXPECT_GE(trace.final_objective, trace.initial_objective);
  for (int iters : {1, 2, 5, 10}) {
    config.max_iters = iters;
    FitTrace shorter;
    fit_sp(l, config, &shorter);
    EXPECT_GE(trace.final_objective, shorter.final_objective - 1e-15);
  }
}

TEST(FitSP, AllAbstainSourceFrozen) {
  MatrixXd votes(2, 4);
  votes << 1, 1, -1, 1,  //
      0, 0, 0, 0;
  FitTrace trace;
  const GenParamsSP fit = fit_sp(LabelMatrix(votes), FitConfig{}, &trace);
  EXPECT_EQ(fit.phi[1], FitConfig{}.phi_init);
  EXPECT_EQ(trace.frozen_sources, std::vector<int>{1});
}

TEST(FitSP, ConfigValidated) {
  const LabelMatrix l = column({1});
  FitConfig c;
  c.learning_rate = 0.0;
  EXPECT_THROW(fit_sp(l, c), ConfigError);
  c = FitConfig{};
  c.grad_tol = 0.0;
  EXPECT_THROW(fit_sp(l, c), ConfigError);
  c = FitConfig{};
  c.w_l2 = -1.0;
  EXPECT_THROW(fit_sp(l, c), ConfigError);
}

TEST(PosteriorSP, Examples) {
  EXPECT_DOUBLE_EQ(posterior_sp({vec({0.5, 0.5})}, vec({1, -1})), 0.5);
  EXPECT_DOUBLE_EQ(posterior_sp({vec({0.3})}, vec({0})), 0.5);
  EXPECT_NEAR(posterior_sp({vec({1})}, vec({1})), 0.8808, 1e-4);
  EXPECT_NEAR(posterior_sp({vec({1})}, vec({1})), JointTable(vec({1})).posterior_positive(vec({1})),
              1e-12);
}

TEST(PosteriorSP, NormalizedUnderFlip) {
  Rng rng(41);
  for (int t = 0; t < 50; ++t) {
    const VectorXd phi = random_vector(3, 2.0, rng);
    VectorXd votes(3);
    for (int j = 0; j < 3; ++j) votes[j] = static_cast<double>(rng.below(3)) - 1.0;
    EXPECT_NEAR(posterior_sp({phi}, votes) + posterior_sp({phi}, -votes), 1.0, 1e-15);
  }
}

TEST(PosteriorSP, MonotoneInPhi) {
  const VectorXd votes = vec({1, -1, 0});
  const VectorXd base = vec({0.4, 0.3, 0.2});
  const double p0 = posterior_sp({base}, votes);
  for (int j = 0; j < 3; ++j) {
    VectorXd up = base;
    up[j] += 0.1;
    const double p = posterior_sp({up}, votes);
    if (votes[j] > 0) {
      EXPECT_GT(p, p0);
    } else if (votes[j] < 0) {
      EXPECT_LT(p, p0);
    } else {
      EXPECT_EQ(p, p0);
    }
  }
}

TEST(LabelSP, Examples) {
  MatrixXd votes(1, 3);
  votes << 1, 0, -1;
  const ProbLabelVector y = label_sp({vec({1})}, LabelMatrix(votes));
  EXPECT_NEAR(y[0], 0.7616, 1e-4);
  EXPECT_NEAR(y[0], 2.0 * posterior_sp({vec({1})}, vec({1})) - 1.0, 1e-15);
  EXPECT_EQ(y[1], 0.0);
  EXPECT_EQ(y[2], -y[0]);
}

TEST(LabelSP, NegatingVotesNegatesLabels) {
  Rng rng(43);
  const LabelMatrix l = random_labels(4, 40, rng);
  const GenParamsSP p{random_vector(4, 1.0, rng)};
  const ProbLabelVector a = label_sp(p, l);
  const ProbLabelVector b = label_sp(p, LabelMatrix(-l.votes()));
  EXPECT_EQ(a.expected(), VectorXd(-b.expected()));
}

GenParamsAug aug(VectorXd phi, MatrixXd w, std::vector<int> selected) {
  return GenParamsAug{std::move(phi), std::move(w), std::move(selected)};
}

TEST(EffectivePhi, Examples) {
  MatrixXd w(1, 2);
  w << 0.3, -0.2;
  const GenParamsAug p = aug(vec({0.5, 0.5}), w, {0});
  const VectorXd plus = effective_phi(p, vec({1}));
  EXPECT_NEAR(plus[0], 0.8, 1e-15);
  EXPECT_NEAR(plus[1], 0.3, 1e-15);
  const VectorXd minus = effective_phi(p, vec({-1}));
  EXPECT_NEAR(minus[0], 0.2, 1e-15);
  EXPECT_NEAR(minus[1], 0.7, 1e-15);
  EXPECT_EQ(effective_phi(aug(vec({0.5, 0.5}), MatrixXd::Zero(1, 2), {0}), vec({1})),
            vec({0.5, 0.5}));
  EXPECT_THROW(effective_phi(p, vec({1, 1})), DataError);
}

TEST(MarginalAug, ZeroWReducesToSP) {
  Rng rng(51);
  const LabelMatrix l = random_labels(3, 80, rng);
  const FeatureMatrixBinary x = random_binary(80, 4, rng);
  const VectorXd phi = random_vector(3, 1.0, rng);
  const GenParamsAug p = aug(phi, MatrixXd::Zero(2, 3), {1, 3});
  EXPECT_EQ(marginal_loglik_aug(p, l, x, 0.5), marginal_loglik_sp({phi}, l));
  EXPECT_EQ(label_aug(p, l, x).expected(), label_sp({phi}, l).expected());
}

TEST(MarginalAug, ConstantColumnShiftsPhi) {
  Rng rng(53);
  const LabelMatrix l = random_labels(3, 60, rng);
  MatrixXd xv = random_binary(60, 2, rng).values();
  xv.col(1).setOnes();
  const FeatureMatrixBinary x(xv);
  const VectorXd phi = random_vector(3, 1.0, rng);
  const MatrixXd w = random_vector(3, 1.0, rng).transpose();
  const double w_l2 = 0.3;
  const double expect =
      marginal_loglik_sp({VectorXd(phi + w.row(0).transpose())}, l) - 0.5 * w_l2 * w.squaredNorm();
  EXPECT_NEAR(marginal_loglik_aug(aug(phi, w, {1}), l, x, w_l2), expect, 1e-13);
}

TEST(MarginalAug, MatchesEnumeration) {
  Rng rng(57);
  for (int t = 0; t < 40; ++t) {
    const int m = 1 + static_cast<int>(rng.below(4));
    const int k = 1 + static_cast<int>(rng.below(2));
    const LabelMatrix l = random_labels(m, 25, rng);
    const FeatureMatrixBinary x = random_binary(25, 3, rng);
    std::vector<int> selected = {2, 0};
    selected.resize(k);
    MatrixXd w(k, m);
    for (int i = 0; i < k; ++i) w.row(i) = random_vector(m, 1.0, rng).transpose();
    const GenParamsAug p = aug(random_vector(m, 1.5, rng), w, selected);
    double expect = 0.0;
    for (int o = 0; o < 25; ++o) {
      VectorXd row(k);
      for (int i = 0; i < k; ++i) row[i] = x.values()(o, selected[i]);
      expect += std::log(JointTable(effective_phi(p, row)).marginal(l.votes().col(o)));
    }
    expect = expect / 25.0 - 0.5 * 0.2 * w.squaredNorm();
    EXPECT_NEAR(marginal_loglik_aug(p, l, x, 0.2), expect, 1e-10);
  }
}

TEST(MarginalAug, IndexErrors) {
  Rng rng(59);
  const LabelMatrix l = random_labels(2, 10, rng);
  const FeatureMatrixBinary x = random_binary(10, 2, rng);
  EXPECT_THROW(marginal_loglik_aug(aug(vec({1, 1}), MatrixXd::Zero(1, 2), {5}), l, x, 0.0),
               DataError);
  EXPECT_THROW(marginal_loglik_aug(aug(vec({1, 1}), MatrixXd::Zero(2, 2), {0}), l, x, 0.0),
               DataError);
  EXPECT_THROW(fit_aug(l, x, {}, FitConfig{}), ConfigError);
  EXPECT_THROW(fit_aug(l, x, {0, 0}, FitConfig{}), ConfigError);
  EXPECT_THROW(fit_aug(l, x, {3}, FitConfig{}), DataError);
}

TEST(GradAug, FiniteDifferences) {
  Rng rng(61);
  const int m = 3;
  const int k = 2;
  const LabelMatrix l = random_labels(m, 50, rng);
  const FeatureMatrixBinary x = random_binary(50, 3, rng);
  const std::vector<int> selected = {0, 2};
  auto unpack = [&](const VectorXd& flat) {
    return aug(flat.head(m), Eigen::Map<const MatrixXd>(flat.data() + m, k, m), selected);
  };
  for (int t = 0; t < 10; ++t) {
    const VectorXd flat = random_vector(m + k * m, 1.0, rng);
    const AugGradient g = grad_marginal_aug(unpack(flat), l, x, 0.05);
    VectorXd analytic(m + k * m);
    analytic.head(m) = g.phi;
    analytic.tail(k * m) = Eigen::Map<const VectorXd>(g.w.data(), k * m);
    const VectorXd numeric = numeric_gradient(
        [&](const VectorXd& v) { return marginal_loglik_aug(unpack(v), l, x, 0.05); }, flat);
    EXPECT_LT(relative_error(analytic, numeric), 1e-5);
  }
}

TEST(FitAug, RecoversFlipDirection) {
  E2EScenario scenario;
  scenario.seed = 4;
  const Dataset d = gen_e2e(scenario);
  FitTrace trace;
  const GenParamsAug fit = fit_aug(d.labels, d.bin_features, {0}, FitConfig{}, &trace);
  // Inside the subset (x = +1) the flipped source is worse than average.
  EXPECT_LT(fit.w(0, scenario.flipped_source), 0.0);
  for (int j = 0; j < scenario.m; ++j) {
    if (j == scenario.flipped_source) continue;
    EXPECT_LT(std::abs(fit.w(0, j)), 0.1) << j;
  }
  EXPECT_GE(trace.final_objective, trace.initial_objective);
}

TEST(FitAug, PenaltyShrinksUninformativeRow) {
  Rng rng(67);
  const LabelMatrix l = sample_sp(vec({1.0, 0.6, 0.3}), 4000, rng);
  const FeatureMatrixBinary x = random_binary(4000, 1, rng);  // independent of the votes
  double previous = std::numeric_limits<double>::infinity();
  for (double w_l2 : {0.01, 1.0, 100.0}) {
    FitConfig config;
    config.w_l2 = w_l2;
    const double norm = fit_aug(l, x, {0}, config).w.norm();
    EXPECT_LT(norm, previous) << w_l2;
    previous = norm;
  }
  EXPECT_LT(previous, 0.01);
}

TEST(FitAug, ConstantFeatureMatchesSP) {
  Rng rng(71);
  const LabelMatrix l = sample_sp(vec({1.0, 0.6, 0.3}), 4000, rng);
  const FeatureMatrixBinary x(MatrixXd::Ones(4000, 1));
  FitConfig config;
  config.max_iters = 20000;
  const GenParamsSP sp = fit_sp(l, config);
  const GenParamsAug a = fit_aug(l, x, {0}, config);
  const double sp_best = marginal_loglik_sp(sp, l);
  EXPECT_NEAR(marginal_loglik_aug(a, l, x, config.w_l2), sp_best, 1e-6);
  EXPECT_NEAR((a.phi + a.w.row(0).transpose() - sp.phi).lpNorm<Eigen::Infinity>(), 0.0, 1e-3);
}

TEST(LabelAug, Examples) {
  MatrixXd w(1, 1);
  w << 0.6;
  const GenParamsAug p = aug(vec({0.2}), w, {0});
  const FeatureMatrixBinary x(MatrixXd::Ones(1, 1));
  EXPECT_NEAR(label_aug(p, column({1}), x)[0], std::tanh(0.8), 1e-15);
  EXPECT_NEAR(label_aug(p, column({1}), x)[0],
              2.0 * JointTable(vec({0.8})).posterior_positive(vec({1})) - 1.0, 1e-12);
  EXPECT_EQ(label_aug(p, column({0}), x)[0], 0.0);
  EXPECT_EQ(label_aug(p, column({0}), FeatureMatrixBinary(-MatrixXd::Ones(1, 1)))[0], 0.0);
}

TEST(JointTable, Normalized) {
  Rng rng(73);
  for (int m = 1; m <= 5; ++m) {
    const JointTable table(random_vector(m, 2.0, rng));
    ASSERT_EQ(table.num_states(), 2 * static_cast<int>(std::pow(3, m)));
    double total = 0.0;
    for (int s = 0; s < table.num_states(); ++s) total += table.probability(s);
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(JointTable, UniformAtZero) {
  const JointTable table(VectorXd::Zero(3));
  for (int s = 0; s < table.num_states(); ++s) {
    EXPECT_NEAR(table.probability(s), 1.0 / 54.0, 1e-15);
  }
}

TEST(JointTable, PosteriorMatchesClosedForm) {
  Rng rng(79);
  for (int t = 0; t < 30; ++t) {
    const VectorXd phi = random_vector(3, 2.0, rng);
    const JointTable table = brute_force_joint(phi);
    VectorXd votes(3);
    for (int j = 0; j < 3; ++j) votes[j] = static_cast<double>(rng.below(3)) - 1.0;
    EXPECT_NEAR(table.posterior_positive(votes), posterior_sp({phi}, votes), 1e-10);
  }
}

TEST(JointTable, TooManySources) {
  EXPECT_THROW(JointTable(VectorXd::Zero(9)), ConfigError);
}

}  // namespace
}  // namespace socratic
