// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "cli_harness.h"
#include "socratic/diffmodel.h"
#include "socratic/discmodel.h"
#include "socratic/error.h"
#include "socratic/genmodel.h"
#include "socratic/metrics.h"
#include "socratic/parallel.h"
#include "socratic/socratic.h"
#include "socratic/synth.h"
#include "socratic/theory.h"
#include "testing.h"

namespace socratic {
namespace {

using testing::grid_search_lasso;
using testing::numeric_gradient;
using testing::random_binary;
using testing::random_labels;
using testing::random_vector;
using testing::relative_error;

int jobs() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

// --- 1: support-recovery curves --------------------------------------------

Outcome recovery_curves() {
  RecoveryExperiment ex;
  ex.kappas = {0.2, 0.4, 0.6};
  ex.ns = {250, 500, 1000, 2000, 5000};
  ex.trials = 100;
  ex.p = 100;
  ex.s_size = 3;
  ex.seed = 1;
  ex.jobs = jobs();
  const auto rows = run_recovery_experiment(ex);
  const int nn = static_cast<int>(ex.ns.size());
  auto at = [&](int i, int j) { return rows[i * nn + j].recovered_fraction; };
  auto se = [&](double f) { return std::sqrt(f * (1.0 - f) / ex.trials); };
  auto within = [&](double hi, double lo) {
    // hi >= lo up to two Monte-Carlo standard errors of the difference
    return hi >= lo - 2.0 * std::hypot(se(hi), se(lo));
  };

  bool monotone = true;
  bool ordered = true;
  std::string curves;
  for (int i = 0; i < 3; ++i) {
    curves += "kappa=" + std::to_string(ex.kappas[i]).substr(0, 3) + ":";
    for (int j = 0; j < nn; ++j) {
      curves += " " + format_percent(at(i, j));
      if (j > 0 && !within(at(i, j), at(i, j - 1))) monotone = false;
      if (i > 0 && !within(at(i, j), at(i - 1, j))) ordered = false;
    }
    curves += i < 2 ? "; " : "";
  }
  const double top = at(2, nn - 1);
  Outcome out;
  out.pass = monotone && ordered && top >= 0.95;
  out.detail = curves + " (% recovered; monotone=" + (monotone ? "yes" : "no") +
               ", ordered=" + (ordered ? "yes" : "no") + ")";
  return out;
}

// --- 2: recovery at the recommended lambda ----------------------------------

Outcome theorem_consistency() {
  const int trials = 50;
  const double kappa = 0.6;
  const double delta = 0.2;
  RecoveryScenario scenario;
  scenario.p = 100;
  scenario.s_size = 1;
  scenario.kappa = kappa;
  std::vector<int> recovered(trials, 0);
  std::vector<int> qualified(trials, 0);
  std::vector<std::int64_t> bounds(trials, 0);
  parallel_for(trials, jobs(), [&](int t) {
    std::int64_t n = 1000;
    for (std::uint32_t attempt = 0; attempt < 8; ++attempt) {
      Rng rng(2, {static_cast<std::uint32_t>(t), attempt});
      const RecoveryData d =
          detail::generate_recovery(scenario.p, scenario.s_size, static_cast<int>(n),
                                    scenario.resolved_rho(), scenario.flip_probability(), rng);
      const ConditionReport r = check_conditions(d.features, d.target, d.support, delta);
      if (r.all_satisfied() && r.n_bound && n >= *r.n_bound && r.recommended_lambda) {
        qualified[t] = 1;
        bounds[t] = *r.n_bound;
        const LassoFit fit = lasso_fit(d.features, d.target, *r.recommended_lambda);
        recovered[t] = fit.active_set == d.support;
        return;
      }
      const std::int64_t next = r.n_bound ? std::max(*r.n_bound, n) : 2 * n;
      if (next > 400000) return;
      n = next == n ? 2 * n : next;
    }
  });
  int hits = 0;
  int ok = 0;
  std::int64_t max_bound = 0;
  for (int t = 0; t < trials; ++t) {
    hits += recovered[t];
    ok += qualified[t];
    max_bound = std::max(max_bound, bounds[t]);
  }
  Outcome out;
  out.pass = hits >= 0.8 * trials;
  out.detail = std::to_string(hits) + "/" + std::to_string(trials) + " exact recoveries (" +
               std::to_string(ok) + " trials met all conditions at N >= n_bound; largest n_bound " +
               std::to_string(max_bound) + "; |S|=1, kappa=0.6, P=100, delta=0.2)";
  return out;
}

// --- 3: factorized quantities vs enumeration --------------------------------

Outcome oracle_equivalence() {
  Rng rng(3);
  double worst = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const int m = 1 + draw % 4;
    const int k = 1 + (draw / 4) % 2;
    const int n = 12;
    const VectorXd phi = random_vector(m, 2.0, rng);
    const JointTable table(phi);
    worst = std::max(worst, std::abs(log_partition(phi) - table.log_partition()));

    const LabelMatrix l = random_labels(m, n, rng);
    double expect = 0.0;
    for (int o = 0; o < n; ++o) expect += std::log(table.marginal(l.votes().col(o)));
    worst = std::max(worst, std::abs(marginal_loglik_sp({phi}, l) - expect / n));

    const FeatureMatrixBinary x = random_binary(n, 2, rng);
    GenParamsAug aug{phi, MatrixXd(k, m), k == 1 ? std::vector<int>{1} : std::vector<int>{1, 0}};
    for (int i = 0; i < k; ++i) aug.w.row(i) = random_vector(m, 1.0, rng).transpose();
    const double w_l2 = 0.1;
    double aug_expect = 0.0;
    for (int o = 0; o < n; ++o) {
      VectorXd row(k);
      for (int i = 0; i < k; ++i) row[i] = x.values()(o, aug.selected[i]);
      const JointTable local(effective_phi(aug, row));
      aug_expect += std::log(local.marginal(l.votes().col(o)));
    }
    aug_expect = aug_expect / n - 0.5 * w_l2 * aug.w.squaredNorm();
    worst = std::max(worst, std::abs(marginal_loglik_aug(aug, l, x, w_l2) - aug_expect));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "100 draws, M<=4, K<=2; worst abs error %.3g", worst);
  return {worst <= 1e-10, buf};
}

// --- 4: gradients vs central differences ------------------------------------

Outcome gradient_checks() {
  Rng rng(4);
  double worst_sp = 0.0;
  double worst_aug = 0.0;
  double worst_disc = 0.0;
  for (int t = 0; t < 10; ++t) {
    const int m = 4;
    const LabelMatrix l = random_labels(m, 60, rng);
    const VectorXd phi = random_vector(m, 1.5, rng);
    const VectorXd num_sp = numeric_gradient(
        [&](const VectorXd& p) { return marginal_loglik_sp({p}, l); }, phi);
    worst_sp = std::max(worst_sp, relative_error(grad_marginal_sp({phi}, l), num_sp));

    const int k = 2;
    const FeatureMatrixBinary x = random_binary(60, 3, rng);
    const std::vector<int> selected = {2, 0};
    auto unpack = [&](const VectorXd& flat) {
      GenParamsAug a{flat.head(m), MatrixXd(k, m), selected};
      for (int i = 0; i < k; ++i) a.w.row(i) = flat.segment(m + i * m, m).transpose();
      return a;
    };
    const VectorXd flat = random_vector(m + k * m, 1.0, rng);
    const AugGradient g = grad_marginal_aug(unpack(flat), l, x, 0.05);
    VectorXd analytic(m + k * m);
    analytic.head(m) = g.phi;
    for (int i = 0; i < k; ++i) analytic.segment(m + i * m, m) = g.w.row(i).transpose();
    const VectorXd num_aug = numeric_gradient(
        [&](const VectorXd& f) { return marginal_loglik_aug(unpack(f), l, x, 0.05); }, flat);
    worst_aug = std::max(worst_aug, relative_error(analytic, num_aug));

    const int q = 3;
    MatrixXd v(60, q);
    VectorXd y(60);
    for (int o = 0; o < 60; ++o) {
      for (int i = 0; i < q; ++i) v(o, i) = rng.normal();
      y[o] = 2.0 * rng.uniform() - 1.0;
    }
    const FeatureMatrixReal vr(v);
    const ProbLabelVector yl(y);
    auto disc = [&](const VectorXd& f) { return DiscParams{f.head(q), f[q]}; };
    const VectorXd dflat = random_vector(q + 1, 1.5, rng);
    const DiscParams dg = noise_aware_grad(disc(dflat), vr, yl, 0.05);
    VectorXd danalytic(q + 1);
    danalytic << dg.theta, dg.bias;
    const VectorXd num_disc = numeric_gradient(
        [&](const VectorXd& f) { return noise_aware_loss(disc(f), vr, yl, 0.05); }, dflat);
    worst_disc = std::max(worst_disc, relative_error(danalytic, num_disc));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "worst relative error: SP %.2g, augmented %.2g, noise-aware %.2g",
                worst_sp, worst_aug, worst_disc);
  return {std::max({worst_sp, worst_aug, worst_disc}) <= 1e-5, buf};
}

// --- 5: LASSO optimality ----------------------------------------------------

Outcome lasso_optimality() {
  Rng rng(5);
  auto target = [&](int n) {
    VectorXd y(n);
    for (int o = 0; o < n; ++o) y[o] = 2.0 * rng.uniform() - 1.0;
    return DisagreementVector(std::move(y));
  };
  const double tol = 1e-8;
  double worst_kkt = 0.0;
  bool zero_ok = true;
  for (int t = 0; t < 20; ++t) {
    const FeatureMatrixBinary x = random_binary(100, 15, rng);
    const DisagreementVector y = target(100);
    const double top = lambda_max(x, y);
    for (double ratio : {0.05, 0.3, 0.8}) {
      const LassoFit fit = lasso_fit(x, y, ratio * top, tol);
      if (fit.converged) worst_kkt = std::max(worst_kkt, kkt_residual(x, y, fit));
    }
    for (double ratio : {1.0, 1.1, 10.0}) {
      if (lasso_fit(x, y, ratio * top, tol).coef != VectorXd::Zero(15)) zero_ok = false;
    }
  }
  double worst_grid = 0.0;
  for (int p = 1; p <= 3; ++p) {
    for (int t = 0; t < 4; ++t) {
      const int n = 8 + static_cast<int>(rng.below(9));
      const FeatureMatrixBinary x = random_binary(n, p, rng);
      const DisagreementVector y = target(n);
      const double lam = (0.05 + 0.4 * rng.uniform()) * lambda_max(x, y);
      const VectorXd fit = lasso_fit(x, y, lam, tol).coef;
      const VectorXd oracle = grid_search_lasso(x.values(), y.values(), lam);
      worst_grid = std::max(worst_grid, (fit - oracle).cwiseAbs().maxCoeff());
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "worst KKT residual %.2g (bound %.0e); worst grid-oracle gap %.2g; "
                "lambda >= lambda_max zero: %s",
                worst_kkt, 10 * tol, worst_grid, zero_ok ? "yes" : "no");
  return {worst_kkt <= 10 * tol && worst_grid <= 5e-3 && zero_ok, buf};
}

// --- 6: end-to-end loop on the default scenario -----------------------------

// Labels from the true per-object accuracies: the best any accuracy-based
// labeler can do on this data.
double oracle_accuracy(const Dataset& d, const E2EScenario& s) {
  int right = 0;
  for (int o = 0; o < d.labels.num_objects(); ++o) {
    double score = 0.0;
    for (int j = 0; j < s.m; ++j) {
      double a = s.base_accuracy(j);
      if (j == s.flipped_source && d.bin_features.values()(o, 0) > 0) a = s.flipped_accuracy;
      score += d.labels.votes()(j, o) * std::log(a / (1.0 - a));
    }
    right += (score >= 0.0 ? 1.0 : -1.0) == d.truth->values()[o];
  }
  return static_cast<double>(right) / d.labels.num_objects();
}

Outcome end_to_end() {
  const int seeds = 20;
  std::vector<int> ok(seeds, 0);
  std::vector<int> found(seeds, 0);
  std::vector<int> moved(seeds, 0);
  std::vector<double> gain(seeds, 0.0);
  std::vector<double> ceiling(seeds, 0.0);
  parallel_for(seeds, jobs(), [&](int i) {
    E2EScenario scenario;
    scenario.seed = static_cast<std::uint64_t>(i);
    const Dataset d = gen_e2e(scenario);
    RunConfig config;
    config.seed = scenario.seed;
    const RunReport report = run(d, config);
    const double base = soft_label_accuracy(report.iterations.front().gen_labels, *d.truth);
    const double best = soft_label_accuracy(report.final_labels, *d.truth);
    const auto& selected = report.iterations[report.best_k].selected;
    moved[i] = report.best_k >= 1;
    found[i] = std::find(selected.begin(), selected.end(), 0) != selected.end();
    gain[i] = best - base;
    ceiling[i] = oracle_accuracy(d, scenario) - base;
    ok[i] = moved[i] && found[i] && gain[i] >= 0.02;
  });
  int passes = 0;
  int n_moved = 0;
  int n_found = 0;
  double mean_gain = 0.0;
  double mean_ceiling = 0.0;
  for (int i = 0; i < seeds; ++i) {
    passes += ok[i];
    n_moved += moved[i];
    n_found += found[i];
    mean_gain += gain[i] / seeds;
    mean_ceiling += ceiling[i] / seeds;
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%d/20 seeds meet all three (best_k>=1: %d, planted column selected: %d); "
                "mean gain %.2f points, mean oracle-labeler gain %.2f points",
                passes, n_moved, n_found, 100 * mean_gain, 100 * mean_ceiling);
  return {passes >= 18, buf};
}

// --- 7: F1 arithmetic -------------------------------------------------------

Outcome f1_arithmetic() {
  const double a = 100 * f1_score(0.8598, 0.4143);
  const double b = 100 * f1_score(0.8113, 0.4209);
  char buf[96];
  std::snprintf(buf, sizeof buf, "(85.98, 41.43) -> %.4f; (81.13, 42.09) -> %.4f", a, b);
  return {std::abs(a - 55.92) <= 0.01 && std::abs(b - 55.42) <= 0.01, buf};
}

// --- 8: agreement rises, then falls -----------------------------------------

Outcome agreement_shape() {
  const int seeds = 20;
  std::vector<int> ok(seeds, 0);
  std::vector<int> rises(seeds, 0);
  std::vector<int> falls(seeds, 0);
  parallel_for(seeds, jobs(), [&](int i) {
    E2EScenario scenario;
    scenario.seed = static_cast<std::uint64_t>(100 + i);
    scenario.extra_subsets = {{0.3, 1, 0.3}};
    Dataset d = gen_e2e(scenario);
    d.truth.reset();  // track agreement, as without dev labels
    RunConfig config;
    config.k_max = 6;
    config.patience = 6;
    config.seed = scenario.seed;
    const RunReport report = run(d, config);
    std::vector<double> a;
    for (const auto& it : report.iterations) a.push_back(it.agreement);
    if (a.size() < 7) return;
    rises[i] = a[0] <= a[1] && a[1] <= a[2];
    const double peak = *std::max_element(a.begin(), a.end());
    falls[i] = *std::min_element(a.begin() + 3, a.begin() + 7) < peak;
    ok[i] = rises[i] && falls[i];
  });
  int passes = 0;
  int n_rises = 0;
  int n_falls = 0;
  for (int i = 0; i < seeds; ++i) {
    passes += ok[i];
    n_rises += rises[i];
    n_falls += falls[i];
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%d/20 seeds (non-decreasing through K=2: %d; below peak at some K in 3..6: %d)",
                passes, n_rises, n_falls);
  return {passes > seeds / 2, buf};
}

// --- 9: CLI determinism -----------------------------------------------------

Outcome determinism() {
  const auto root = testing::scratch_dir("acceptance_determinism");
  const auto failed_first = testing::run_all_subcommands(root, 9);
  const auto before = testing::snapshot(root);
  const auto failed_second = testing::run_all_subcommands(root, 9);
  const auto after = testing::snapshot(root);
  int differing = 0;
  for (const auto& [name, content] : before) {
    const auto it = after.find(name);
    if (it == after.end() || it->second != content) ++differing;
  }
  const bool pass = failed_first.empty() && failed_second.empty() && differing == 0 &&
                    before.size() == after.size() && !before.empty();
  std::string detail = std::to_string(before.size()) + " output files from all 9 subcommands, " +
                       std::to_string(differing) + " differ between runs";
  if (!failed_first.empty()) detail += "; failed: " + failed_first.front();
  return {pass, detail};
}

}  // namespace
}  // namespace socratic

int main() {
  using socratic::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"recovery curves", socratic::recovery_curves},
      {"recovery at recommended lambda", socratic::theorem_consistency},
      {"oracle equivalence", socratic::oracle_equivalence},
      {"gradient checks", socratic::gradient_checks},
      {"lasso optimality", socratic::lasso_optimality},
      {"end-to-end improvement", socratic::end_to_end},
      {"F1 arithmetic", socratic::f1_arithmetic},
      {"agreement rise and fall", socratic::agreement_shape},
      {"determinism", socratic::determinism},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", index, name,
                out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !out.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
