#include "socratic/synth.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "socratic/error.h"
#include "socratic/theory.h"

namespace socratic {
namespace {

std::vector<std::string> numbered_ids(int n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (int o = 0; o < n; ++o) ids.push_back("o" + std::to_string(o));
  return ids;
}

bool same_set(std::vector<int> a, std::vector<int> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

bool contains_all(const std::vector<int>& haystack, const std::vector<int>& needles) {
  return std::all_of(needles.begin(), needles.end(), [&](int j) {
    return std::find(haystack.begin(), haystack.end(), j) != haystack.end();
  });
}

struct TrialOutcome {
  bool recovered = false;
  bool contained = false;
};

TrialOutcome recovery_trial(const RecoveryExperiment& ex, double kappa, int n, Rng& rng) {
  RecoveryScenario scenario;
  scenario.p = ex.p;
  scenario.s_size = ex.s_size;
  scenario.kappa = kappa;
  scenario.n = n;
  scenario.rho = ex.rho;
  const RecoveryData data = detail::generate_recovery(
      ex.p, ex.s_size, n, scenario.resolved_rho(), scenario.flip_probability(), rng);

  std::vector<int> selected;
  if (ex.policy == LambdaPolicy::kPath) {
    PathOptions options = ex.path;
    options.max_entries = ex.s_size;
    try {
      const RegPath path = regularization_path(data.features, data.target, options);
      selected = select_features(path, ex.s_size);
    } catch (const DataError&) {
      return {};  // no signal at all
    }
  } else {
    try {
      const ConditionReport report =
          check_conditions(data.features, data.target, data.support, ex.delta);
      if (!report.recommended_lambda) return {};
      LassoOptions lasso;
      lasso.tol = ex.path.tol;
      lasso.max_sweeps = ex.path.max_sweeps;
      selected = LassoProblem(data.features, data.target)
                     .solve(*report.recommended_lambda, lasso)
                     .active_set;
    } catch (const NumericError&) {
      return {};  // singular Sigma_SS, e.g. duplicated relevant columns at tiny N
    }
  }
  return {same_set(selected, data.support), contains_all(selected, data.support)};
}

}  // namespace

void RecoveryScenario::validate() const {
  if (!(kappa > 0.0 && kappa < 1.0)) throw ConfigError("kappa must lie in (0,1)");
  if (s_size < 1 || s_size >= p) throw ConfigError("s_size must satisfy 1 <= s_size < p");
  if (n < 1) throw ConfigError("n must be >= 1");
  const double r = resolved_rho();
  if (!(r >= kappa && r <= 1.0)) throw ConfigError("rho must lie in [kappa, 1]");
}

double RecoveryScenario::resolved_rho() const { return rho ? *rho : std::sqrt(kappa); }

double RecoveryScenario::flip_probability() const {
  return 0.5 * (1.0 - kappa / resolved_rho());
}

namespace detail {

RecoveryData generate_recovery(int p, int s_size, int n, double rho, double flip, Rng& rng) {
  const double agree = 0.5 * (1.0 + rho);
  MatrixXd x(n, p);
  VectorXd target(n);
  for (int o = 0; o < n; ++o) {
    const double t = rng.sign();
    target[o] = rng.bernoulli(flip) ? -t : t;
    for (int j = 0; j < s_size; ++j) x(o, j) = rng.bernoulli(agree) ? t : -t;
    std::uint64_t word = 0;
    for (int j = s_size, used = 64; j < p; ++j, ++used) {
      if (used == 64) {
        word = rng.bits();
        used = 0;
      }
      x(o, j) = (word >> used) & 1 ? 1.0 : -1.0;
    }
  }
  // Shuffle columns, tracking where the relevant ones land.
  std::vector<int> perm(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) perm[j] = j;
  rng.shuffle(perm);
  MatrixXd shuffled(n, p);
  std::vector<int> support;
  for (int dest = 0; dest < p; ++dest) {
    shuffled.col(dest) = x.col(perm[dest]);
    if (perm[dest] < s_size) support.push_back(dest);
  }
  return {FeatureMatrixBinary(std::move(shuffled)), DisagreementVector(std::move(target)),
          std::move(support)};
}

}  // namespace detail

RecoveryData gen_recovery(const RecoveryScenario& scenario) {
  scenario.validate();
  Rng rng(scenario.seed);
  return detail::generate_recovery(scenario.p, scenario.s_size, scenario.n,
                                   scenario.resolved_rho(), scenario.flip_probability(), rng);
}

void RecoveryExperiment::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (kappas.empty()) throw ConfigError("kappa grid is empty");
  if (ns.empty()) throw ConfigError("n grid is empty");
  for (double kappa : kappas) {
    RecoveryScenario s;
    s.p = p;
    s.s_size = s_size;
    s.kappa = kappa;
    s.rho = rho;
    s.validate();
  }
  for (int n : ns) {
    if (n < 1) throw ConfigError("n must be >= 1");
  }
  if (policy == LambdaPolicy::kTheorem && !(delta > 0.0 && delta < 1.0)) {
    throw ConfigError("delta must lie in (0,1)");
  }
  path.validate();
}

std::vector<RecoveryRow> run_recovery_experiment(const RecoveryExperiment& experiment) {
  experiment.validate();
  const int nk = static_cast<int>(experiment.kappas.size());
  const int nn = static_cast<int>(experiment.ns.size());
  const int total = nk * nn * experiment.trials;
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(total));
  parallel_for(total, experiment.jobs, [&](int task) {
    const int t = task % experiment.trials;
    const int cell = task / experiment.trials;
    const int i = cell / nn;
    const int j = cell % nn;
    Rng rng(experiment.seed, {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                              static_cast<std::uint32_t>(t)});
    outcomes[task] = recovery_trial(experiment, experiment.kappas[i], experiment.ns[j], rng);
  });

  std::vector<RecoveryRow> rows;
  for (int i = 0; i < nk; ++i) {
    for (int j = 0; j < nn; ++j) {
      RecoveryRow row;
      row.kappa = experiment.kappas[i];
      row.n = experiment.ns[j];
      row.trials = experiment.trials;
      int recovered = 0;
      int contained = 0;
      for (int t = 0; t < experiment.trials; ++t) {
        const auto& o = outcomes[(i * nn + j) * experiment.trials + t];
        recovered += o.recovered;
        contained += o.contained;
      }
      row.recovered_fraction = static_cast<double>(recovered) / experiment.trials;
      row.contained_fraction = static_cast<double>(contained) / experiment.trials;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<PlantedSubset> E2EScenario::subsets() const {
  std::vector<PlantedSubset> out = {{subset_fraction, flipped_source, flipped_accuracy}};
  out.insert(out.end(), extra_subsets.begin(), extra_subsets.end());
  return out;
}

double E2EScenario::base_accuracy(int source) const {
  return base_accuracies.empty() ? 0.8 : base_accuracies[source];
}

double E2EScenario::coverage(int source) const {
  return coverages.empty() ? 0.7 : coverages[source];
}

void E2EScenario::validate() const {
  if (m < 1) throw ConfigError("m must be >= 1");
  if (n < 1) throw ConfigError("n must be >= 1");
  if (q_disc < 1) throw ConfigError("q_disc must be >= 1");
  if (!base_accuracies.empty() && static_cast<int>(base_accuracies.size()) != m) {
    throw ConfigError("base_accuracies must have m entries");
  }
  if (!coverages.empty() && static_cast<int>(coverages.size()) != m) {
    throw ConfigError("coverages must have m entries");
  }
  for (int j = 0; j < m; ++j) {
    const double a = base_accuracy(j);
    if (!(a > 0.5 && a < 1.0)) throw ConfigError("base_accuracies must lie in (0.5,1)");
    const double c = coverage(j);
    if (!(c > 0.0 && c <= 1.0)) throw ConfigError("coverages must lie in (0,1]");
  }
  const auto all = subsets();
  if (static_cast<int>(all.size()) > p) throw ConfigError("p must be at least the subset count");
  for (const auto& s : all) {
    if (!(s.fraction > 0.0 && s.fraction < 1.0)) {
      throw ConfigError("subset_fraction must lie in (0,1)");
    }
    if (s.flipped_source < 0 || s.flipped_source >= m) {
      throw ConfigError("flipped_source must lie in [0,m)");
    }
    if (!(s.flipped_accuracy > 0.0 && s.flipped_accuracy < 1.0)) {
      throw ConfigError("flipped_accuracy must lie in (0,1)");
    }
  }
  if (!(disc_signal >= 0.0)) throw ConfigError("disc_signal must be >= 0");
}

Dataset gen_e2e(const E2EScenario& scenario) {
  scenario.validate();
  const auto subsets = scenario.subsets();
  const int num_subsets = static_cast<int>(subsets.size());
  const int m = scenario.m;
  const int n = scenario.n;

  // Informative direction from its own stream so it is fixed per seed.
  Rng direction_rng(scenario.seed, {1});
  VectorXd u(scenario.q_disc);
  for (int i = 0; i < scenario.q_disc; ++i) u[i] = direction_rng.normal();
  if (u.norm() > 0.0) u *= scenario.disc_signal / u.norm();

  Rng rng(scenario.seed, {0});
  MatrixXd votes(m, n);
  MatrixXd bin(n, scenario.p);
  const int q_total = scenario.q_disc + (scenario.subset_in_real_features ? num_subsets : 0);
  MatrixXd real(n, q_total);
  VectorXd truth(n);
  std::vector<double> in_subset(static_cast<std::size_t>(num_subsets));
  for (int o = 0; o < n; ++o) {
    const double y = rng.sign();
    truth[o] = y;
    for (int l = 0; l < num_subsets; ++l) {
      in_subset[l] = rng.bernoulli(subsets[l].fraction) ? 1.0 : -1.0;
      bin(o, l) = in_subset[l];
    }
    for (int i = num_subsets; i < scenario.p; ++i) bin(o, i) = rng.sign();
    for (int j = 0; j < m; ++j) {
      double accuracy = scenario.base_accuracy(j);
      for (int l = 0; l < num_subsets; ++l) {
        if (in_subset[l] > 0 && subsets[l].flipped_source == j) {
          accuracy = subsets[l].flipped_accuracy;
          break;
        }
      }
      if (!rng.bernoulli(scenario.coverage(j))) {
        votes(j, o) = 0.0;
      } else {
        votes(j, o) = rng.bernoulli(accuracy) ? y : -y;
      }
    }
    for (int i = 0; i < scenario.q_disc; ++i) real(o, i) = y * u[i] + rng.normal();
    if (scenario.subset_in_real_features) {
      for (int l = 0; l < num_subsets; ++l) real(o, scenario.q_disc + l) = in_subset[l];
    }
  }

  auto ids = numbered_ids(n);
  std::vector<std::string> bin_names;
  for (int l = 0; l < num_subsets; ++l) bin_names.push_back("subset_" + std::to_string(l + 1));
  for (int i = num_subsets; i < scenario.p; ++i) bin_names.push_back("f_" + std::to_string(i + 1));
  return Dataset{LabelMatrix(std::move(votes), ids),
                 FeatureMatrixBinary(std::move(bin), std::move(bin_names), ids),
                 FeatureMatrixReal(std::move(real), {}, ids), HardLabelVector(std::move(truth), ids)};
}

}  // namespace socratic
