#ifndef SOCRATIC_SYNTH_H_
#define SOCRATIC_SYNTH_H_

// Seeded synthetic data: a support-recovery generator for the difference
// model and an end-to-end weak-supervision scenario with planted latent
// subsets. Every generator is a pure function of its scenario (seed included).

#include <cstdint>
#include <optional>
#include <vector>

#include "socratic/data.h"
#include "socratic/diffmodel.h"
#include "socratic/parallel.h"
#include "socratic/rng.h"

namespace socratic {

// A latent sign t drives both the target and the relevant columns:
// relevant X_j = t with probability (1 + rho) / 2, target = t flipped with
// probability q, irrelevant columns are independent fair signs. Choosing
// rho (1 - 2q) = kappa makes E[X_j target] = kappa for every relevant j.
struct RecoveryScenario {
  int p = 100;
  int s_size = 3;
  double kappa = 0.6;
  int n = 1000;
  std::uint64_t seed = 0;
  // Defaults to sqrt(kappa), i.e. rho = 1 - 2q. Must lie in [kappa, 1].
  std::optional<double> rho;

  void validate() const;  // throws ConfigError
  double resolved_rho() const;
  double flip_probability() const;  // q
};

struct RecoveryData {
  FeatureMatrixBinary features;
  DisagreementVector target;
  std::vector<int> support;  // ascending column indices of the relevant features
};

RecoveryData gen_recovery(const RecoveryScenario& scenario);

namespace detail {
// No range checks on (rho, flip); admits the kappa = 1 limit.
RecoveryData generate_recovery(int p, int s_size, int n, double rho, double flip, Rng& rng);
}  // namespace detail

enum class LambdaPolicy { kPath, kTheorem };

struct RecoveryExperiment {
  std::vector<double> kappas = {0.2, 0.4, 0.6};
  std::vector<int> ns = {250, 500, 1000, 2000, 5000};
  int trials = 100;
  int p = 100;
  int s_size = 3;
  std::optional<double> rho;  // per-kappa default sqrt(kappa)
  std::uint64_t seed = 1;
  LambdaPolicy policy = LambdaPolicy::kPath;
  double delta = 0.05;  // only used by the theorem policy
  PathOptions path;
  int jobs = 1;

  void validate() const;
};

struct RecoveryRow {
  double kappa = 0.0;
  int n = 0;
  int trials = 0;
  double recovered_fraction = 0.0;  // selected support equals the planted one
  double contained_fraction = 0.0;  // planted support is inside the selection
};

// Rows ordered by kappa, then n. Trial t of grid cell (i, j) draws from
// Rng(seed, {i, j, t}), so results do not depend on `jobs`.
std::vector<RecoveryRow> run_recovery_experiment(const RecoveryExperiment& experiment);

struct PlantedSubset {
  double fraction = 0.3;
  int flipped_source = 0;
  double flipped_accuracy = 0.3;
};

struct E2EScenario {
  int m = 5;
  int n = 10000;
  int p = 20;
  std::vector<double> base_accuracies;  // empty: 0.8 for every source
  std::vector<double> coverages;        // empty: 0.7 for every source
  // Binary feature column 0 marks this subset.
  double subset_fraction = 0.3;
  int flipped_source = 0;
  double flipped_accuracy = 0.3;
  // Further subsets, marked by columns 1, 2, ... in order.
  std::vector<PlantedSubset> extra_subsets;
  int q_disc = 10;
  double disc_signal = 2.0;  // norm of the informative direction u
  bool subset_in_real_features = false;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
  std::vector<PlantedSubset> subsets() const;
  double base_accuracy(int source) const;
  double coverage(int source) const;
};

// Truth Y uniform; each subset indicator s_l = +1 with its fraction; source j
// abstains with probability 1 - coverage_j, otherwise votes Y with accuracy
// flipped_accuracy of the first subset that contains the object and flips j,
// else its base accuracy. Real features are Y u + N(0, I).
Dataset gen_e2e(const E2EScenario& scenario);

}  // namespace socratic

#endif  // SOCRATIC_SYNTH_H_
