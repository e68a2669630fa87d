#include <cmath>
#include <string>

#include "socratic/error.h"
#include "socratic/genmodel.h"

namespace socratic {

JointTable::JointTable(const VectorXd& phi) : num_sources_(static_cast<int>(phi.size())) {
  if (num_sources_ > kMaxSources) {
    throw ConfigError("brute-force enumeration supports at most " + std::to_string(kMaxSources) +
                      " sources, got " + std::to_string(num_sources_));
  }
  int vote_states = 1;
  for (int j = 0; j < num_sources_; ++j) vote_states *= 3;
  prob_.resize(2 * static_cast<std::size_t>(vote_states));

  // Unnormalized weights exp(y phi^T l), summed directly without any
  // factorization.
  double total = 0.0;
  for (int s = 0; s < num_states(); ++s) {
    const double w = std::exp(label_of(s) * phi.dot(votes_of(s)));
    prob_[s] = w;
    total += w;
  }
  for (double& p : prob_) p /= total;
  log_partition_ = std::log(total);
}

VectorXd JointTable::votes_of(int state) const {
  VectorXd votes(num_sources_);
  int code = state >> 1;
  for (int j = 0; j < num_sources_; ++j) {
    votes[j] = static_cast<double>(code % 3) - 1.0;
    code /= 3;
  }
  return votes;
}

int JointTable::state_of(const VectorXd& votes, int y) const {
  if (votes.size() != num_sources_) throw DataError("vote vector length does not match table");
  int code = 0;
  for (int j = num_sources_ - 1; j >= 0; --j) {
    code = 3 * code + static_cast<int>(votes[j] + 1.0);
  }
  return (code << 1) | (y > 0 ? 1 : 0);
}

double JointTable::marginal(const VectorXd& votes) const {
  return prob_[state_of(votes, 1)] + prob_[state_of(votes, -1)];
}

double JointTable::posterior_positive(const VectorXd& votes) const {
  return prob_[state_of(votes, 1)] / marginal(votes);
}

JointTable brute_force_joint(const VectorXd& phi_eff) { return JointTable(phi_eff); }

}  // namespace socratic
