#ifndef SOCRATIC_DATA_H_
#define SOCRATIC_DATA_H_

// Core containers for weak-supervision data. All are immutable after
// construction; constructors validate their invariants and throw DataError.

#include <Eigen/Dense>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace socratic {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Labeling-function votes in {-1, 0, +1}, stored source-major (M x N) since
// the generative model iterates per source. 0 means abstain.
class LabelMatrix {
 public:
  LabelMatrix(MatrixXd votes, std::vector<std::string> object_ids = {},
              std::vector<std::string> source_names = {});

  int num_sources() const { return static_cast<int>(votes_.rows()); }
  int num_objects() const { return static_cast<int>(votes_.cols()); }
  const MatrixXd& votes() const { return votes_; }
  const std::vector<std::string>& object_ids() const { return object_ids_; }
  const std::vector<std::string>& source_names() const { return source_names_; }

 private:
  MatrixXd votes_;
  std::vector<std::string> object_ids_;
  std::vector<std::string> source_names_;
};

// Object-major N x P matrix with entries in {-1, +1}.
class FeatureMatrixBinary {
 public:
  FeatureMatrixBinary(MatrixXd values, std::vector<std::string> column_names = {},
                      std::vector<std::string> object_ids = {});

  int num_objects() const { return static_cast<int>(values_.rows()); }
  int num_features() const { return static_cast<int>(values_.cols()); }
  const MatrixXd& values() const { return values_; }
  const std::vector<std::string>& column_names() const { return column_names_; }
  const std::vector<std::string>& object_ids() const { return object_ids_; }

  // Columns `indices` as an N x K matrix. Throws DataError on a bad index.
  MatrixXd columns(const std::vector<int>& indices) const;

 private:
  MatrixXd values_;
  std::vector<std::string> column_names_;
  std::vector<std::string> object_ids_;
};

// Object-major N x Q matrix of finite reals.
class FeatureMatrixReal {
 public:
  FeatureMatrixReal(MatrixXd values, std::vector<std::string> column_names = {},
                    std::vector<std::string> object_ids = {});

  int num_objects() const { return static_cast<int>(values_.rows()); }
  int num_features() const { return static_cast<int>(values_.cols()); }
  const MatrixXd& values() const { return values_; }
  const std::vector<std::string>& column_names() const { return column_names_; }
  const std::vector<std::string>& object_ids() const { return object_ids_; }

 private:
  MatrixXd values_;
  std::vector<std::string> column_names_;
  std::vector<std::string> object_ids_;
};

// Hard labels in {-1, +1}.
class HardLabelVector {
 public:
  explicit HardLabelVector(VectorXd labels, std::vector<std::string> object_ids = {});

  int size() const { return static_cast<int>(labels_.size()); }
  const VectorXd& values() const { return labels_; }
  double operator[](int i) const { return labels_[i]; }
  const std::vector<std::string>& object_ids() const { return object_ids_; }

 private:
  VectorXd labels_;
  std::vector<std::string> object_ids_;
};

// Soft labels stored as the expected label E[Y | votes] in [-1, 1].
class ProbLabelVector {
 public:
  explicit ProbLabelVector(VectorXd expected, std::vector<std::string> object_ids = {});

  int size() const { return static_cast<int>(expected_.size()); }
  const VectorXd& expected() const { return expected_; }
  double operator[](int i) const { return expected_[i]; }
  // P(Y = +1) = (1 + E[Y]) / 2.
  double probability(int i) const { return 0.5 * (1.0 + expected_[i]); }
  VectorXd probabilities() const { return 0.5 * (1.0 + expected_.array()).matrix(); }
  const std::vector<std::string>& object_ids() const { return object_ids_; }

 private:
  VectorXd expected_;
  std::vector<std::string> object_ids_;
};

struct Dataset {
  LabelMatrix labels;
  FeatureMatrixBinary bin_features;
  std::optional<FeatureMatrixReal> real_features;
  std::optional<HardLabelVector> truth;  // dev/test only
};

enum class BinaryEncoding { kPlusMinusOne, kZeroOne };

LabelMatrix load_label_matrix(std::istream& in, const std::string& source = "labels");
FeatureMatrixBinary load_binary_features(std::istream& in, BinaryEncoding encoding,
                                         const std::string& source = "features_bin");
FeatureMatrixReal load_real_features(std::istream& in,
                                     const std::string& source = "features_real");
// Reads the `y` column of a table with an object_id column; further columns
// (e.g. a `score`) are ignored.
HardLabelVector load_hard_labels(std::istream& in, const std::string& source = "truth");
// Reads the `expected_label` column of a labels_out-style table.
ProbLabelVector load_prob_labels(std::istream& in, const std::string& source = "soft_labels");

void write_label_matrix(std::ostream& out, const LabelMatrix& labels);
void write_binary_features(std::ostream& out, const FeatureMatrixBinary& features);
void write_real_features(std::ostream& out, const FeatureMatrixReal& features);
void write_hard_labels(std::ostream& out, const HardLabelVector& labels);
// object_id,expected_label,probability
void write_prob_labels(std::ostream& out, const ProbLabelVector& labels);

// Object ids for row i; falls back to the row index when none were loaded.
std::string object_id_at(const std::vector<std::string>& ids, int i);

struct ValidationFinding {
  enum class Severity { kInfo, kWarning, kFatal };
  Severity severity;
  std::string message;
};

struct ValidationReport {
  bool consistent = true;  // every component agrees on N
  std::vector<double> coverage;  // per source, fraction of non-abstain votes
  std::vector<int> positive_votes;
  std::vector<int> negative_votes;
  std::vector<int> constant_columns;  // binary feature columns
  std::vector<ValidationFinding> findings;

  bool has_fatal() const;
};

ValidationReport validate(const Dataset& dataset);

}  // namespace socratic

#endif  // SOCRATIC_DATA_H_
