#include "socratic/data.h"

#include <cmath>

#include "socratic/csv.h"
#include "socratic/error.h"

namespace socratic {
namespace {

std::vector<std::string> default_names(const std::string& prefix, int count) {
  std::vector<std::string> names;
  names.reserve(count);
  for (int i = 1; i <= count; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

void check_ids(const std::vector<std::string>& ids, Eigen::Index n, const char* what) {
  if (!ids.empty() && static_cast<Eigen::Index>(ids.size()) != n) {
    throw DataError(std::string(what) + ": " + std::to_string(ids.size()) +
                    " object ids for " + std::to_string(n) + " objects");
  }
}

void require_object_id_header(const CsvTable& table) {
  if (table.header.empty() || table.header[0] != "object_id") {
    throw DataError(table.source + ": first header column must be object_id");
  }
  if (table.rows.empty()) throw DataError(table.source + ": no objects");
}

std::vector<std::string> ids_of(const CsvTable& table) {
  std::vector<std::string> ids;
  ids.reserve(table.rows.size());
  for (const auto& row : table.rows) ids.push_back(row[0]);
  return ids;
}

std::vector<std::string> value_columns(const CsvTable& table) {
  return {table.header.begin() + 1, table.header.end()};
}

}  // namespace

LabelMatrix::LabelMatrix(MatrixXd votes, std::vector<std::string> object_ids,
                         std::vector<std::string> source_names)
    : votes_(std::move(votes)),
      object_ids_(std::move(object_ids)),
      source_names_(std::move(source_names)) {
  if (votes_.rows() < 1) throw DataError("label matrix: no sources");
  if (votes_.cols() < 1) throw DataError("label matrix: no objects");
  for (Eigen::Index o = 0; o < votes_.cols(); ++o) {
    for (Eigen::Index j = 0; j < votes_.rows(); ++j) {
      const double v = votes_(j, o);
      if (v != -1.0 && v != 0.0 && v != 1.0) {
        throw DataError("label matrix: vote of source " + std::to_string(j) + " on object " +
                        std::to_string(o) + " is not in {-1,0,1}");
      }
    }
  }
  check_ids(object_ids_, votes_.cols(), "label matrix");
  if (source_names_.empty()) source_names_ = default_names("lf_", num_sources());
  if (static_cast<int>(source_names_.size()) != num_sources()) {
    throw DataError("label matrix: source name count does not match source count");
  }
}

FeatureMatrixBinary::FeatureMatrixBinary(MatrixXd values, std::vector<std::string> column_names,
                                         std::vector<std::string> object_ids)
    : values_(std::move(values)),
      column_names_(std::move(column_names)),
      object_ids_(std::move(object_ids)) {
  if (values_.rows() < 1) throw DataError("binary features: no objects");
  if (values_.cols() < 1) throw DataError("binary features: no columns");
  if (!((values_.array() == 1.0) || (values_.array() == -1.0)).all()) {
    throw DataError("binary features: entries must be -1 or +1");
  }
  check_ids(object_ids_, values_.rows(), "binary features");
  if (column_names_.empty()) column_names_ = default_names("f_", num_features());
  if (static_cast<int>(column_names_.size()) != num_features()) {
    throw DataError("binary features: column name count does not match column count");
  }
}

MatrixXd FeatureMatrixBinary::columns(const std::vector<int>& indices) const {
  MatrixXd out(values_.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= num_features()) {
      throw DataError("feature index " + std::to_string(indices[i]) + " out of range [0," +
                      std::to_string(num_features()) + ")");
    }
    out.col(static_cast<Eigen::Index>(i)) = values_.col(indices[i]);
  }
  return out;
}

FeatureMatrixReal::FeatureMatrixReal(MatrixXd values, std::vector<std::string> column_names,
                                     std::vector<std::string> object_ids)
    : values_(std::move(values)),
      column_names_(std::move(column_names)),
      object_ids_(std::move(object_ids)) {
  if (values_.rows() < 1) throw DataError("real features: no objects");
  if (!values_.allFinite()) throw DataError("real features: non-finite entry");
  check_ids(object_ids_, values_.rows(), "real features");
  if (column_names_.empty()) column_names_ = default_names("v_", num_features());
  if (static_cast<int>(column_names_.size()) != num_features()) {
    throw DataError("real features: column name count does not match column count");
  }
}

HardLabelVector::HardLabelVector(VectorXd labels, std::vector<std::string> object_ids)
    : labels_(std::move(labels)), object_ids_(std::move(object_ids)) {
  if (!((labels_.array() == 1.0) || (labels_.array() == -1.0)).all()) {
    throw DataError("hard labels: entries must be -1 or +1");
  }
  check_ids(object_ids_, labels_.size(), "hard labels");
}

ProbLabelVector::ProbLabelVector(VectorXd expected, std::vector<std::string> object_ids)
    : expected_(std::move(expected)), object_ids_(std::move(object_ids)) {
  if (!expected_.allFinite() || (expected_.array().abs() > 1.0).any()) {
    throw DataError("soft labels: expected labels must lie in [-1,1]");
  }
  check_ids(object_ids_, expected_.size(), "soft labels");
}

LabelMatrix load_label_matrix(std::istream& in, const std::string& source) {
  const CsvTable table = read_csv(in, source);
  require_object_id_header(table);
  const auto m = static_cast<Eigen::Index>(table.header.size()) - 1;
  if (m < 1) throw DataError(source + ": no labeling-function columns");
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  MatrixXd votes(m, n);
  for (Eigen::Index o = 0; o < n; ++o) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& cell = table.rows[o][j + 1];
      const auto v = parse_integer(cell);
      if (!v) table.fail(o, j + 1, "'" + cell + "' is not an integer");
      if (*v < -1 || *v > 1) table.fail(o, j + 1, "value " + cell + " not in {-1,0,1}");
      votes(j, o) = static_cast<double>(*v);
    }
  }
  return LabelMatrix(std::move(votes), ids_of(table), value_columns(table));
}

FeatureMatrixBinary load_binary_features(std::istream& in, BinaryEncoding encoding,
                                         const std::string& source) {
  const CsvTable table = read_csv(in, source);
  require_object_id_header(table);
  const auto p = static_cast<Eigen::Index>(table.header.size()) - 1;
  if (p < 1) throw DataError(source + ": no feature columns");
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  MatrixXd values(n, p);
  const char* domain = encoding == BinaryEncoding::kZeroOne ? "{0,1}" : "{-1,1}";
  for (Eigen::Index o = 0; o < n; ++o) {
    for (Eigen::Index i = 0; i < p; ++i) {
      const auto& cell = table.rows[o][i + 1];
      const auto v = parse_integer(cell);
      double mapped = 0.0;
      if (v && encoding == BinaryEncoding::kZeroOne && (*v == 0 || *v == 1)) {
        mapped = *v == 1 ? 1.0 : -1.0;
      } else if (v && encoding == BinaryEncoding::kPlusMinusOne && (*v == -1 || *v == 1)) {
        mapped = static_cast<double>(*v);
      } else {
        table.fail(o, i + 1, "value '" + cell + "' not in " + domain);
      }
      values(o, i) = mapped;
    }
  }
  return FeatureMatrixBinary(std::move(values), value_columns(table), ids_of(table));
}

FeatureMatrixReal load_real_features(std::istream& in, const std::string& source) {
  const CsvTable table = read_csv(in, source);
  require_object_id_header(table);
  const auto q = static_cast<Eigen::Index>(table.header.size()) - 1;
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  MatrixXd values(n, q);
  for (Eigen::Index o = 0; o < n; ++o) {
    for (Eigen::Index i = 0; i < q; ++i) {
      const auto& cell = table.rows[o][i + 1];
      const auto v = parse_real(cell);
      if (!v || !std::isfinite(*v)) table.fail(o, i + 1, "'" + cell + "' is not a finite real");
      values(o, i) = *v;
    }
  }
  return FeatureMatrixReal(std::move(values), value_columns(table), ids_of(table));
}

HardLabelVector load_hard_labels(std::istream& in, const std::string& source) {
  const CsvTable table = read_csv(in, source);
  require_object_id_header(table);
  const int col = table.column_index("y");
  if (col < 0) throw DataError(source + ": missing column y");
  VectorXd labels(static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t o = 0; o < table.rows.size(); ++o) {
    const auto& cell = table.rows[o][col];
    const auto v = parse_integer(cell);
    if (!v || (*v != -1 && *v != 1)) table.fail(o, col, "value '" + cell + "' not in {-1,1}");
    labels[static_cast<Eigen::Index>(o)] = static_cast<double>(*v);
  }
  return HardLabelVector(std::move(labels), ids_of(table));
}

ProbLabelVector load_prob_labels(std::istream& in, const std::string& source) {
  const CsvTable table = read_csv(in, source);
  require_object_id_header(table);
  const int col = table.column_index("expected_label");
  if (col < 0) throw DataError(source + ": missing column expected_label");
  VectorXd expected(static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t o = 0; o < table.rows.size(); ++o) {
    const auto& cell = table.rows[o][col];
    const auto v = parse_real(cell);
    if (!v || !(std::abs(*v) <= 1.0)) table.fail(o, col, "value '" + cell + "' not in [-1,1]");
    expected[static_cast<Eigen::Index>(o)] = *v;
  }
  return ProbLabelVector(std::move(expected), ids_of(table));
}

std::string object_id_at(const std::vector<std::string>& ids, int i) {
  return ids.empty() ? std::to_string(i) : ids[i];
}

void write_label_matrix(std::ostream& out, const LabelMatrix& labels) {
  out << "object_id";
  for (const auto& name : labels.source_names()) out << ',' << name;
  out << '\n';
  for (int o = 0; o < labels.num_objects(); ++o) {
    out << object_id_at(labels.object_ids(), o);
    for (int j = 0; j < labels.num_sources(); ++j) {
      out << ',' << static_cast<int>(labels.votes()(j, o));
    }
    out << '\n';
  }
}

void write_binary_features(std::ostream& out, const FeatureMatrixBinary& features) {
  out << "object_id";
  for (const auto& name : features.column_names()) out << ',' << name;
  out << '\n';
  for (int o = 0; o < features.num_objects(); ++o) {
    out << object_id_at(features.object_ids(), o);
    for (int i = 0; i < features.num_features(); ++i) {
      out << ',' << static_cast<int>(features.values()(o, i));
    }
    out << '\n';
  }
}

void write_real_features(std::ostream& out, const FeatureMatrixReal& features) {
  out << "object_id";
  for (const auto& name : features.column_names()) out << ',' << name;
  out << '\n';
  for (int o = 0; o < features.num_objects(); ++o) {
    out << object_id_at(features.object_ids(), o);
    for (int i = 0; i < features.num_features(); ++i) {
      out << ',' << format_real(features.values()(o, i));
    }
    out << '\n';
  }
}

void write_hard_labels(std::ostream& out, const HardLabelVector& labels) {
  out << "object_id,y\n";
  for (int o = 0; o < labels.size(); ++o) {
    out << object_id_at(labels.object_ids(), o) << ',' << static_cast<int>(labels[o]) << '\n';
  }
}

void write_prob_labels(std::ostream& out, const ProbLabelVector& labels) {
  out << "object_id,expected_label,probability\n";
  for (int o = 0; o < labels.size(); ++o) {
    out << object_id_at(labels.object_ids(), o) << ',' << format_real(labels[o]) << ','
        << format_real(labels.probability(o)) << '\n';
  }
}

bool ValidationReport::has_fatal() const {
  for (const auto& f : findings) {
    if (f.severity == ValidationFinding::Severity::kFatal) return true;
  }
  return false;
}

ValidationReport validate(const Dataset& dataset) {
  using Severity = ValidationFinding::Severity;
  ValidationReport report;
  const auto& labels = dataset.labels;
  const int n = labels.num_objects();

  auto check_n = [&](int other, const char* what) {
    if (other != n) {
      report.consistent = false;
      report.findings.push_back({Severity::kFatal, std::string(what) + " has " +
                                                       std::to_string(other) + " objects, labels have " +
                                                       std::to_string(n)});
    }
  };
  check_n(dataset.bin_features.num_objects(), "binary features");
  if (dataset.real_features) check_n(dataset.real_features->num_objects(), "real features");
  if (dataset.truth) check_n(dataset.truth->size(), "truth");

  for (int j = 0; j < labels.num_sources(); ++j) {
    const auto row = labels.votes().row(j).array();
    const int pos = static_cast<int>((row > 0).count());
    const int neg = static_cast<int>((row < 0).count());
    report.positive_votes.push_back(pos);
    report.negative_votes.push_back(neg);
    report.coverage.push_back(static_cast<double>(pos + neg) / n);
    if (pos + neg == 0) {
      report.findings.push_back(
          {Severity::kWarning, "source " + labels.source_names()[j] + " never votes"});
    } else if (pos == 0 || neg == 0) {
      report.findings.push_back({Severity::kInfo, "source " + labels.source_names()[j] +
                                                      " votes for one class only"});
    }
  }

  const auto& x = dataset.bin_features.values();
  for (int i = 0; i < dataset.bin_features.num_features(); ++i) {
    const double first = x(0, i);
    if ((x.col(i).array() == first).all()) {
      report.constant_columns.push_back(i);
      report.findings.push_back({Severity::kInfo, "feature column " +
                                                      dataset.bin_features.column_names()[i] +
                                                      " is constant"});
    }
  }
  return report;
}

}  // namespace socratic
