#include "socratic/report.h"

#include "socratic/error.h"

namespace socratic {
namespace {

Json vec(const VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json mat(const MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vec(m.row(r).transpose()));
  return out;
}

VectorXd vec_from(const Json& j, const char* field) {
  if (!j.is_array()) throw DataError(std::string("model field '") + field + "' must be an array");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw DataError(std::string("model field '") + field + "' must hold numbers");
    }
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Json names_of(const std::vector<int>& indices, const std::vector<std::string>& names) {
  Json out = Json::array();
  for (int i : indices) out.push_back(names.at(static_cast<std::size_t>(i)));
  return out;
}

}  // namespace

Json to_json(const FitConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"max_iters", c.max_iters},
          {"grad_tol", c.grad_tol},           {"phi_init", c.phi_init},
          {"w_l2", c.w_l2},                   {"seed", c.seed}};
}

Json to_json(const DiscConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"max_iters", c.max_iters},
          {"grad_tol", c.grad_tol},           {"l2", c.l2},
          {"seed", c.seed}};
}

Json to_json(const PathOptions& o) {
  return {{"grid_size", o.grid_size},
          {"lambda_min_ratio", o.lambda_min_ratio},
          {"tol", o.tol},
          {"max_sweeps", o.max_sweeps},
          {"max_entries", o.max_entries}};
}

Json to_json(const RunConfig& c) {
  return {{"k_max", c.k_max},
          {"patience", c.patience},
          {"dev_metric", to_string(c.dev_metric)},
          {"standardize", c.standardize},
          {"refresh_disagreement", c.refresh_disagreement},
          {"seed", c.seed},
          {"gen", to_json(c.gen)},
          {"disc", to_json(c.disc)},
          {"lasso", to_json(c.path)}};
}

Json to_json(const E2EScenario& s) {
  Json subsets = Json::array();
  for (const auto& sub : s.subsets()) {
    subsets.push_back({{"fraction", sub.fraction},
                       {"flipped_source", sub.flipped_source},
                       {"flipped_accuracy", sub.flipped_accuracy}});
  }
  Json base = Json::array();
  Json cov = Json::array();
  for (int j = 0; j < s.m; ++j) {
    base.push_back(s.base_accuracy(j));
    cov.push_back(s.coverage(j));
  }
  return {{"m", s.m},
          {"n", s.n},
          {"p", s.p},
          {"base_accuracies", base},
          {"coverages", cov},
          {"subsets", subsets},
          {"q_disc", s.q_disc},
          {"disc_signal", s.disc_signal},
          {"subset_in_real_features", s.subset_in_real_features},
          {"seed", s.seed}};
}

Json gen_model_json(const GenParams& params, const FitConfig& config) {
  Json doc;
  if (const auto* sp = std::get_if<GenParamsSP>(&params)) {
    doc["phi"] = vec(sp->phi);
    doc["w"] = Json::array();
    doc["selected"] = Json::array();
  } else {
    const auto& aug = std::get<GenParamsAug>(params);
    doc["phi"] = vec(aug.phi);
    doc["w"] = mat(aug.w);
    doc["selected"] = aug.selected;
  }
  doc["config"] = to_json(config);
  return doc;
}

GenParams gen_params_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("phi")) throw DataError("model JSON lacks 'phi'");
  VectorXd phi = vec_from(doc["phi"], "phi");
  if (phi.size() < 1) throw DataError("model JSON 'phi' is empty");
  const Json w = doc.value("w", Json::array());
  const Json selected = doc.value("selected", Json::array());
  if (!w.is_array() || !selected.is_array()) {
    throw DataError("model fields 'w' and 'selected' must be arrays");
  }
  if (w.empty() && selected.empty()) return GenParamsSP{std::move(phi)};
  if (w.size() != selected.size()) {
    throw DataError("model JSON: 'w' must have one row per selected feature");
  }
  GenParamsAug aug;
  aug.w.resize(static_cast<Eigen::Index>(w.size()), phi.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const VectorXd row = vec_from(w[i], "w");
    if (row.size() != phi.size()) throw DataError("model JSON: 'w' rows must have length M");
    aug.w.row(static_cast<Eigen::Index>(i)) = row.transpose();
    if (!selected[i].is_number_integer() || selected[i].get<int>() < 0) {
      throw DataError("model JSON: 'selected' must hold non-negative integers");
    }
    aug.selected.push_back(selected[i].get<int>());
  }
  aug.phi = std::move(phi);
  return aug;
}

Json disc_model_json(const DiscParams& params) {
  return {{"theta", vec(params.theta)}, {"bias", params.bias}};
}

DiscParams disc_params_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("theta") || !doc.contains("bias") ||
      !doc["bias"].is_number()) {
    throw DataError("discriminative model JSON needs 'theta' and numeric 'bias'");
  }
  return {vec_from(doc["theta"], "theta"), doc["bias"].get<double>()};
}

Json to_json(const ClassificationScores& s) {
  return {{"tp", s.tp},
          {"fp", s.fp},
          {"tn", s.tn},
          {"fn", s.fn},
          {"accuracy", s.accuracy},
          {"precision", s.precision},
          {"recall", s.recall},
          {"f1", s.f1},
          {"percent",
           {{"accuracy", format_percent(s.accuracy)},
            {"precision", format_percent(s.precision)},
            {"recall", format_percent(s.recall)},
            {"f1", format_percent(s.f1)}}}};
}

Json to_json(const ConditionReport& r) {
  Json doc = {{"estimates", "empirical"},
              {"num_objects", r.num_objects},
              {"num_features", r.num_features},
              {"alpha", r.alpha},
              {"beta", r.beta},
              {"gamma", r.gamma},
              {"c", r.c},
              {"irrelevant_residual_corr", r.irrelevant_residual_corr},
              {"sigma_ss", mat(r.sigma_ss)},
              {"sigma_s_sbar", mat(r.sigma_s_sbar)},
              {"condition_number", r.condition_number},
              {"satisfied",
               {{"incoherence", r.incoherence},
                {"relevance", r.relevance},
                {"irrelevance", r.irrelevance}}},
              {"delta", r.delta}};
  doc["recommended_lambda"] = r.recommended_lambda ? Json(*r.recommended_lambda) : Json();
  doc["recommended_lambda_unnormalized"] =
      r.recommended_lambda ? Json(unnormalized_lambda(*r.recommended_lambda, r.num_objects))
                           : Json();
  doc["admissible_lambda"] = {
      {"low", r.admissible_lambda_low ? Json(*r.admissible_lambda_low) : Json()},
      {"high", r.admissible_lambda_high}};
  doc["n_bound"] = r.n_bound ? Json(*r.n_bound) : Json();
  return doc;
}

Json to_json(const ValidationReport& r) {
  Json findings = Json::array();
  for (const auto& f : r.findings) {
    const char* sev = f.severity == ValidationFinding::Severity::kFatal     ? "fatal"
                      : f.severity == ValidationFinding::Severity::kWarning ? "warning"
                                                                            : "info";
    findings.push_back({{"severity", sev}, {"message", f.message}});
  }
  return {{"consistent", r.consistent},
          {"coverage", r.coverage},
          {"positive_votes", r.positive_votes},
          {"negative_votes", r.negative_votes},
          {"constant_columns", r.constant_columns},
          {"findings", findings}};
}

Json run_report_json(const RunReport& report, const Dataset& dataset) {
  const auto& names = dataset.bin_features.column_names();
  Json iterations = Json::array();
  for (const auto& it : report.iterations) {
    Json rec;
    rec["k"] = it.k;
    rec["selected"] = it.selected;
    rec["selected_names"] = names_of(it.selected, names);
    rec["agreement"] = it.agreement;
    rec["dev_metric"] = it.dev_metric ? Json(*it.dev_metric) : Json();
    if (const auto* sp = std::get_if<GenParamsSP>(&it.gen_params)) {
      rec["phi"] = vec(sp->phi);
      rec["w"] = Json::array();
    } else {
      const auto& aug = std::get<GenParamsAug>(it.gen_params);
      rec["phi"] = vec(aug.phi);
      rec["w"] = mat(aug.w);
    }
    rec["gen_objective"] = it.gen_objective;
    rec["disc"] = disc_model_json(it.disc_params);
    rec["disc_loss"] = it.disc_loss;
    iterations.push_back(std::move(rec));
  }
  Json doc;
  doc["iterations"] = std::move(iterations);
  doc["best_k"] = report.best_k;
  doc["stop_reason"] = to_string(report.stop_reason);
  doc["tracked_metric"] = dataset.truth ? "dev_metric" : "agreement";
  doc["lambda_max"] = report.lambda_max ? Json(*report.lambda_max) : Json();
  doc["entry_order"] = report.entry_order;
  doc["entry_order_names"] = names_of(report.entry_order, names);
  return doc;
}

}  // namespace socratic
